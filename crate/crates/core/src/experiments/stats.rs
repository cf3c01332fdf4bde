//! Monte-Carlo estimates and check outcomes.

use serde::{Deserialize, Serialize};

/// Statistical checks allow this many standard errors.
pub const SE_MULTIPLE: f64 = 3.0;
/// Statistical checks are reported, not asserted, below this sample count.
pub const MIN_ASSERT_SAMPLES: usize = 30;
/// Deterministic inequalities allow this absolute slack.
pub const DETERMINISTIC_SLACK: f64 = 1e-10;
/// Quantities closer than this (relative) are reported as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Sample mean with its standard error (`sd / sqrt(count)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let count = samples.len();
        if count == 0 {
            return Self { mean: f64::NAN, se: f64::NAN, count };
        }
        let n = count as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let se = if count > 1 {
            let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            f64::INFINITY
        };
        Self { mean, se, count }
    }

    /// Estimate of `a_i - b_i`.
    pub fn paired(a: &[f64], b: &[f64]) -> Self {
        assert_eq!(a.len(), b.len(), "paired samples need equal lengths");
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self::from_samples(&d)
    }

    /// `sqrt(mean)` with a delta-method standard error.
    pub fn sqrt(&self) -> Self {
        let root = self.mean.max(0.0).sqrt();
        let se = if root > 0.0 { self.se / (2.0 * root) } else { 0.0 };
        Self { mean: root, se, count: self.count }
    }

    pub fn assertable(&self) -> bool {
        self.count >= MIN_ASSERT_SAMPLES
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Tie,
    NotAsserted,
}

impl Status {
    pub fn is_fail(self) -> bool {
        self == Status::Fail
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Tie => "tie",
            Status::NotAsserted => "not_asserted",
        }
    }

    /// Fail beats pass beats tie; only not-asserted parts give not-asserted.
    pub fn combine(items: impl IntoIterator<Item = Status>) -> Status {
        let mut seen_pass = false;
        let mut seen_tie = false;
        for s in items {
            match s {
                Status::Fail => return Status::Fail,
                Status::Pass => seen_pass = true,
                Status::Tie => seen_tie = true,
                Status::NotAsserted => {}
            }
        }
        if seen_pass {
            Status::Pass
        } else if seen_tie {
            Status::Tie
        } else {
            Status::NotAsserted
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn is_tie(diff: f64, scale: f64) -> bool {
    diff.abs() <= TIE_TOLERANCE * scale.abs().max(1.0)
}

/// `|E[a - b]| <= 3 SE`.
pub fn equal_within_se(diff: &Estimate, scale: f64) -> Status {
    if is_tie(diff.mean, scale) && diff.se <= TIE_TOLERANCE * scale.abs().max(1.0) {
        Status::Tie
    } else if !diff.assertable() {
        Status::NotAsserted
    } else if diff.mean.abs() <= SE_MULTIPLE * diff.se {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// `E[a - b] >= -3 SE`.
pub fn at_least_within_se(diff: &Estimate, scale: f64) -> Status {
    if is_tie(diff.mean, scale) && diff.se <= TIE_TOLERANCE * scale.abs().max(1.0) {
        Status::Tie
    } else if !diff.assertable() {
        Status::NotAsserted
    } else if diff.mean >= -SE_MULTIPLE * diff.se {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Deterministic `a >= b` with absolute slack; ties within the tie tolerance.
pub fn at_least(a: f64, b: f64) -> Status {
    if is_tie(a - b, a.abs().max(b.abs())) {
        Status::Tie
    } else if a >= b - DETERMINISTIC_SLACK {
        Status::Pass
    } else {
        Status::Fail
    }
}

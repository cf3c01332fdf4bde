//! Parameters of the experiment suite. Every field has a default.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::transform::ShiftSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationaryChecks {
    pub window: usize,
    pub stride: usize,
    pub size: usize,
    pub count: usize,
    pub spectral_exponent: f64,
    pub amplitude: f64,
    /// Soft threshold of the fixed bank, in unitary coefficient units.
    pub threshold: f64,
    pub half_range: f64,
    pub knot_count: usize,
    /// Pairs used to train the bank of the trained-bank comparison.
    pub train_count: usize,
}

impl Default for StationaryChecks {
    fn default() -> Self {
        Self {
            window: 2,
            stride: 1,
            size: 32,
            count: 120,
            spectral_exponent: 2.0,
            amplitude: 40.0,
            threshold: 20.0,
            half_range: 300.0,
            knot_count: 31,
            train_count: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingChecks {
    pub window: usize,
    pub size: usize,
    pub train_count: usize,
    pub eval_count: usize,
    pub knot_count: usize,
    pub random_banks: usize,
    pub random_images: usize,
    /// Redundancies of the pointwise objective-ordering check.
    pub pointwise_redundancies: Vec<usize>,
    /// Redundancy of the trained-bank chain check.
    pub chain_redundancy: usize,
}

impl Default for TrainingChecks {
    fn default() -> Self {
        Self {
            window: 4,
            size: 32,
            train_count: 20,
            eval_count: 20,
            knot_count: 15,
            random_banks: 50,
            random_images: 10,
            pointwise_redundancies: vec![4, 16],
            chain_redundancy: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectionCheck {
    pub window: usize,
    pub size: usize,
    pub redundancies: Vec<usize>,
    pub samples: usize,
}

impl Default for ProjectionCheck {
    fn default() -> Self {
        Self {
            window: 4,
            size: 32,
            redundancies: vec![4, 16],
            samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub window: usize,
    pub redundancies: Vec<usize>,
    pub sigma: f64,
    pub size: usize,
    pub train_count: usize,
    pub test_count: usize,
    pub knot_count: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            window: 4,
            redundancies: vec![1, 4, 16],
            sigma: 50.0,
            size: 32,
            train_count: 12,
            test_count: 40,
            knot_count: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub window: usize,
    pub stride: usize,
    pub sigmas: Vec<f64>,
    pub crop_size: usize,
    pub crop_count: usize,
    pub train_realizations: usize,
    pub test_realizations: usize,
    pub knot_count: usize,
    pub mismatched: bool,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            window: 4,
            stride: 1,
            sigmas: vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
            crop_size: 64,
            crop_count: 6,
            train_realizations: 5,
            test_realizations: 5,
            knot_count: 15,
            mismatched: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentsConfig {
    pub stationary: StationaryChecks,
    pub training: TrainingChecks,
    pub projection: ProjectionCheck,
    pub sweep: SweepConfig,
    pub compare: CompareConfig,
}

fn check_dims(what: &str, window: usize, size: usize) -> Result<()> {
    if window == 0 || size == 0 || size % window != 0 {
        return Err(invalid(format!("{what}: size {size} must be a positive multiple of window {window}")));
    }
    Ok(())
}

impl ExperimentsConfig {
    pub fn validate(&self) -> Result<()> {
        let s = &self.stationary;
        check_dims("stationary", s.window, s.size)?;
        ShiftSet::new(s.window, s.stride, s.stride)?;
        if s.count == 0 || s.train_count == 0 || s.knot_count < 2 || !(s.half_range > 0.0) {
            return Err(invalid("stationary: counts must be positive, knot_count >= 2, half_range > 0"));
        }
        let t = &self.training;
        check_dims("training", t.window, t.size)?;
        for &k in t.pointwise_redundancies.iter().chain([&t.chain_redundancy]) {
            ShiftSet::for_redundancy(t.window, k)?;
        }
        if t.train_count == 0 || t.eval_count == 0 || t.random_banks == 0 || t.random_images == 0 || t.knot_count < 2 {
            return Err(invalid("training: counts must be positive and knot_count >= 2"));
        }
        let p = &self.projection;
        check_dims("projection", p.window, p.size)?;
        for &k in &p.redundancies {
            ShiftSet::for_redundancy(p.window, k)?;
        }
        if p.samples < 2 {
            return Err(invalid("projection: need at least 2 samples"));
        }
        let w = &self.sweep;
        check_dims("sweep", w.window, w.size)?;
        if w.redundancies.is_empty() || w.redundancies.windows(2).any(|p| p[0] >= p[1]) {
            return Err(invalid("sweep: redundancies must be non-empty and strictly increasing"));
        }
        for &k in &w.redundancies {
            ShiftSet::for_redundancy(w.window, k)?;
        }
        if w.train_count == 0 || w.test_count == 0 || !(w.sigma >= 0.0) || w.knot_count < 2 {
            return Err(invalid("sweep: counts must be positive, sigma >= 0, knot_count >= 2"));
        }
        let c = &self.compare;
        check_dims("compare", c.window, c.crop_size)?;
        ShiftSet::new(c.window, c.stride, c.stride)?;
        if c.sigmas.is_empty() || c.sigmas.iter().any(|s| !(*s >= 0.0)) {
            return Err(invalid("compare: sigmas must be non-empty and >= 0"));
        }
        if c.crop_count == 0 || c.train_realizations == 0 || c.test_realizations == 0 || c.knot_count < 2 {
            return Err(invalid("compare: counts must be positive and knot_count >= 2"));
        }
        if c.mismatched && c.crop_count < 2 {
            return Err(invalid("compare: the mismatched protocol needs at least 2 crops"));
        }
        Ok(())
    }
}

//! Report types shared by every check.

use serde::{Deserialize, Serialize};

use super::stats::{Estimate, Status};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub quantity: String,
    pub value: f64,
    pub se: Option<f64>,
    /// Limit the value was compared against, when there is one.
    pub bound: Option<f64>,
    pub status: Status,
}

impl Measurement {
    pub fn value(quantity: impl Into<String>, value: f64) -> Self {
        Self {
            quantity: quantity.into(),
            value,
            se: None,
            bound: None,
            status: Status::NotAsserted,
        }
    }

    pub fn estimate(quantity: impl Into<String>, e: &Estimate) -> Self {
        Self {
            se: Some(e.se),
            ..Self::value(quantity, e.mean)
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: u8,
    pub check: String,
    pub status: Status,
    pub tolerance: String,
    pub samples: usize,
    pub measurements: Vec<Measurement>,
}

impl TheoremReport {
    /// Status is combined from the measurements.
    pub fn new(theorem: u8, check: impl Into<String>, tolerance: impl Into<String>, samples: usize, measurements: Vec<Measurement>) -> Self {
        let status = Status::combine(measurements.iter().map(|m| m.status));
        Self {
            theorem,
            check: check.into(),
            status,
            tolerance: tolerance.into(),
            samples,
            measurements,
        }
    }

    /// Keep the measurements but report them without asserting.
    pub fn not_asserted(mut self) -> Self {
        self.status = Status::NotAsserted;
        self
    }

    pub fn rows(&self, config_hash: &str) -> Vec<TheoremRow> {
        self.measurements
            .iter()
            .map(|m| TheoremRow {
                theorem: self.theorem,
                check: self.check.clone(),
                quantity: m.quantity.clone(),
                value: m.value,
                se: m.se,
                bound: m.bound,
                status: m.status,
                check_status: self.status,
                tolerance: self.tolerance.clone(),
                samples: self.samples,
                config_hash: config_hash.to_string(),
            })
            .collect()
    }
}

/// One CSV line of `theorems.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremRow {
    pub theorem: u8,
    pub check: String,
    pub quantity: String,
    pub value: f64,
    pub se: Option<f64>,
    pub bound: Option<f64>,
    pub status: Status,
    pub check_status: Status,
    pub tolerance: String,
    pub samples: usize,
    pub config_hash: String,
}

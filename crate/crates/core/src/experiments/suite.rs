//! The full `check-theorems` run.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::substream;
use crate::shrinkage::KnotGrid;
use crate::training::{grids_for_pairs, train_method3, HalfRangeRule, TrainOptions};
use crate::transform::RedundantTransform;

use super::config::ExperimentsConfig;
use super::ensemble::{nonstationary_fixture, EnsembleSpec};
use super::report::{Measurement, TheoremReport};
use super::stats::Status;
use super::sweep::{sweep_redundancy, SweepResult};
use super::theorems::{check_projection, check_theorem1, check_theorem2, check_theorems_3_4_5, noisy_pairs, soft_threshold_bank};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremSuite {
    pub reports: Vec<TheoremReport>,
    pub sweep: SweepResult,
}

impl TheoremSuite {
    pub fn status(&self) -> Status {
        Status::combine(self.reports.iter().map(|r| r.status))
    }
}

pub fn run_theorem_suite(cfg: &ExperimentsConfig, sigma: f64, opts: &TrainOptions, seed: u64) -> Result<TheoremSuite> {
    let s = &cfg.stationary;
    let mut spec = EnsembleSpec::stationary(s.size, s.size, s.count, substream(seed, "stationary-ensemble", 0));
    spec.spectral_exponent = s.spectral_exponent;
    spec.amplitude = s.amplitude;
    let ensemble = spec.generate()?;
    let w = RedundantTransform::new(s.window, s.stride, s.stride, s.size, s.size)?;
    let u = RedundantTransform::unitary(s.window, s.size, s.size)?;
    let fixed = soft_threshold_bank(s.window, KnotGrid::new(s.half_range, s.knot_count)?, s.threshold)?;

    let mut reports = vec![check_theorem1(&w, &ensemble, &fixed, sigma, seed)?];

    let fixture = nonstationary_fixture(s.size, s.size, s.count, s.window, substream(seed, "fixture", 0))?;
    let control = check_theorem1(&w, &fixture, &fixed, sigma, seed)?;
    let detected = control.status == Status::Fail;
    let mut control = control.not_asserted();
    control.check = "negative_control_nonstationary".into();
    control
        .measurements
        .push(Measurement::value("control_detected", if detected { 1.0 } else { 0.0 }));
    reports.push(control);

    reports.push(check_theorem2(&u, &w, &ensemble, &fixed, sigma, seed)?);

    spec.count = s.train_count;
    spec.seed = substream(seed, "stationary-train", 0);
    let train_pairs = noisy_pairs(&spec.generate()?, sigma, seed, "stationary-train-noise")?;
    let grids = grids_for_pairs(&u, &train_pairs, s.knot_count, HalfRangeRule::default())?;
    let trained = train_method3(&u, &grids, &train_pairs, opts)?.bank;
    let mut r = check_theorem2(&u, &w, &ensemble, &trained, sigma, seed)?;
    r.check = "spatial_mse_unitary_ge_redundant_trained".into();
    reports.push(r);

    reports.extend(check_theorems_3_4_5(&cfg.training, sigma, opts, seed)?);
    reports.push(check_projection(&cfg.projection, seed)?);
    let sweep = sweep_redundancy(&cfg.sweep, opts, seed)?;
    reports.push(sweep.report());
    Ok(TheoremSuite { reports, sweep })
}

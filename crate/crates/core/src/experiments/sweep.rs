//! Reconstruction error against redundancy, with the `E_opt + Δ*/√k` bound.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::image::Image;
use crate::pipeline::{denoise, mse};
use crate::rng::substream;
use crate::training::{grids_for_pairs, train_method3, HalfRangeRule, TrainOptions};
use crate::transform::{realizable_redundancies, RedundantTransform, ShiftSet};

use super::config::SweepConfig;
use super::ensemble::EnsembleSpec;
use super::report::{Measurement, TheoremReport};
use super::stats::{Estimate, Status, MIN_ASSERT_SAMPLES, SE_MULTIPLE};
use super::theorems::noisy_pairs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub k: usize,
    pub stride_x: usize,
    pub stride_y: usize,
    pub rmse: f64,
    pub rmse_se: f64,
    /// `E_opt + Δ*/√k`
    pub bound: f64,
    pub samples: usize,
    pub bound_status: Status,
    /// Against the previous (smaller) `k`; not asserted for the first point.
    pub monotone_status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub window: usize,
    pub sigma: f64,
    pub e_opt: f64,
    pub delta_star: f64,
    pub points: Vec<SweepPoint>,
    /// Redundancies reachable with divisor strides of the window.
    pub realizable: Vec<usize>,
}

/// One CSV line of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub stride_x: usize,
    pub stride_y: usize,
    pub rmse: f64,
    pub rmse_se: f64,
    pub bound: f64,
    pub e_opt: f64,
    pub delta_star: f64,
    pub samples: usize,
    pub bound_status: Status,
    pub monotone_status: Status,
    pub config_hash: String,
}

impl SweepResult {
    pub fn rows(&self, config_hash: &str) -> Vec<SweepRow> {
        self.points
            .iter()
            .map(|p| SweepRow {
                k: p.k,
                stride_x: p.stride_x,
                stride_y: p.stride_y,
                rmse: p.rmse,
                rmse_se: p.rmse_se,
                bound: p.bound,
                e_opt: self.e_opt,
                delta_star: self.delta_star,
                samples: p.samples,
                bound_status: p.bound_status,
                monotone_status: p.monotone_status,
                config_hash: config_hash.to_string(),
            })
            .collect()
    }

    pub fn report(&self) -> TheoremReport {
        let mut ms = vec![
            Measurement::value("e_opt", self.e_opt),
            Measurement::value("delta_star", self.delta_star),
        ];
        for p in &self.points {
            ms.push(
                Measurement::value(format!("rmse_k{}", p.k), p.rmse)
                    .with_bound(p.bound + SE_MULTIPLE * p.rmse_se)
                    .with_status(p.bound_status),
            );
            ms.push(Measurement::value(format!("rmse_se_k{}", p.k), p.rmse_se));
            ms.push(Measurement::value(format!("monotone_k{}", p.k), p.rmse).with_status(p.monotone_status));
        }
        let samples = self.points.first().map_or(0, |p| p.samples);
        TheoremReport::new(6, "redundancy_sweep_bound", "3 SE", samples, ms)
    }
}

/// Train method 3 at each redundancy and measure RMSE on held-out images.
pub fn sweep_redundancy(cfg: &SweepConfig, opts: &TrainOptions, seed: u64) -> Result<SweepResult> {
    if cfg.redundancies.is_empty() || cfg.redundancies.windows(2).any(|p| p[0] >= p[1]) {
        return Err(invalid("sweep redundancies must be non-empty and strictly increasing"));
    }
    let shifts = cfg
        .redundancies
        .iter()
        .map(|&k| ShiftSet::for_redundancy(cfg.window, k))
        .collect::<Result<Vec<_>>>()?;
    let train_imgs = EnsembleSpec::natural(cfg.size, cfg.size, cfg.train_count, substream(seed, "sweep-train", 0)).generate()?;
    let test_imgs = EnsembleSpec::natural(cfg.size, cfg.size, cfg.test_count, substream(seed, "sweep-test", 0)).generate()?;
    let train_pairs = noisy_pairs(&train_imgs, cfg.sigma, seed, "sweep-train-noise")?;
    let test_pairs = noisy_pairs(&test_imgs, cfg.sigma, seed, "sweep-test-noise")?;

    let mut per_k: Vec<Vec<f64>> = Vec::new();
    let mut recon: Vec<Vec<Image>> = Vec::new();
    for s in &shifts {
        let t = RedundantTransform::new(cfg.window, s.stride_x(), s.stride_y(), cfg.size, cfg.size)?;
        let grids = grids_for_pairs(&t, &train_pairs, cfg.knot_count, HalfRangeRule::default())?;
        let bank = train_method3(&t, &grids, &train_pairs, opts)?.bank;
        let outs = test_pairs
            .iter()
            .map(|p| denoise(&p.noisy, &t, &bank))
            .collect::<Result<Vec<_>>>()?;
        per_k.push(
            outs.iter()
                .zip(&test_pairs)
                .map(|(o, p)| mse(o, &p.clean))
                .collect::<Result<_>>()?,
        );
        recon.push(outs);
    }
    let last = per_k.len() - 1;
    let e_opt = Estimate::from_samples(&per_k[last]).sqrt().mean;
    let dev: Vec<f64> = recon[0]
        .iter()
        .zip(&recon[last])
        .map(|(a, b)| mse(a, b))
        .collect::<Result<_>>()?;
    let delta_star = Estimate::from_samples(&dev).sqrt().mean;

    let assertable = test_pairs.len() >= MIN_ASSERT_SAMPLES;
    let mut points = Vec::with_capacity(shifts.len());
    for (i, s) in shifts.iter().enumerate() {
        let k = s.redundancy();
        let e = Estimate::from_samples(&per_k[i]).sqrt();
        let bound = e_opt + delta_star / (k as f64).sqrt();
        let bound_status = if !assertable {
            Status::NotAsserted
        } else if e.mean <= bound + SE_MULTIPLE * e.se {
            Status::Pass
        } else {
            Status::Fail
        };
        let monotone_status = if i == 0 || !assertable {
            Status::NotAsserted
        } else {
            let d = Estimate::paired(&per_k[i], &per_k[i - 1]);
            if d.mean <= SE_MULTIPLE * d.se {
                Status::Pass
            } else {
                Status::Fail
            }
        };
        points.push(SweepPoint {
            k,
            stride_x: s.stride_x(),
            stride_y: s.stride_y(),
            rmse: e.mean,
            rmse_se: e.se,
            bound,
            samples: test_pairs.len(),
            bound_status,
            monotone_status,
        });
    }
    let mut realizable: Vec<usize> = realizable_redundancies(cfg.window).iter().map(|o| o.redundancy).collect();
    realizable.sort_unstable();
    realizable.dedup();
    Ok(SweepResult {
        window: cfg.window,
        sigma: cfg.sigma,
        e_opt,
        delta_star,
        points,
        realizable,
    })
}

//! Checks of the unitary-versus-redundant relations.
//!
//! Transform-domain and spatial-domain errors are computed per sample and
//! compared with paired Monte-Carlo differences. Objective orderings that
//! hold per sample are checked exactly, with [`DETERMINISTIC_SLACK`].

use crate::error::{shape, Result};
use crate::image::Image;
use crate::pipeline::{add_gaussian_noise, NoiseSpec};
use crate::rng::{substream, CounterRng};
use crate::shrinkage::{KnotGrid, PiecewiseLinearSf, SfBank};
use crate::training::{
    grids_for_pairs, objective_values, pair_terms, train, HalfRangeRule, Method, TrainOptions, TrainedBank,
    TrainingPair,
};
use crate::transform::RedundantTransform;

use super::config::{ProjectionCheck, TrainingChecks};
use super::ensemble::EnsembleSpec;
use super::report::{Measurement, TheoremReport};
use super::stats::{at_least, at_least_within_se, equal_within_se, Estimate, Status, DETERMINISTIC_SLACK};

/// `y_i = x_i + n_i` with noise keyed by `(seed, tag, i)`.
pub fn noisy_pairs(images: &[Image], sigma: f64, seed: u64, tag: &str) -> Result<Vec<TrainingPair>> {
    images
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let y = add_gaussian_noise(x, NoiseSpec { sigma, seed: substream(seed, tag, i as u64) })?;
            TrainingPair::new(x.clone(), y)
        })
        .collect()
}

/// `ψ(t) = sign(t) max(|t| - tau, 0)` sampled on `grid` in every band.
/// Exact when `tau` is a knot.
pub fn soft_threshold_bank(window: usize, grid: KnotGrid, tau: f64) -> Result<SfBank> {
    let params: Vec<f64> = grid.knots().iter().map(|t| t.signum() * (t.abs() - tau).max(0.0)).collect();
    let sf = PiecewiseLinearSf::new(grid, params)?;
    SfBank::new(window, vec![sf; window * window])
}

fn check_same_geometry(a: &RedundantTransform, b: &RedundantTransform) -> Result<()> {
    if a.window() != b.window() || a.width() != b.width() || a.height() != b.height() {
        return Err(shape("transforms must share window and image size"));
    }
    Ok(())
}

fn shift_name(t: &RedundantTransform, s: usize) -> String {
    let (dx, dy) = t.shifts().offset(s);
    format!("U({dx},{dy})")
}

/// Transform-domain MSE of every shifted unitary transform and of the frame.
///
/// `bank` acts on unitary coefficients; inside the frame it is applied as
/// `bank.rescaled(sqrt(k))`, which is cycle spinning. Per sample, the error
/// of shift `s` is `k` times the energy of its offset slice of
/// `W x - ψ_W(W y)`.
pub fn check_theorem1(t: &RedundantTransform, ensemble: &[Image], bank: &SfBank, sigma: f64, seed: u64) -> Result<TheoremReport> {
    let k = t.redundancy();
    let bank_w = bank.rescaled((k as f64).sqrt())?;
    let n = t.pixel_count() as f64;
    let pairs = noisy_pairs(ensemble, sigma, seed, "theorem1-noise")?;
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(pairs.len()); k + 1];
    for p in &pairs {
        let r = t.forward(&p.clean)?.sub(&bank_w.apply(&t.forward(&p.noisy)?)?)?;
        for (s, out) in series.iter_mut().take(k).enumerate() {
            let e: f64 = (0..t.band_count())
                .map(|b| r.offset_slice(b, s).iter().map(|v| v * v).sum::<f64>())
                .sum();
            out.push(k as f64 * e / n);
        }
        series[k].push(r.norm_squared() / n);
    }
    let names: Vec<String> = (0..k).map(|s| shift_name(t, s)).chain(["W".to_string()]).collect();
    let mut ms: Vec<Measurement> = series
        .iter()
        .zip(&names)
        .map(|(v, name)| Measurement::estimate(format!("mse_transform_{name}"), &Estimate::from_samples(v)))
        .collect();
    for i in 0..series.len() {
        for j in i + 1..series.len() {
            let d = Estimate::paired(&series[i], &series[j]);
            let scale = ms[i].value.max(ms[j].value);
            let status = equal_within_se(&d, scale);
            ms.push(
                Measurement::estimate(format!("diff_{}_{}", names[i], names[j]), &d)
                    .with_bound(3.0 * d.se)
                    .with_status(status),
            );
        }
    }
    Ok(TheoremReport::new(1, "transform_mse_equal", "3 SE", pairs.len(), ms))
}

/// `||U^T (U x - ψ(U y))|| >= ||W^T (W x - ψ_W(W y))||` in expectation.
pub fn check_theorem2(
    unitary: &RedundantTransform,
    redundant: &RedundantTransform,
    ensemble: &[Image],
    bank: &SfBank,
    sigma: f64,
    seed: u64,
) -> Result<TheoremReport> {
    check_same_geometry(unitary, redundant)?;
    let pairs = noisy_pairs(ensemble, sigma, seed, "theorem2-noise")?;
    let n = unitary.pixel_count() as f64;
    let spatial = |t: &RedundantTransform| -> Result<Vec<f64>> {
        let b = bank.rescaled((t.redundancy() as f64).sqrt())?;
        pairs
            .iter()
            .map(|p| {
                let r = t.forward(&p.clean)?.sub(&b.apply(&t.forward(&p.noisy)?)?)?;
                Ok(t.adjoint(&r)?.norm_squared() / n)
            })
            .collect()
    };
    let a = spatial(unitary)?;
    let b = spatial(redundant)?;
    let ea = Estimate::from_samples(&a);
    let eb = Estimate::from_samples(&b);
    let d = Estimate::paired(&a, &b);
    let status = at_least_within_se(&d, ea.mean.max(eb.mean));
    let ms = vec![
        Measurement::estimate(format!("rmse_spatial_k{}", unitary.redundancy()), &ea.sqrt()),
        Measurement::estimate(format!("rmse_spatial_k{}", redundant.redundancy()), &eb.sqrt()),
        Measurement::estimate("mse_difference", &d)
            .with_bound(-3.0 * d.se)
            .with_status(status),
    ];
    Ok(TheoremReport::new(2, "spatial_mse_unitary_ge_redundant", "3 SE", pairs.len(), ms))
}

fn bound_status(value: f64, bound: f64) -> Status {
    if value <= bound {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn train_all(t: &RedundantTransform, pairs: &[TrainingPair], knot_count: usize, opts: &TrainOptions) -> Result<Vec<TrainedBank>> {
    let grids = grids_for_pairs(t, pairs, knot_count, HalfRangeRule::default())?;
    Method::ALL.iter().map(|&m| train(m, t, &grids, pairs, opts)).collect()
}

/// Ensemble-wide random bank: `p_j = a t_j + b h g_j` per band.
pub fn random_bank(window: usize, grids: &[KnotGrid], rng: &mut CounterRng) -> Result<SfBank> {
    let sfs = grids
        .iter()
        .map(|g| {
            let a = 1.5 * rng.next_f64();
            let b = 2.0 * rng.next_f64();
            let p = g.knots().iter().map(|t| a * t + b * g.spacing() * rng.next_gaussian()).collect();
            PiecewiseLinearSf::new(*g, p)
        })
        .collect::<Result<Vec<_>>>()?;
    SfBank::new(window, sfs)
}

fn image_set(cfg: &TrainingChecks, count: usize, seed: u64, tag: &str) -> Result<Vec<Image>> {
    EnsembleSpec::natural(cfg.size, cfg.size, count, substream(seed, tag, 0)).generate()
}

/// Unitary equivalence of the three trainers.
pub fn check_theorem3(cfg: &TrainingChecks, sigma: f64, opts: &TrainOptions, seed: u64) -> Result<TheoremReport> {
    let u = RedundantTransform::unitary(cfg.window, cfg.size, cfg.size)?;
    let train_pairs = noisy_pairs(&image_set(cfg, cfg.train_count, seed, "t3-train")?, sigma, seed, "t3-train-noise")?;
    let eval_pairs = noisy_pairs(&image_set(cfg, cfg.eval_count, seed, "t3-eval")?, sigma, seed, "t3-eval-noise")?;
    let banks = train_all(&u, &train_pairs, cfg.knot_count, opts)?;
    let params: Vec<Vec<f64>> = banks.iter().map(|b| b.bank.flat_params()).collect();
    let deltas = banks
        .iter()
        .map(|b| Ok(objective_values(&u, &b.bank, &eval_pairs)?.delta3))
        .collect::<Result<Vec<f64>>>()?;
    let mut ms = Vec::new();
    for (i, d) in deltas.iter().enumerate() {
        ms.push(Measurement::value(format!("delta_eval_M{}", i + 1), *d));
    }
    for (i, b) in banks.iter().enumerate() {
        let gap = (b.objectives.delta1 - b.objectives.delta2).abs();
        ms.push(
            Measurement::value(format!("delta1_delta2_gap_M{}", i + 1), gap)
                .with_bound(DETERMINISTIC_SLACK)
                .with_status(bound_status(gap, DETERMINISTIC_SLACK)),
        );
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let dd = (banks[i].objectives.delta3 - banks[j].objectives.delta3).abs();
        ms.push(
            Measurement::value(format!("delta_train_diff_M{}_M{}", i + 1, j + 1), dd)
                .with_bound(DETERMINISTIC_SLACK)
                .with_status(bound_status(dd, DETERMINISTIC_SLACK)),
        );
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let pd = max_abs_diff(&params[i], &params[j]);
        ms.push(
            Measurement::value(format!("max_param_diff_M{}_M{}", i + 1, j + 1), pd)
                .with_bound(1e-8)
                .with_status(bound_status(pd, 1e-8)),
        );
        let dd = (deltas[i] - deltas[j]).abs();
        ms.push(
            Measurement::value(format!("delta_eval_diff_M{}_M{}", i + 1, j + 1), dd)
                .with_bound(DETERMINISTIC_SLACK)
                .with_status(bound_status(dd, DETERMINISTIC_SLACK)),
        );
    }
    Ok(TheoremReport::new(3, "unitary_methods_equal", "params 1e-8, delta 1e-10", train_pairs.len(), ms))
}

/// `Δ₁ >= Δ₂ >= Δ₃` for random banks, per sample and over the set.
pub fn check_theorem4(cfg: &TrainingChecks, sigma: f64, seed: u64) -> Result<TheoremReport> {
    let pairs = noisy_pairs(&image_set(cfg, cfg.random_images, seed, "t4-images")?, sigma, seed, "t4-noise")?;
    let mut ms = Vec::new();
    let mut checked = 0;
    for &k in &cfg.pointwise_redundancies {
        let t = RedundantTransform::with_redundancy(cfg.window, k, cfg.size, cfg.size)?;
        let grids = grids_for_pairs(&t, &pairs, cfg.knot_count, HalfRangeRule::default())?;
        let mut violations = 0usize;
        let mut gap12 = f64::INFINITY;
        let mut gap23 = f64::INFINITY;
        for b in 0..cfg.random_banks {
            let mut rng = CounterRng::from_tag(seed, "t4-bank", (k * 100_000 + b) as u64);
            let bank = random_bank(cfg.window, &grids, &mut rng)?;
            let mut all = Vec::with_capacity(pairs.len() + 1);
            for p in &pairs {
                all.push(pair_terms(&t, &bank, p)?.objectives());
            }
            all.push(objective_values(&t, &bank, &pairs)?);
            for o in &all {
                checked += 1;
                gap12 = gap12.min(o.delta1 - o.delta2);
                gap23 = gap23.min(o.delta2 - o.delta3);
                if at_least(o.delta1, o.delta2).is_fail() || at_least(o.delta2, o.delta3).is_fail() {
                    violations += 1;
                }
            }
        }
        ms.push(
            Measurement::value(format!("violations_k{k}"), violations as f64)
                .with_bound(0.0)
                .with_status(if violations == 0 { Status::Pass } else { Status::Fail }),
        );
        ms.push(Measurement::value(format!("min_gap_d1_d2_k{k}"), gap12).with_bound(-DETERMINISTIC_SLACK));
        ms.push(Measurement::value(format!("min_gap_d2_d3_k{k}"), gap23).with_bound(-DETERMINISTIC_SLACK));
    }
    Ok(TheoremReport::new(4, "objective_ordering_pointwise", "1e-10 absolute", checked, ms))
}

/// Chain of trained objectives in the redundant frame, plus the
/// reported-only held-out comparison of methods 1 and 2.
pub fn check_theorem5(cfg: &TrainingChecks, sigma: f64, opts: &TrainOptions, seed: u64) -> Result<TheoremReport> {
    let t = RedundantTransform::with_redundancy(cfg.window, cfg.chain_redundancy, cfg.size, cfg.size)?;
    let train_pairs = noisy_pairs(&image_set(cfg, cfg.train_count, seed, "t5-train")?, sigma, seed, "t5-train-noise")?;
    let eval_pairs = noisy_pairs(&image_set(cfg, cfg.eval_count, seed, "t5-eval")?, sigma, seed, "t5-eval-noise")?;
    let banks = train_all(&t, &train_pairs, cfg.knot_count, opts)?;
    let own: Vec<f64> = banks.iter().map(|b| b.objectives.get(b.method)).collect();
    let actual: Vec<f64> = banks.iter().map(|b| b.objectives.delta3).collect();
    let mut ms = vec![
        Measurement::value("delta1_psi1", own[0]),
        Measurement::value("delta2_psi2", own[1]),
        Measurement::value("delta3_psi3", own[2]),
        Measurement::value("chain_delta1_psi1_minus_delta2_psi2", own[0] - own[1])
            .with_bound(-DETERMINISTIC_SLACK)
            .with_status(at_least(own[0], own[1])),
        Measurement::value("chain_delta2_psi2_minus_delta3_psi3", own[1] - own[2])
            .with_bound(-DETERMINISTIC_SLACK)
            .with_status(at_least(own[1], own[2])),
        Measurement::value("delta2_psi2_minus_delta_psi2", own[1] - actual[1])
            .with_bound(-DETERMINISTIC_SLACK)
            .with_status(at_least(own[1], actual[1])),
        Measurement::value("delta_psi2_minus_delta_psi3", actual[1] - actual[2])
            .with_bound(-DETERMINISTIC_SLACK)
            .with_status(at_least(actual[1], actual[2])),
        Measurement::value("delta1_psi1_minus_delta_psi1", own[0] - actual[0])
            .with_bound(-DETERMINISTIC_SLACK)
            .with_status(at_least(own[0], actual[0])),
        Measurement::value("delta_psi1_minus_delta_psi3", actual[0] - actual[2])
            .with_bound(-DETERMINISTIC_SLACK)
            .with_status(at_least(actual[0], actual[2])),
    ];
    let held: Vec<f64> = banks
        .iter()
        .map(|b| Ok(objective_values(&t, &b.bank, &eval_pairs)?.delta3))
        .collect::<Result<_>>()?;
    for (i, d) in held.iter().enumerate() {
        ms.push(Measurement::value(format!("delta_eval_M{}", i + 1), *d));
    }
    ms.push(Measurement::value("delta_eval_M1_minus_M2", held[0] - held[1]));
    Ok(TheoremReport::new(5, "trained_objective_chain", "1e-10 absolute", train_pairs.len(), ms))
}

pub fn check_theorems_3_4_5(cfg: &TrainingChecks, sigma: f64, opts: &TrainOptions, seed: u64) -> Result<Vec<TheoremReport>> {
    Ok(vec![
        check_theorem3(cfg, sigma, opts, seed)?,
        check_theorem4(cfg, sigma, seed)?,
        check_theorem5(cfg, sigma, opts, seed)?,
    ])
}

/// `E ||W W^T z||² / ||z||² = 1/k` on isotropic Gaussian `z`.
pub fn check_projection(cfg: &ProjectionCheck, seed: u64) -> Result<TheoremReport> {
    let mut ms = Vec::new();
    for &k in &cfg.redundancies {
        let t = RedundantTransform::with_redundancy(cfg.window, k, cfg.size, cfg.size)?;
        let mut rng = CounterRng::from_tag(seed, "projection", k as u64);
        let mut ratios = Vec::with_capacity(cfg.samples);
        let mut squares = Vec::with_capacity(cfg.samples);
        for _ in 0..cfg.samples {
            let mut z = t.empty_stack();
            z.as_mut_slice().iter_mut().for_each(|v| *v = rng.next_gaussian());
            let pz = t.forward(&t.adjoint(&z)?)?;
            let r = pz.norm_squared() / z.norm_squared();
            squares.push(r);
            ratios.push(r.sqrt());
        }
        let target = 1.0 / (k as f64).sqrt();
        let e = Estimate::from_samples(&ratios);
        let centered: Vec<f64> = ratios.iter().map(|r| r - target).collect();
        let status = equal_within_se(&Estimate::from_samples(&centered), target);
        ms.push(
            Measurement::estimate(format!("norm_ratio_k{k}"), &e)
                .with_bound(target)
                .with_status(status),
        );
        ms.push(Measurement::estimate(format!("sq_ratio_k{k}"), &Estimate::from_samples(&squares)).with_bound(1.0 / k as f64));
    }
    Ok(TheoremReport::new(6, "projection_shrinks_by_sqrt_k", "3 SE", cfg.samples, ms))
}

//! Acceptance gate: one line per criterion, nonzero exit on any failure.

#[allow(dead_code)]
mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use shrinkframe::experiments::{
    check_projection, check_theorem1, check_theorem2, check_theorem3, check_theorem4, check_theorem5, compare_methods,
    natural_crops, soft_threshold_bank, sweep_redundancy, CompareConfig, EnsembleSpec, ProjectionCheck, Protocol, Status,
    StationaryChecks, SweepConfig, TheoremReport, TrainingChecks,
};
use shrinkframe::io::RunConfig;
use shrinkframe::rng::{substream, CounterRng};
use shrinkframe::training::TrainOptions;
use shrinkframe::{Image, KnotGrid, RedundantTransform};

const SEED: u64 = 7;
const SIGMA: f64 = 20.0;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn options() -> TrainOptions {
    RunConfig::default().sf.train_options()
}

fn asserted_pass(status: Status) -> bool {
    matches!(status, Status::Pass | Status::Tie)
}

fn report_line(r: &TheoremReport) -> String {
    format!("theorem {} {} = {}", r.theorem, r.check, r.status)
}

fn failing(r: &TheoremReport) -> String {
    r.measurements
        .iter()
        .filter(|m| m.status.is_fail())
        .map(|m| format!("{}={:.3e}", m.quantity, m.value))
        .collect::<Vec<_>>()
        .join(", ")
}

fn frame_identities() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut transforms = 0;
    for w in [2usize, 4, 8] {
        let divisors: Vec<usize> = (1..=w).filter(|d| w % d == 0).collect();
        for &sx in &divisors {
            for &sy in &divisors {
                let t = RedundantTransform::new(w, sx, sy, 16, 16).unwrap();
                let mut rng = CounterRng::from_tag(SEED, "acceptance-frame", (w * 100 + sx * 10 + sy) as u64);
                for _ in 0..100 {
                    let x = Image::from_fn(16, 16, |_, _| 100.0 * rng.next_gaussian());
                    let z = t.forward(&x).unwrap();
                    let back = t.adjoint(&z).unwrap();
                    worst = worst
                        .max((z.norm() - x.norm()).abs() / x.norm())
                        .max(back.sub(&x).unwrap().norm() / x.norm());
                }
                transforms += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= 1e-10 && elapsed < Duration::from_secs(30),
        format!("{transforms} transforms x 100 images, max relative deviation {worst:.2e}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn training_report(r: TheoremReport) -> Outcome {
    let mut detail = report_line(&r);
    let f = failing(&r);
    if !f.is_empty() {
        detail.push_str(&format!(" [{f}]"));
    }
    Outcome::new(asserted_pass(r.status), detail)
}

fn theorem4() -> Outcome {
    training_report(check_theorem4(&TrainingChecks::default(), SIGMA, SEED).unwrap())
}

fn theorem3() -> Outcome {
    let r = check_theorem3(&TrainingChecks::default(), SIGMA, &options(), SEED).unwrap();
    let worst = |prefix: &str| {
        r.measurements
            .iter()
            .filter(|m| m.quantity.starts_with(prefix))
            .map(|m| m.value)
            .fold(0.0, f64::max)
    };
    let extra = format!(
        ", max param diff {:.1e}, max delta diff {:.1e}",
        worst("max_param_diff"),
        worst("delta_train_diff").max(worst("delta_eval_diff"))
    );
    let mut o = training_report(r);
    o.detail.push_str(&extra);
    o
}

fn theorem5() -> Outcome {
    let r = check_theorem5(&TrainingChecks::default(), SIGMA, &options(), SEED).unwrap();
    let chain: Vec<String> = r.measurements[..3].iter().map(|m| format!("{:.4}", m.value)).collect();
    let mut o = training_report(r);
    o.detail.push_str(&format!(", chain {}", chain.join(" >= ")));
    o
}

fn theorems_1_2() -> Outcome {
    let start = Instant::now();
    let s = StationaryChecks::default();
    let mut spec = EnsembleSpec::stationary(s.size, s.size, s.count, substream(SEED, "stationary-ensemble", 0));
    spec.spectral_exponent = s.spectral_exponent;
    spec.amplitude = s.amplitude;
    let ensemble = spec.generate().unwrap();
    let w = RedundantTransform::new(s.window, s.stride, s.stride, s.size, s.size).unwrap();
    let u = RedundantTransform::unitary(s.window, s.size, s.size).unwrap();
    let bank = soft_threshold_bank(s.window, KnotGrid::new(s.half_range, s.knot_count).unwrap(), s.threshold).unwrap();
    let t1 = check_theorem1(&w, &ensemble, &bank, SIGMA, SEED).unwrap();
    let t2 = check_theorem2(&u, &w, &ensemble, &bank, SIGMA, SEED).unwrap();
    let elapsed = start.elapsed();
    let passed = s.count >= 100
        && t1.status == Status::Pass
        && t2.status == Status::Pass
        && elapsed < Duration::from_secs(300);
    Outcome::new(
        passed,
        format!(
            "{} samples {}x{}, {}; {}; {:.1}s",
            s.count,
            s.size,
            s.size,
            report_line(&t1),
            report_line(&t2),
            elapsed.as_secs_f64()
        ),
    )
}

fn projection_and_sweep() -> Outcome {
    let proj = check_projection(&ProjectionCheck::default(), SEED).unwrap();
    let sweep = sweep_redundancy(&SweepConfig::default(), &options(), SEED).unwrap();
    let points_ok = sweep
        .points
        .iter()
        .all(|p| asserted_pass(p.bound_status) && !p.monotone_status.is_fail());
    let asserted = sweep.points.iter().all(|p| p.samples >= 30);
    let ratios: Vec<String> = proj
        .measurements
        .iter()
        .filter(|m| m.quantity.starts_with("norm_ratio"))
        .map(|m| format!("{} {:.4} (target {:.4})", m.quantity, m.value, m.bound.unwrap()))
        .collect();
    let curve: Vec<String> = sweep
        .points
        .iter()
        .map(|p| format!("k={} rmse {:.3} <= {:.3}", p.k, p.rmse, p.bound))
        .collect();
    Outcome::new(
        proj.status == Status::Pass && points_ok && asserted,
        format!("{}; {}", ratios.join(", "), curve.join(", ")),
    )
}

fn oracles() -> Outcome {
    const CASES: usize = 24;
    let (ef, ea) = common::forward_adjoint_errors(CASES, 101);
    let ed = common::denoise_error(CASES, 102);
    let et: Vec<f64> = (1..=3).map(|m| common::trainer_error(m, CASES, 103 + m as u64)).collect();
    let worst = [ef, ea, ed, et[0], et[1], et[2]].into_iter().fold(0.0, f64::max);
    Outcome::new(
        worst < 1e-8,
        format!(
            "{CASES} cases each: forward {ef:.1e}, adjoint {ea:.1e}, denoise {ed:.1e}, M1 {:.1e}, M2 {:.1e}, M3 {:.1e}",
            et[0], et[1], et[2]
        ),
    )
}

fn method_ordering() -> Outcome {
    let cfg = CompareConfig::default();
    let images = natural_crops(cfg.crop_size, cfg.crop_count, substream(SEED, "compare-crops", 0)).unwrap();
    let report = compare_methods(&cfg, &images, &options(), SEED, "acceptance").unwrap();
    let matched: Vec<_> = report.summaries.iter().filter(|s| s.protocol == Protocol::Matched).collect();
    let mismatched_violations: Vec<String> = report
        .summaries
        .iter()
        .filter(|s| s.protocol == Protocol::Mismatched && s.violated)
        .map(|s| format!("sigma {}", s.sigma))
        .collect();
    let passed = matched.len() == 8 && matched.iter().all(|s| s.status == Status::Pass);
    let failing: Vec<String> = matched
        .iter()
        .filter(|s| s.status != Status::Pass)
        .map(|s| format!("sigma {} {}", s.sigma, s.status))
        .collect();
    Outcome::new(
        passed,
        format!(
            "{} matched levels, failing [{}]; mismatched violations [{}]",
            matched.len(),
            failing.join(", "),
            mismatched_violations.join(", ")
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["first", "second"] {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_shrinkframe"))
            .args(["check-theorems", "--seed", "7", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        if status.status.code() != Some(0) {
            return Outcome::new(false, format!("check-theorems exited {:?}", status.status.code()));
        }
        outputs.push(std::fs::read(out.join("theorems.csv")).unwrap());
    }
    Outcome::new(
        !outputs[0].is_empty() && outputs[0] == outputs[1],
        format!("theorems.csv {} bytes, identical {}", outputs[0].len(), outputs[0] == outputs[1]),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("frame identities", frame_identities),
        ("pointwise objective ordering", theorem4),
        ("unitary method equivalence", theorem3),
        ("trained objective chain", theorem5),
        ("shift and redundancy MSE relations", theorems_1_2),
        ("projection ratio and redundancy sweep", projection_and_sweep),
        ("dense oracle equivalence", oracles),
        ("method ordering across noise levels", method_ordering),
        ("check-theorems determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!(
            "[{}] criterion {}: {name}: {} ({:.1}s)",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

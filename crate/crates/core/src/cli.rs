//! Command-line surface. The binary only forwards to [`run`].
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 a theorem or
//! frame check failed.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{compare_methods, natural_crops, run_theorem_suite, sweep_redundancy, EnsembleSpec, Status};
use crate::image::Image;
use crate::io::{encode_pgm_with_comment, read_pgm, write_csv, write_json, BankFile, RunConfig};
use crate::pipeline::{denoise, mse, psnr};
use crate::rng::substream;
use crate::shrinkage::SfBank;
use crate::training::{grids_for_pairs, train, Method, TrainedBank, TrainingPair};
use crate::transform::verify_tight_frame;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "shrinkframe", version, about = "Shrinkage denoising in cycle-spinning tight frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
struct Common {
    /// JSON run configuration; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    /// Stride in both directions.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    method: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a shrinkage bank and write bank.json.
    Train(#[command(flatten)] Common),
    /// Denoise one PGM image; writes denoised.pgm and metrics.json.
    Denoise {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
        /// Trained bank; trained from the config when absent.
        #[arg(long)]
        bank: Option<PathBuf>,
        /// Clean reference for PSNR/MSE.
        #[arg(long)]
        clean: Option<PathBuf>,
    },
    /// Check the tight-frame identities on random images.
    VerifyFrame {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 32)]
        size: usize,
    },
    /// Run the full theorem suite; writes theorems.csv, sweep.csv, summary.json.
    CheckTheorems(#[command(flatten)] Common),
    /// RMSE against redundancy with the bound curve; writes sweep.csv.
    SweepRedundancy(#[command(flatten)] Common),
    /// Methods 1-3 across noise levels; writes compare.csv and friends.
    CompareMethods(#[command(flatten)] Common),
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn load_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = c.sigma {
        cfg.noise.sigma = s;
    }
    if let Some(w) = c.window {
        cfg.transform.window = w;
    }
    if let Some(s) = c.stride {
        cfg.transform.stride_x = s;
        cfg.transform.stride_y = s;
    }
    if let Some(s) = c.seed {
        cfg.noise.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.output = o.clone();
    }
    Ok(cfg)
}

fn method_of(c: &Common) -> Result<Method> {
    Method::from_number(c.method.unwrap_or(3))
}

fn prepare_out(cfg: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.output)?;
    Ok(cfg.output.clone())
}

fn status_code(s: Status) -> i32 {
    if s.is_fail() {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Train(c) => cmd_train(&c),
        Command::Denoise {
            common,
            input,
            bank,
            clean,
        } => cmd_denoise(&common, &input, bank.as_deref(), clean.as_deref()),
        Command::VerifyFrame { common, trials, size } => cmd_verify_frame(&common, trials, size),
        Command::CheckTheorems(c) => cmd_check_theorems(&c),
        Command::SweepRedundancy(c) => cmd_sweep(&c),
        Command::CompareMethods(c) => cmd_compare(&c),
    }
}

fn same_size(images: &[Image], window: usize) -> Result<(usize, usize)> {
    let (w, h) = (images[0].width(), images[0].height());
    if images.iter().any(|i| i.width() != w || i.height() != h) {
        return Err(Error::Config("training images must share one size".into()));
    }
    if w % window != 0 || h % window != 0 {
        return Err(Error::Config(format!("image size {w}x{h} is not a multiple of window {window}")));
    }
    Ok((w, h))
}

/// Clean images from `data.train`, else `data.ensemble`, else a default
/// natural-image ensemble; each gets `noise.realizations` noisy copies.
fn training_pairs(cfg: &RunConfig) -> Result<Vec<TrainingPair>> {
    let clean: Vec<Image> = if !cfg.data.train.is_empty() {
        cfg.data.train.iter().map(read_pgm).collect::<Result<_>>()?
    } else {
        let spec = cfg
            .data
            .ensemble
            .clone()
            .unwrap_or_else(|| EnsembleSpec::natural(64, 64, 8, substream(cfg.noise.seed, "default-train", 0)));
        spec.generate()?
    };
    same_size(&clean, cfg.transform.window)?;
    let mut pairs = Vec::new();
    for (i, x) in clean.iter().enumerate() {
        for r in 0..cfg.noise.realizations {
            let key = substream(substream(cfg.noise.seed, "train-noise", i as u64), "realization", r as u64);
            let y = crate::pipeline::add_gaussian_noise(x, crate::pipeline::NoiseSpec { sigma: cfg.noise.sigma, seed: key })?;
            pairs.push(TrainingPair::new(x.clone(), y)?);
        }
    }
    Ok(pairs)
}

fn train_bank(cfg: &RunConfig, method: Method) -> Result<(TrainedBank, usize)> {
    let pairs = training_pairs(cfg)?;
    let (w, h) = (pairs[0].clean.width(), pairs[0].clean.height());
    let t = cfg.transform.build(w, h)?;
    let grids = grids_for_pairs(&t, &pairs, cfg.sf.knot_count, cfg.sf.half_range_rule)?;
    Ok((train(method, &t, &grids, &pairs, &cfg.sf.train_options())?, pairs.len()))
}

fn strides(cfg: &RunConfig) -> [usize; 2] {
    [cfg.transform.stride_x, cfg.transform.stride_y]
}

#[derive(Serialize)]
struct TrainSummary<'a> {
    config_hash: &'a str,
    method: Method,
    pairs: usize,
    ridge_retried: bool,
    objectives: crate::training::Objectives,
}

fn cmd_train(c: &Common) -> Result<i32> {
    let cfg = load_config(c)?;
    cfg.validate()?;
    let method = method_of(c)?;
    let hash = cfg.hash();
    let out = prepare_out(&cfg)?;
    let (trained, pairs) = train_bank(&cfg, method)?;
    let mut file = BankFile::from_trained(&trained, strides(&cfg))?;
    file.config_hash = Some(hash.clone());
    file.save(out.join("bank.json"))?;
    write_json(
        out.join("train_summary.json"),
        &TrainSummary {
            config_hash: &hash,
            method,
            pairs,
            ridge_retried: trained.ridge_retried,
            objectives: trained.objectives,
        },
    )?;
    println!(
        "trained {method} on {pairs} pairs: delta1 {:.6} delta2 {:.6} delta3 {:.6}",
        trained.objectives.delta1, trained.objectives.delta2, trained.objectives.delta3
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DenoiseMetrics {
    config_hash: String,
    input: String,
    bank: String,
    method: Option<Method>,
    window: usize,
    strides: [usize; 2],
    width: usize,
    height: usize,
    mse_vs_clean: Option<f64>,
    psnr_vs_clean: Option<f64>,
    input_psnr_vs_clean: Option<f64>,
}

fn cmd_denoise(c: &Common, input: &Path, bank_path: Option<&Path>, clean: Option<&Path>) -> Result<i32> {
    let mut cfg = load_config(c)?;
    let y = read_pgm(input)?;
    let (bank, method, source): (SfBank, Option<Method>, String) = match bank_path {
        Some(p) => {
            let f = BankFile::load(p)?;
            if c.window.is_none() {
                cfg.transform.window = f.window;
            }
            if c.stride.is_none() {
                cfg.transform.stride_x = f.strides[0];
                cfg.transform.stride_y = f.strides[1];
            }
            (f.to_bank()?, f.method, p.display().to_string())
        }
        None => {
            cfg.validate()?;
            let m = method_of(c)?;
            let (trained, _) = train_bank(&cfg, m)?;
            (trained.bank, Some(m), "trained from config".into())
        }
    };
    cfg.validate()?;
    let hash = cfg.hash();
    let t = cfg.transform.build(y.width(), y.height())?;
    let x_hat = denoise(&y, &t, &bank)?;
    let out = prepare_out(&cfg)?;
    fs::write(
        out.join("denoised.pgm"),
        encode_pgm_with_comment(&x_hat, Some(&format!("config_hash {hash}"))),
    )?;
    let reference = clean.map(read_pgm).transpose()?;
    let (m, p, pin) = match &reference {
        Some(x) => (Some(mse(&x_hat, x)?), Some(psnr(&x_hat, x)?), Some(psnr(&y, x)?)),
        None => (None, None, None),
    };
    write_json(
        out.join("metrics.json"),
        &DenoiseMetrics {
            config_hash: hash,
            input: input.display().to_string(),
            bank: source,
            method,
            window: cfg.transform.window,
            strides: strides(&cfg),
            width: y.width(),
            height: y.height(),
            mse_vs_clean: m,
            psnr_vs_clean: p,
            input_psnr_vs_clean: pin,
        },
    )?;
    match p {
        Some(p) => println!("wrote {} (psnr {p:.3} dB)", out.join("denoised.pgm").display()),
        None => println!("wrote {}", out.join("denoised.pgm").display()),
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct FrameOutput {
    config_hash: String,
    report: crate::transform::FrameReport,
}

fn cmd_verify_frame(c: &Common, trials: usize, size: usize) -> Result<i32> {
    let cfg = load_config(c)?;
    cfg.validate()?;
    let w = cfg.transform.window;
    if size == 0 || size % w != 0 {
        return Err(Error::Config(format!("--size {size} must be a positive multiple of window {w}")));
    }
    let t = cfg.transform.build(size, size)?;
    let report = verify_tight_frame(&t, trials, 1e-10, cfg.noise.seed)?;
    let out = prepare_out(&cfg)?;
    println!(
        "window {} strides {}x{} k={}: max deviation {:.3e} ({})",
        report.window,
        report.stride_x,
        report.stride_y,
        report.redundancy,
        report.max_deviation(),
        if report.passed { "pass" } else { "fail" }
    );
    let passed = report.passed;
    write_json(
        out.join("frame.json"),
        &FrameOutput {
            config_hash: cfg.hash(),
            report,
        },
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Serialize)]
struct SuiteSummary<'a> {
    config_hash: &'a str,
    seed: u64,
    sigma: f64,
    status: Status,
    reports: &'a [crate::experiments::TheoremReport],
    sweep: &'a crate::experiments::SweepResult,
}

fn cmd_check_theorems(c: &Common) -> Result<i32> {
    let cfg = load_config(c)?;
    cfg.validate()?;
    let hash = cfg.hash();
    let out = prepare_out(&cfg)?;
    let suite = run_theorem_suite(&cfg.experiments, cfg.noise.sigma, &cfg.sf.train_options(), cfg.noise.seed)?;
    let rows: Vec<_> = suite.reports.iter().flat_map(|r| r.rows(&hash)).collect();
    write_csv(out.join("theorems.csv"), &rows)?;
    write_csv(out.join("sweep.csv"), &suite.sweep.rows(&hash))?;
    let status = suite.status();
    write_json(
        out.join("summary.json"),
        &SuiteSummary {
            config_hash: &hash,
            seed: cfg.noise.seed,
            sigma: cfg.noise.sigma,
            status,
            reports: &suite.reports,
            sweep: &suite.sweep,
        },
    )?;
    for r in &suite.reports {
        println!("theorem {} {}: {}", r.theorem, r.check, r.status);
    }
    println!("overall: {status}");
    Ok(status_code(status))
}

fn cmd_sweep(c: &Common) -> Result<i32> {
    let mut cfg = load_config(c)?;
    if let Some(w) = c.window {
        cfg.experiments.sweep.window = w;
    }
    if let Some(s) = c.sigma {
        cfg.experiments.sweep.sigma = s;
    }
    cfg.validate()?;
    let hash = cfg.hash();
    let out = prepare_out(&cfg)?;
    let result = sweep_redundancy(&cfg.experiments.sweep, &cfg.sf.train_options(), cfg.noise.seed)?;
    write_csv(out.join("sweep.csv"), &result.rows(&hash))?;
    let report = result.report();
    #[derive(Serialize)]
    struct Summary<'a> {
        config_hash: &'a str,
        status: Status,
        sweep: &'a crate::experiments::SweepResult,
    }
    write_json(
        out.join("summary.json"),
        &Summary {
            config_hash: &hash,
            status: report.status,
            sweep: &result,
        },
    )?;
    for p in &result.points {
        println!("k={:<3} rmse {:.4} (se {:.4}) bound {:.4} {}", p.k, p.rmse, p.rmse_se, p.bound, p.bound_status);
    }
    println!("overall: {}", report.status);
    Ok(status_code(report.status))
}

fn cmd_compare(c: &Common) -> Result<i32> {
    let mut cfg = load_config(c)?;
    if let Some(w) = c.window {
        cfg.experiments.compare.window = w;
    }
    if let Some(s) = c.stride {
        cfg.experiments.compare.stride = s;
    }
    if let Some(s) = c.sigma {
        cfg.experiments.compare.sigmas = vec![s];
    }
    cfg.validate()?;
    let hash = cfg.hash();
    let out = prepare_out(&cfg)?;
    let cc = &cfg.experiments.compare;
    let images = if cfg.data.test.is_empty() {
        natural_crops(cc.crop_size, cc.crop_count, substream(cfg.noise.seed, "compare-crops", 0))?
    } else {
        let imgs: Vec<Image> = cfg.data.test.iter().map(read_pgm).collect::<Result<_>>()?;
        same_size(&imgs, cc.window)?;
        imgs
    };
    let report = compare_methods(cc, &images, &cfg.sf.train_options(), cfg.noise.seed, &hash)?;
    write_csv(out.join("compare.csv"), &report.rows)?;
    write_csv(out.join("compare_summary.csv"), &report.summaries)?;
    #[derive(Serialize)]
    struct TimingOut<'a> {
        config_hash: &'a str,
        timing: &'a crate::experiments::Timing,
    }
    write_json(
        out.join("timing.json"),
        &TimingOut {
            config_hash: &hash,
            timing: &report.timing,
        },
    )?;
    for s in &report.summaries {
        println!(
            "{:?} sigma {:>5}: M1 {:.3} M2 {:.3} M3 {:.3} {}",
            s.protocol, s.sigma, s.mse_m1, s.mse_m2, s.mse_m3, s.status
        );
    }
    println!(
        "training seconds: M1 {:.3} M2 {:.3} M3 {:.3} (M2/M3 {:.3})",
        report.timing.method1_seconds, report.timing.method2_seconds, report.timing.method3_seconds, report.timing.ratio_m2_over_m3
    );
    println!("overall: {}", report.status);
    Ok(status_code(report.status))
}

//! Output MSE of the three trainers across noise levels.

use shrinkframe::experiments::{compare_methods, natural_crops, CompareConfig};
use shrinkframe::TrainOptions;

fn main() -> shrinkframe::Result<()> {
    let cfg = CompareConfig {
        sigmas: vec![10.0, 30.0],
        crop_size: 32,
        crop_count: 4,
        train_realizations: 3,
        test_realizations: 3,
        mismatched: false,
        ..CompareConfig::default()
    };
    let images = natural_crops(cfg.crop_size, cfg.crop_count, 4)?;
    let report = compare_methods(&cfg, &images, &TrainOptions::default(), 4, "example")?;
    for s in &report.summaries {
        println!(
            "sigma {:>4}: M1 {:8.3}  M2 {:8.3}  M3 {:8.3}  [{}]",
            s.sigma, s.mse_m1, s.mse_m2, s.mse_m3, s.status
        );
    }
    let t = &report.timing;
    println!(
        "training time M1 {:.2}s M2 {:.2}s M3 {:.2}s",
        t.method1_seconds, t.method2_seconds, t.method3_seconds
    );
    Ok(())
}

//! Denoising error as the number of cycle-spinning shifts grows.

use shrinkframe::experiments::{check_projection, sweep_redundancy, ProjectionCheck, SweepConfig};
use shrinkframe::TrainOptions;

fn main() -> shrinkframe::Result<()> {
    let proj = check_projection(&ProjectionCheck { samples: 50, ..ProjectionCheck::default() }, 1)?;
    for m in proj.measurements.iter().filter(|m| m.quantity.starts_with("norm_ratio")) {
        println!("{}: {:.4} (expected {:.4})", m.quantity, m.value, m.bound.unwrap_or(f64::NAN));
    }

    let cfg = SweepConfig {
        train_count: 6,
        test_count: 20,
        ..SweepConfig::default()
    };
    let result = sweep_redundancy(&cfg, &TrainOptions::default(), 1)?;
    println!("sigma {} e_opt {:.3} delta* {:.3}", result.sigma, result.e_opt, result.delta_star);
    for p in &result.points {
        println!(
            "k={:>2} strides {}x{}: rmse {:.3} +- {:.3}, bound {:.3} [{}]",
            p.k, p.stride_x, p.stride_y, p.rmse, p.rmse_se, p.bound, p.bound_status
        );
    }
    Ok(())
}

//! Shift-invariance and redundancy checks on a stationary ensemble, plus
//! the same check on a non-stationary image set where it should fail.

use shrinkframe::experiments::{
    check_theorem1, check_theorem2, nonstationary_fixture, soft_threshold_bank, EnsembleSpec, TheoremReport,
};
use shrinkframe::{KnotGrid, RedundantTransform};

fn print(r: &TheoremReport) {
    println!("{} -> {}", r.check, r.status);
    for m in &r.measurements {
        match m.se {
            Some(se) => println!("  {:<28} {:>10.4} +- {:.4}", m.quantity, m.value, se),
            None => println!("  {:<28} {:>10.4}", m.quantity, m.value),
        }
    }
}

fn main() -> shrinkframe::Result<()> {
    let mut spec = EnsembleSpec::stationary(32, 32, 100, 5);
    spec.amplitude = 40.0;
    let images = spec.generate()?;
    let w = RedundantTransform::new(2, 1, 1, 32, 32)?;
    let u = RedundantTransform::unitary(2, 32, 32)?;
    let bank = soft_threshold_bank(2, KnotGrid::new(300.0, 31)?, 20.0)?;

    print(&check_theorem1(&w, &images, &bank, 20.0, 5)?);
    print(&check_theorem2(&u, &w, &images, &bank, 20.0, 5)?);

    let fixture = nonstationary_fixture(32, 32, 100, 2, 5)?;
    println!("non-stationary control:");
    print(&check_theorem1(&w, &fixture, &bank, 20.0, 5)?);
    Ok(())
}

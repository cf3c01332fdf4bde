//! Build cycle-spinning DCT frames for every divisor stride and check that
//! each one is tight: analysis preserves energy and synthesis inverts it.

use shrinkframe::transform::realizable_redundancies;
use shrinkframe::{verify_tight_frame, Image, RedundantTransform};

fn main() -> shrinkframe::Result<()> {
    for window in [2, 4, 8] {
        for opt in realizable_redundancies(window) {
            let t = RedundantTransform::new(window, opt.stride_x, opt.stride_y, 32, 32)?;
            let report = verify_tight_frame(&t, 20, 1e-10, 1)?;
            println!(
                "w={window} strides {}x{} k={:>2}: max deviation {:.2e} {}",
                opt.stride_x,
                opt.stride_y,
                opt.redundancy,
                report.max_deviation(),
                if report.passed { "ok" } else { "FAILED" }
            );
        }
    }

    // The coefficients of one shift are a scaled unitary transform of the shifted image.
    let x = Image::from_fn(16, 16, |r, c| ((r * 5 + c * 3) % 11) as f64);
    let t = RedundantTransform::new(4, 2, 2, 16, 16)?;
    let u = RedundantTransform::unitary(4, 16, 16)?;
    let z = t.forward(&x)?;
    let (dx, dy) = t.shifts().offset(3);
    let zu = u.forward(&x.cyclic_shift(dx, dy))?;
    let scale = (t.redundancy() as f64).sqrt();
    let gap = z
        .offset_slice(5, 3)
        .iter()
        .zip(zu.band(5))
        .map(|(a, b)| (a * scale - b).abs())
        .fold(0.0, f64::max);
    println!("shift {dx},{dy} band 5 matches the unitary transform to {gap:.1e}");
    Ok(())
}

//! Piecewise-linear shrinkage functions on a uniform knot grid.

use shrinkframe::experiments::soft_threshold_bank;
use shrinkframe::{KnotGrid, PiecewiseLinearSf, RedundantTransform};

fn main() -> shrinkframe::Result<()> {
    let grid = KnotGrid::new(60.0, 7)?;
    println!("knots {:?}", grid.knots());

    // Hard-ish shrinkage: kill small values, keep large ones.
    let sf = PiecewiseLinearSf::new(grid, vec![-60.0, -40.0, 0.0, 0.0, 0.0, 40.0, 60.0])?;
    for t in [-90.0, -25.0, -5.0, 0.0, 12.0, 30.0, 90.0] {
        let w = grid.basis_weights(t);
        println!("psi({t:>6}) = {:>8.3}  weights {:?}", sf.evaluate(t), w.iter().collect::<Vec<_>>());
    }

    // A bank holds one function per DCT band; apply it to frame coefficients.
    let bank = soft_threshold_bank(4, KnotGrid::new(200.0, 21)?, 15.0)?;
    let t = RedundantTransform::new(4, 2, 2, 16, 16)?;
    let x = shrinkframe::Image::from_fn(16, 16, |r, c| if (r / 4 + c / 4) % 2 == 0 { 100.0 } else { 20.0 });
    let z = t.forward(&x)?;
    let shrunk = bank.apply(&z)?;
    let zeros = shrunk.as_slice().iter().filter(|v| **v == 0.0).count();
    println!("{} of {} coefficients set to zero", zeros, shrunk.len());
    Ok(())
}

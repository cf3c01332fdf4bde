//! Train shrinkage banks with the three objectives and compare them.

use shrinkframe::experiments::{noisy_pairs, EnsembleSpec};
use shrinkframe::training::{grids_for_pairs, objective_values, train, HalfRangeRule};
use shrinkframe::{Method, RedundantTransform, TrainOptions};

fn main() -> shrinkframe::Result<()> {
    let train_images = EnsembleSpec::natural(32, 32, 6, 1).generate()?;
    let test_images = EnsembleSpec::natural(32, 32, 6, 2).generate()?;
    let train_pairs = noisy_pairs(&train_images, 25.0, 1, "train")?;
    let test_pairs = noisy_pairs(&test_images, 25.0, 1, "test")?;

    for (name, t) in [
        ("unitary", RedundantTransform::unitary(4, 32, 32)?),
        ("k=16", RedundantTransform::with_redundancy(4, 16, 32, 32)?),
    ] {
        let grids = grids_for_pairs(&t, &train_pairs, 15, HalfRangeRule::default())?;
        println!("{name}");
        for method in Method::ALL {
            let trained = train(method, &t, &grids, &train_pairs, &TrainOptions::default())?;
            let o = trained.objectives;
            let held_out = objective_values(&t, &trained.bank, &test_pairs)?;
            println!(
                "  {method}: train d1 {:7.3} d2 {:7.3} d3 {:7.3} | test rmse {:7.3}",
                o.delta1, o.delta2, o.delta3, held_out.delta3
            );
        }
    }
    Ok(())
}

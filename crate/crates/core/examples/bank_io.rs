//! Save a trained bank as JSON and images as PGM, then read both back.

use shrinkframe::experiments::{natural_crops, noisy_pairs};
use shrinkframe::io::{decode_pgm, encode_pgm, BankFile};
use shrinkframe::training::{grids_for_pairs, train_method2, HalfRangeRule};
use shrinkframe::{RedundantTransform, TrainOptions};

fn main() -> shrinkframe::Result<()> {
    let images = natural_crops(32, 3, 8)?;
    let t = RedundantTransform::new(4, 2, 2, 32, 32)?;
    let pairs = noisy_pairs(&images, 15.0, 8, "io-example")?;
    let grids = grids_for_pairs(&t, &pairs, 9, HalfRangeRule::default())?;
    let trained = train_method2(&t, &grids, &pairs, &TrainOptions::default())?;

    let path = std::env::temp_dir().join("shrinkframe-bank.json");
    BankFile::from_trained(&trained, [2, 2])?.save(&path)?;
    let loaded = BankFile::load(&path)?;
    let bank = loaded.to_bank()?;
    let same = bank
        .flat_params()
        .iter()
        .zip(trained.bank.flat_params())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    println!("bank {} ({:?}) reloaded bit-exact: {same}", path.display(), loaded.method);

    let bytes = encode_pgm(&images[0]);
    let decoded = decode_pgm(&bytes)?;
    println!(
        "pgm {}x{} ({} bytes) round trip: {}",
        decoded.width(),
        decoded.height(),
        bytes.len(),
        encode_pgm(&decoded) == bytes
    );
    Ok(())
}

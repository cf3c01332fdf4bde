//! Denoise one synthetic image with a trained bank and save the result.

use shrinkframe::experiments::{natural_crops, noisy_pairs};
use shrinkframe::io::write_pgm;
use shrinkframe::training::{grids_for_pairs, train_method3, HalfRangeRule};
use shrinkframe::{add_gaussian_noise, denoise, psnr, NoiseSpec, RedundantTransform, TrainOptions};

fn main() -> shrinkframe::Result<()> {
    let sigma = 20.0;
    let crops = natural_crops(64, 5, 3)?;
    let (test, train) = crops.split_last().unwrap();

    let t = RedundantTransform::new(4, 1, 1, 64, 64)?;
    let pairs = noisy_pairs(train, sigma, 3, "denoise-example")?;
    let grids = grids_for_pairs(&t, &pairs, 15, HalfRangeRule::default())?;
    let bank = train_method3(&t, &grids, &pairs, &TrainOptions::default())?.bank;

    let noisy = add_gaussian_noise(test, NoiseSpec { sigma, seed: 99 })?;
    let clean = denoise(&noisy, &t, &bank)?;
    println!("noisy psnr    {:.2} dB", psnr(&noisy, test)?);
    println!("denoised psnr {:.2} dB", psnr(&clean, test)?);

    let dir = std::env::temp_dir().join("shrinkframe-denoise");
    std::fs::create_dir_all(&dir)?;
    write_pgm(test, dir.join("clean.pgm"))?;
    write_pgm(&noisy, dir.join("noisy.pgm"))?;
    write_pgm(&clean, dir.join("denoised.pgm"))?;
    println!("images written to {}", dir.display());
    Ok(())
}

//! End-to-end shrinkage denoising and error measurements.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, shape, Result};
use crate::image::Image;
use crate::rng::CounterRng;
use crate::shrinkage::SfBank;
use crate::transform::RedundantTransform;

/// Additive white Gaussian noise with standard deviation `sigma`
/// (intensity units), drawn from the counter stream keyed by `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

/// `y = x + n` with `n ~ N(0, sigma²)` i.i.d., row-major draw order.
pub fn add_gaussian_noise(x: &Image, spec: NoiseSpec) -> Result<Image> {
    if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) {
        return Err(invalid(format!("noise sigma must be >= 0, got {}", spec.sigma)));
    }
    if spec.sigma == 0.0 {
        return Ok(x.clone());
    }
    let mut rng = CounterRng::new(spec.seed);
    let data = x
        .samples()
        .iter()
        .map(|v| v + spec.sigma * rng.next_gaussian())
        .collect();
    Image::new(x.width(), x.height(), data)
}

fn check_bank(t: &RedundantTransform, bank: &SfBank) -> Result<()> {
    if bank.window() != t.window() {
        return Err(shape(format!(
            "bank built for window {}, transform uses window {}",
            bank.window(),
            t.window()
        )));
    }
    Ok(())
}

/// `x̂ = W^T ψ(W y)`.
pub fn denoise(y: &Image, t: &RedundantTransform, bank: &SfBank) -> Result<Image> {
    check_bank(t, bank)?;
    let z = t.forward(y)?;
    t.adjoint(&bank.apply(&z)?)
}

/// Error norms before and after shrinkage, each divided by `sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainErrors {
    /// `|y - x|`
    pub n_spatial: f64,
    /// `|W (y - x)|`
    pub n_transform: f64,
    /// `|W x - ψ(W y)|`
    pub post_transform: f64,
    /// `|W^T (W x - ψ(W y))|`
    pub post_spatial: f64,
}

pub fn domain_errors(x: &Image, y: &Image, t: &RedundantTransform, bank: &SfBank) -> Result<DomainErrors> {
    check_bank(t, bank)?;
    x.check_same_shape(y)?;
    let root_n = (x.len() as f64).sqrt();
    let noise = y.sub(x)?;
    let xw = t.forward(x)?;
    let yw = t.forward(y)?;
    let residual = xw.sub(&bank.apply(&yw)?)?;
    Ok(DomainErrors {
        n_spatial: noise.norm() / root_n,
        n_transform: t.forward(&noise)?.norm() / root_n,
        post_transform: residual.norm() / root_n,
        post_spatial: t.adjoint(&residual)?.norm() / root_n,
    })
}

/// Mean squared difference per sample.
pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    a.check_same_shape(b)?;
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}

pub fn rmse(a: &Image, b: &Image) -> Result<f64> {
    Ok(mse(a, b)?.sqrt())
}

/// Peak signal-to-noise ratio with peak 255. Identical images give `+inf`.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    let m = mse(a, b)?;
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / m).log10())
}

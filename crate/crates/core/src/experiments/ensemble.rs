//! Synthetic image ensembles.
//!
//! `spectral_stationary` fields are circularly stationary by construction:
//! an i.i.d. complex Gaussian spectrum shaped by `|f|^(-β/2)` is inverted
//! on the torus, so every cyclic shift has the same distribution.
//! `natural_images` is a periodic dead-leaves model (occluding disks and
//! rectangles with optional oriented texture), used where real photographs
//! would be.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::image::Image;
use crate::rng::{substream, CounterRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    SpectralStationary,
    NaturalImages,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub width: usize,
    pub height: usize,
    pub count: usize,
    #[serde(default = "default_exponent")]
    pub spectral_exponent: f64,
    /// Standard deviation of each stationary field.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    pub seed: u64,
}

fn default_exponent() -> f64 {
    2.0
}

fn default_amplitude() -> f64 {
    1.0
}

impl EnsembleSpec {
    pub fn stationary(width: usize, height: usize, count: usize, seed: u64) -> Self {
        Self {
            kind: EnsembleKind::SpectralStationary,
            width,
            height,
            count,
            spectral_exponent: default_exponent(),
            amplitude: default_amplitude(),
            seed,
        }
    }

    pub fn natural(width: usize, height: usize, count: usize, seed: u64) -> Self {
        Self {
            kind: EnsembleKind::NaturalImages,
            ..Self::stationary(width, height, count, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(invalid(format!("ensemble dims {}x{} must be positive", self.width, self.height)));
        }
        if self.count == 0 {
            return Err(invalid("ensemble count must be at least 1"));
        }
        if !(self.spectral_exponent.is_finite() && self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(invalid("ensemble exponent and amplitude must be finite, amplitude >= 0"));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Vec<Image>> {
        match self.kind {
            EnsembleKind::SpectralStationary => gen_stationary_ensemble(self),
            EnsembleKind::NaturalImages => {
                self.validate()?;
                Ok((0..self.count)
                    .map(|i| {
                        let mut rng = CounterRng::from_tag(self.seed, "natural-image", i as u64);
                        natural_image(self.width, self.height, &mut rng)
                    })
                    .collect())
            }
        }
    }
}

/// Circularly stationary Gaussian fields, zero mean, each scaled to sample
/// standard deviation `amplitude`. The `kind` field is ignored.
pub fn gen_stationary_ensemble(spec: &EnsembleSpec) -> Result<Vec<Image>> {
    spec.validate()?;
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_inverse(spec.width);
    let col_fft = planner.plan_fft_inverse(spec.height);
    let (w, h) = (spec.width, spec.height);
    let filter: Vec<f64> = (0..h * w)
        .map(|i| {
            let f = |k: usize, n: usize| {
                let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                k / n as f64
            };
            let (fy, fx) = (f(i / w, h), f(i % w, w));
            let r = (fx * fx + fy * fy).sqrt();
            if r == 0.0 {
                0.0
            } else {
                r.powf(-spec.spectral_exponent / 2.0)
            }
        })
        .collect();

    let mut out = Vec::with_capacity(spec.count);
    let mut column = vec![Complex::new(0.0, 0.0); h];
    for i in 0..spec.count {
        let mut rng = CounterRng::new(substream(spec.seed, "stationary-field", i as u64));
        let mut buf: Vec<Complex<f64>> = filter
            .iter()
            .map(|&a| Complex::new(a * rng.next_gaussian(), a * rng.next_gaussian()))
            .collect();
        for row in buf.chunks_exact_mut(w) {
            row_fft.process(row);
        }
        for c in 0..w {
            for r in 0..h {
                column[r] = buf[r * w + c];
            }
            col_fft.process(&mut column);
            for r in 0..h {
                buf[r * w + c] = column[r];
            }
        }
        let mut data: Vec<f64> = buf.iter().map(|z| z.re).collect();
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let sd = (data.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        let gain = if sd > 0.0 { spec.amplitude / sd } else { 0.0 };
        data.iter_mut().for_each(|v| *v = (*v - mean) * gain);
        out.push(Image::new(w, h, data)?);
    }
    Ok(out)
}

/// Periodic dead-leaves image with intensities roughly in `[0, 255]`.
pub fn natural_image(width: usize, height: usize, rng: &mut CounterRng) -> Image {
    let mut img = Image::filled(width, height, 64.0 + 128.0 * rng.next_f64());
    let r_min: f64 = 1.0;
    let r_max = (width.min(height) as f64 / 4.0).max(2.0);
    let leaves = (width * height / 12).max(8);
    let wrap = |d: f64, n: usize| {
        let n = n as f64;
        let d = d.rem_euclid(n);
        d.min(n - d)
    };
    for _ in 0..leaves {
        let u = rng.next_f64();
        let r = (r_min.powi(-2) - u * (r_min.powi(-2) - r_max.powi(-2))).powf(-0.5);
        let cx = rng.next_f64() * width as f64;
        let cy = rng.next_f64() * height as f64;
        let level = 16.0 + 224.0 * rng.next_f64();
        let disk = rng.next_f64() < 0.6;
        let aspect = 0.5 + rng.next_f64();
        let textured = rng.next_f64() < 0.4;
        let (amp, freq, theta) = (
            25.0 * rng.next_f64(),
            0.3 + 1.2 * rng.next_f64(),
            std::f64::consts::PI * rng.next_f64(),
        );
        let (ct, st) = (theta.cos(), theta.sin());
        for row in 0..height {
            let dy = wrap(row as f64 + 0.5 - cy, height);
            if dy > r * aspect.max(1.0) {
                continue;
            }
            for col in 0..width {
                let dx = wrap(col as f64 + 0.5 - cx, width);
                let inside = if disk {
                    dx * dx + dy * dy <= r * r
                } else {
                    dx <= r && dy <= r * aspect
                };
                if inside {
                    let mut v = level;
                    if textured {
                        v += amp * (freq * (col as f64 * ct + row as f64 * st)).sin();
                    }
                    img.set(row, col, v);
                }
            }
        }
    }
    img
}

/// `count` non-overlapping `size x size` crops of one large periodic scene.
pub fn natural_crops(size: usize, count: usize, seed: u64) -> Result<Vec<Image>> {
    if size == 0 || count == 0 {
        return Err(invalid("crop size and count must be positive"));
    }
    let cols = (count as f64).sqrt().ceil() as usize;
    let rows = count.div_ceil(cols);
    let mut rng = CounterRng::from_tag(seed, "natural-scene", 0);
    let scene = natural_image(cols * size, rows * size, &mut rng);
    (0..count)
        .map(|i| scene.crop((i / cols) * size, (i % cols) * size, size, size))
        .collect()
}

/// Half black, half bright squares on a lattice of period `2 * cell`
/// aligned with the origin. Distribution is not shift invariant.
pub fn nonstationary_fixture(width: usize, height: usize, count: usize, cell: usize, seed: u64) -> Result<Vec<Image>> {
    if width == 0 || height == 0 || count == 0 || cell == 0 {
        return Err(invalid("fixture dims, count and cell must be positive"));
    }
    Ok((0..count)
        .map(|i| {
            let mut rng = CounterRng::from_tag(seed, "nonstationary-fixture", i as u64);
            let level = 120.0 + 120.0 * rng.next_f64();
            Image::from_fn(width, height, |r, c| {
                let on = c >= width / 2 && (r / cell) % 2 == 0 && (c / cell) % 2 == 0;
                if on {
                    level
                } else {
                    0.0
                }
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_fields_are_normalized() {
        let mut spec = EnsembleSpec::stationary(16, 8, 5, 3);
        spec.amplitude = 2.5;
        for img in gen_stationary_ensemble(&spec).unwrap() {
            assert!(img.mean().abs() < 1e-12);
            let var = img.norm_squared() / img.len() as f64;
            assert!((var.sqrt() - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = EnsembleSpec::natural(24, 24, 3, 11);
        assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
        let spec = EnsembleSpec::stationary(8, 8, 2, 1);
        assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
    }

    #[test]
    fn rejects_empty_specs() {
        assert!(gen_stationary_ensemble(&EnsembleSpec::stationary(0, 8, 1, 0)).is_err());
        assert!(gen_stationary_ensemble(&EnsembleSpec::stationary(8, 8, 0, 0)).is_err());
    }

    #[test]
    fn natural_images_have_structure() {
        let crops = natural_crops(32, 6, 5).unwrap();
        assert_eq!(crops.len(), 6);
        for c in &crops {
            let m = c.mean();
            let sd = (c.samples().iter().map(|v| (v - m).powi(2)).sum::<f64>() / c.len() as f64).sqrt();
            assert!(sd > 5.0, "flat crop, sd {sd}");
            assert!(c.samples().iter().all(|v| (-30.0..=290.0).contains(v)));
        }
    }

    #[test]
    fn fixture_left_half_is_black() {
        let f = nonstationary_fixture(8, 8, 2, 2, 0).unwrap();
        for img in &f {
            assert!((0..8).all(|r| (0..4).all(|c| img.get(r, c) == 0.0)));
            assert!(img.get(0, 4) > 0.0 && img.get(1, 5) > 0.0);
            assert!(img.get(0, 6) == 0.0 && img.get(2, 4) == 0.0);
        }
    }
}

//! Real-valued grayscale images.

use crate::error::{invalid, shape, Result};

/// A 2-D real-valued signal stored row-major.
///
/// Samples are unconstrained reals; the nominal intensity range is `[0, 255]`
/// but nothing clips to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width * height != data.len() {
            return Err(shape(format!(
                "{}x{} image needs {} samples, got {}",
                width,
                height,
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.data
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.width + col] = value;
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_same_shape(&self, other: &Image) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(shape(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// `self - other`, sample by sample.
    pub fn sub(&self, other: &Image) -> Result<Image> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Image { data, ..*self })
    }

    pub fn add(&self, other: &Image) -> Result<Image> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Image { data, ..*self })
    }

    pub fn scaled(&self, factor: f64) -> Image {
        Image {
            data: self.data.iter().map(|v| v * factor).collect(),
            ..*self
        }
    }

    /// Cyclic shift: `out(r, c) = self((r + dy) mod h, (c + dx) mod w)`.
    pub fn cyclic_shift(&self, dx: usize, dy: usize) -> Image {
        let (w, h) = (self.width, self.height);
        Image::from_fn(w, h, |r, c| self.get((r + dy) % h, (c + dx) % w))
    }

    /// Rectangular crop with its top-left corner at `(row, col)`.
    pub fn crop(&self, row: usize, col: usize, width: usize, height: usize) -> Result<Image> {
        if row + height > self.height || col + width > self.width {
            return Err(invalid(format!(
                "crop {}x{} at ({}, {}) exceeds {}x{} image",
                width, height, row, col, self.width, self.height
            )));
        }
        Ok(Image::from_fn(width, height, |r, c| self.get(row + r, col + c)))
    }
}

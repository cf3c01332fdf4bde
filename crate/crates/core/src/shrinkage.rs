//! Piecewise-linear shrinkage functions.
//!
//! A shrinkage function is stored by its values at `m` uniformly spaced knots
//! on `[-T, T]`. Between knots it interpolates linearly; outside the range it
//! continues the boundary segment. Every evaluation is therefore a fixed
//! linear combination of at most two parameters, which is what makes
//! least-squares training a linear problem.

use crate::error::{invalid, shape, Result};
use crate::transform::{BandId, BandStack, DctBasis};

/// Uniform knots on `[-half_range, half_range]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotGrid {
    half_range: f64,
    knot_count: usize,
}

impl KnotGrid {
    pub fn new(half_range: f64, knot_count: usize) -> Result<Self> {
        if !(half_range.is_finite() && half_range > 0.0) {
            return Err(invalid(format!("knot half range must be positive, got {half_range}")));
        }
        if knot_count < 2 {
            return Err(invalid(format!("need at least 2 knots, got {knot_count}")));
        }
        Ok(Self {
            half_range,
            knot_count,
        })
    }

    pub fn half_range(&self) -> f64 {
        self.half_range
    }

    pub fn knot_count(&self) -> usize {
        self.knot_count
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_range / (self.knot_count - 1) as f64
    }

    /// Knot `j`. Mirrored knots are exact negatives of each other and the
    /// middle knot of an odd grid is exactly zero.
    pub fn knot(&self, j: usize) -> f64 {
        let last = self.knot_count - 1;
        let h = self.spacing();
        if 2 * j == last {
            0.0
        } else if 2 * j < last {
            -self.half_range + j as f64 * h
        } else {
            self.half_range - (last - j) as f64 * h
        }
    }

    pub fn knots(&self) -> Vec<f64> {
        (0..self.knot_count).map(|j| self.knot(j)).collect()
    }

    /// Active hat-basis functions at `t`.
    pub fn basis_weights(&self, t: f64) -> HatWeights {
        let m = self.knot_count;
        let u = (t + self.half_range) / self.spacing();
        let seg = if u.is_nan() || u <= 0.0 {
            0
        } else {
            (u.floor() as usize).min(m - 2)
        };
        let lo = self.knot(seg);
        let hi = self.knot(seg + 1);
        if t == lo {
            return HatWeights::single(seg);
        }
        if t == hi {
            return HatWeights::single(seg + 1);
        }
        let f = (t - lo) / (hi - lo);
        HatWeights {
            index: [seg, seg + 1],
            weight: [1.0 - f, f],
            active: 2,
        }
    }
}

/// At most two `(knot index, weight)` entries; inside the knot range the
/// weights are convex, outside they extend the boundary segment affinely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatWeights {
    index: [usize; 2],
    weight: [f64; 2],
    active: usize,
}

impl HatWeights {
    fn single(j: usize) -> Self {
        Self {
            index: [j, j],
            weight: [1.0, 0.0],
            active: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.active
    }

    pub fn is_empty(&self) -> bool {
        self.active == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.index
            .iter()
            .copied()
            .zip(self.weight.iter().copied())
            .take(self.active)
    }

    pub fn dot(&self, params: &[f64]) -> f64 {
        self.iter().map(|(j, w)| w * params[j]).sum()
    }
}

/// `ψ(t) = Σ_j p_j φ_j(t)` with hat functions `φ_j` on a [`KnotGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearSf {
    grid: KnotGrid,
    params: Vec<f64>,
}

impl PiecewiseLinearSf {
    pub fn new(grid: KnotGrid, params: Vec<f64>) -> Result<Self> {
        if params.len() != grid.knot_count() {
            return Err(shape(format!(
                "{} parameters for {} knots",
                params.len(),
                grid.knot_count()
            )));
        }
        Ok(Self { grid, params })
    }

    pub fn identity(grid: KnotGrid) -> Self {
        Self {
            params: grid.knots(),
            grid,
        }
    }

    pub fn zero(grid: KnotGrid) -> Self {
        Self {
            params: vec![0.0; grid.knot_count()],
            grid,
        }
    }

    pub fn grid(&self) -> &KnotGrid {
        &self.grid
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.grid.basis_weights(t).dot(&self.params)
    }

    /// Largest absolute segment slope (the Lipschitz constant).
    pub fn max_slope(&self) -> f64 {
        let h = self.grid.spacing();
        self.params
            .windows(2)
            .map(|p| ((p[1] - p[0]) / h).abs())
            .fold(0.0, f64::max)
    }

    /// `t -> ψ(c t) / c`, expressed on a grid scaled by `1/c`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        let grid = KnotGrid::new(self.grid.half_range() / c, self.grid.knot_count())?;
        Ok(Self {
            grid,
            params: self.params.iter().map(|p| p / c).collect(),
        })
    }
}

pub fn evaluate(sf: &PiecewiseLinearSf, t: f64) -> f64 {
    sf.evaluate(t)
}

/// One shrinkage function per DCT band of a `w x w` window.
#[derive(Debug, Clone, PartialEq)]
pub struct SfBank {
    window: usize,
    sfs: Vec<PiecewiseLinearSf>,
}

impl SfBank {
    pub fn new(window: usize, sfs: Vec<PiecewiseLinearSf>) -> Result<Self> {
        if window == 0 || sfs.len() != window * window {
            return Err(shape(format!(
                "a {window}x{window} window has {} bands, bank has {}",
                window * window,
                sfs.len()
            )));
        }
        Ok(Self { window, sfs })
    }

    /// Identity bank with one grid per band.
    pub fn identity(window: usize, grids: &[KnotGrid]) -> Result<Self> {
        Self::new(window, grids.iter().map(|g| PiecewiseLinearSf::identity(*g)).collect())
    }

    pub fn zero(window: usize, grids: &[KnotGrid]) -> Result<Self> {
        Self::new(window, grids.iter().map(|g| PiecewiseLinearSf::zero(*g)).collect())
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn band_count(&self) -> usize {
        self.sfs.len()
    }

    pub fn sf(&self, band: usize) -> &PiecewiseLinearSf {
        &self.sfs[band]
    }

    pub fn sfs(&self) -> &[PiecewiseLinearSf] {
        &self.sfs
    }

    pub fn grids(&self) -> Vec<KnotGrid> {
        self.sfs.iter().map(|s| *s.grid()).collect()
    }

    pub fn band_ids(&self) -> Vec<BandId> {
        (0..self.band_count())
            .map(|k| BandId {
                fx: k % self.window,
                fy: k / self.window,
            })
            .collect()
    }

    /// All parameters concatenated band by band.
    pub fn flat_params(&self) -> Vec<f64> {
        self.sfs.iter().flat_map(|s| s.params.iter().copied()).collect()
    }

    /// Same grids, new parameters (concatenated band by band).
    pub fn with_flat_params(&self, flat: &[f64]) -> Result<Self> {
        let total: usize = self.sfs.iter().map(|s| s.params.len()).sum();
        if flat.len() != total {
            return Err(shape(format!("{} parameters for a bank of {total}", flat.len())));
        }
        let mut off = 0;
        let sfs = self
            .sfs
            .iter()
            .map(|s| {
                let m = s.params.len();
                let p = flat[off..off + m].to_vec();
                off += m;
                PiecewiseLinearSf { grid: s.grid, params: p }
            })
            .collect();
        Ok(Self {
            window: self.window,
            sfs,
        })
    }

    /// Bank acting on coefficients scaled by `1/c`: `ψ'_k(t) = ψ_k(c t) / c`.
    ///
    /// With `c = sqrt(k)` this turns a bank designed for the unitary block
    /// transform into the bank that reproduces cycle spinning inside the
    /// redundant frame.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        let sfs = self.sfs.iter().map(|s| s.rescaled(c)).collect::<Result<_>>()?;
        Ok(Self {
            window: self.window,
            sfs,
        })
    }

    pub fn apply(&self, z: &BandStack) -> Result<BandStack> {
        if z.band_count() != self.band_count() {
            return Err(shape(format!(
                "bank has {} shrinkage functions, stack has {} bands",
                self.band_count(),
                z.band_count()
            )));
        }
        let mut out = z.clone();
        for (k, sf) in self.sfs.iter().enumerate() {
            for v in out.band_mut(k) {
                *v = sf.evaluate(*v);
            }
        }
        Ok(out)
    }
}

pub fn apply_bank(bank: &SfBank, z: &BandStack) -> Result<BandStack> {
    bank.apply(z)
}

/// Identity bank sharing one grid across `band_count` bands.
pub fn identity_bank(grid: &KnotGrid, band_count: usize) -> Result<SfBank> {
    let window = (band_count as f64).sqrt().round() as usize;
    if band_count == 0 || window * window != band_count {
        return Err(invalid(format!("{band_count} is not the band count of a square window")));
    }
    SfBank::identity(window, &vec![*grid; band_count])
}

/// Band ids in band order for a window.
pub fn band_index(window: usize) -> Result<Vec<BandId>> {
    Ok(DctBasis::new(window)?.band_ids())
}

//! Design matrices that make shrinkage training linear in the parameters.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{shape, Result};
use crate::shrinkage::{HatWeights, KnotGrid};
use crate::transform::{BandStack, RedundantTransform};

use super::TrainingPair;

/// Sparse transform-domain design `A_k` of one band: row `i` holds the hat
/// weights of the noisy coefficient `y_k[i]`, so `ψ_k(y_k) = A_k p_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDesign {
    knot_count: usize,
    rows: Vec<HatWeights>,
}

impl BandDesign {
    pub fn new(grid: &KnotGrid, coefficients: &[f64]) -> Self {
        Self {
            knot_count: grid.knot_count(),
            rows: coefficients.iter().map(|&c| grid.basis_weights(c)).collect(),
        }
    }

    pub fn knot_count(&self) -> usize {
        self.knot_count
    }

    pub fn rows(&self) -> &[HatWeights] {
        &self.rows
    }

    /// `A_k p`.
    pub fn apply(&self, params: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.dot(params)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.rows.len(), self.knot_count);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, w) in row.iter() {
                a[(i, j)] += w;
            }
        }
        a
    }

    /// `gram += A^T A`, `rhs += A^T target`.
    pub(crate) fn accumulate(&self, target: &[f64], gram: &mut DMatrix<f64>, rhs: &mut DVector<f64>) {
        for (row, &b) in self.rows.iter().zip(target) {
            for (i, wi) in row.iter() {
                rhs[i] += wi * b;
                for (j, wj) in row.iter() {
                    gram[(i, j)] += wi * wj;
                }
            }
        }
    }
}

/// Per-band designs `A_k` for the noisy image of `pair`.
pub fn assemble_design(t: &RedundantTransform, grids: &[KnotGrid], pair: &TrainingPair) -> Result<Vec<BandDesign>> {
    check_grids(t, grids)?;
    let yw = t.forward(&pair.noisy)?;
    Ok(designs_from_stack(grids, &yw))
}

pub(crate) fn designs_from_stack(grids: &[KnotGrid], yw: &BandStack) -> Vec<BandDesign> {
    grids
        .iter()
        .enumerate()
        .map(|(k, g)| BandDesign::new(g, yw.band(k)))
        .collect()
}

pub(crate) fn check_grids(t: &RedundantTransform, grids: &[KnotGrid]) -> Result<()> {
    if grids.len() != t.band_count() {
        return Err(shape(format!(
            "{} knot grids for {} bands",
            grids.len(),
            t.band_count()
        )));
    }
    Ok(())
}

/// Write the spatial design `G_k = B_k^T A_k` of one band into `out`, an
/// `n x m` column-major block (column `j` is `B_k^T` of column `j` of `A_k`).
pub(crate) fn spatial_columns(t: &RedundantTransform, band: usize, design: &BandDesign, out: &mut [f64]) {
    let n = t.pixel_count();
    debug_assert_eq!(out.len(), n * design.knot_count());
    out.fill(0.0);
    let kernel = t.basis().kernel(band);
    for (pos, row) in design.rows().iter().enumerate() {
        for (j, w) in row.iter() {
            t.scatter_atom(&mut out[j * n..(j + 1) * n], &kernel, pos, t.scale() * w);
        }
    }
}

/// Dense `G_k` as an `n x m` matrix.
pub fn spatial_design(t: &RedundantTransform, band: usize, design: &BandDesign) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(t.pixel_count(), design.knot_count());
    spatial_columns(t, band, design, g.as_mut_slice());
    g
}

/// How the knot range of each band is chosen from training data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfRangeRule {
    /// `T = factor * sqrt(mean(y_k²))` over all training coefficients of the band.
    RmsMultiple(f64),
    /// Same `T` for every band.
    Fixed(f64),
}

impl Default for HalfRangeRule {
    fn default() -> Self {
        HalfRangeRule::RmsMultiple(3.0)
    }
}

/// Knot grids for every band from the noisy training coefficients.
pub fn grids_for_pairs(
    t: &RedundantTransform,
    pairs: &[TrainingPair],
    knot_count: usize,
    rule: HalfRangeRule,
) -> Result<Vec<KnotGrid>> {
    let band_count = t.band_count();
    match rule {
        HalfRangeRule::Fixed(half) => (0..band_count).map(|_| KnotGrid::new(half, knot_count)).collect(),
        HalfRangeRule::RmsMultiple(factor) => {
            let mut sums = vec![0.0; band_count];
            let mut count = 0usize;
            for p in pairs {
                let yw = t.forward(&p.noisy)?;
                for (k, s) in sums.iter_mut().enumerate() {
                    *s += yw.band(k).iter().map(|v| v * v).sum::<f64>();
                }
                count += t.band_len();
            }
            sums.iter()
                .map(|s| {
                    let rms = if count > 0 { (s / count as f64).sqrt() } else { 0.0 };
                    let half = factor * rms;
                    KnotGrid::new(if half > 0.0 { half } else { 1.0 }, knot_count)
                })
                .collect()
        }
    }
}

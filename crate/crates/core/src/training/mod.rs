//! Closed-form least-squares training of shrinkage banks.
//!
//! Three objectives are supported, all estimated with the sample mean over
//! training pairs and normalized per pixel:
//!
//! * [`Method::TransformIndependent`] minimizes `Δ₁ = Σ_k sqrt(E|x_k - ψ_k(y_k)|²)`,
//!   one band at a time in the transform domain.
//! * [`Method::SpatialIndependent`] minimizes `Δ₂ = Σ_k sqrt(E|B_k^T (x_k - ψ_k(y_k))|²)`,
//!   still band by band but measured after synthesis.
//! * [`Method::SpatialJoint`] minimizes `Δ₃ = sqrt(E|x - Σ_k B_k^T ψ_k(y_k)|²)`,
//!   the actual reconstruction error, over all bands jointly.
//!
//! Each shrinkage function is linear in its knot values, so every method
//! reduces to ridge-regularized normal equations.

mod design;
mod solve;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::image::Image;
use crate::shrinkage::{KnotGrid, PiecewiseLinearSf, SfBank};
use crate::transform::RedundantTransform;

pub use design::{assemble_design, grids_for_pairs, spatial_design, BandDesign, HalfRangeRule};
pub use solve::{NormalSystem, Ridge, Solution, SolverOptions, DEFAULT_RELATIVE_RIDGE};

use design::{check_grids, designs_from_stack, spatial_columns};

/// A clean image and a noisy observation of it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPair {
    pub clean: Image,
    pub noisy: Image,
}

impl TrainingPair {
    pub fn new(clean: Image, noisy: Image) -> Result<Self> {
        clean.check_same_shape(&noisy)?;
        Ok(Self { clean, noisy })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Method {
    /// Transform domain, independent bands.
    TransformIndependent,
    /// Spatial domain, independent bands.
    SpatialIndependent,
    /// Spatial domain, joint bands.
    SpatialJoint,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::TransformIndependent,
        Method::SpatialIndependent,
        Method::SpatialJoint,
    ];

    pub fn number(self) -> u8 {
        match self {
            Method::TransformIndependent => 1,
            Method::SpatialIndependent => 2,
            Method::SpatialJoint => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Method::TransformIndependent),
            2 => Ok(Method::SpatialIndependent),
            3 => Ok(Method::SpatialJoint),
            _ => Err(invalid(format!("method must be 1, 2 or 3, got {n}"))),
        }
    }
}

impl From<Method> for u8 {
    fn from(m: Method) -> u8 {
        m.number()
    }
}

impl TryFrom<u8> for Method {
    type Error = String;
    fn try_from(n: u8) -> std::result::Result<Self, String> {
        Method::from_number(n).map_err(|e| e.to_string())
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrainOptions {
    pub ridge: Ridge,
    /// Tie `p_{-j} = -p_j` (and the middle knot to zero).
    pub odd_symmetry: bool,
    pub solver: SolverOptions,
}

/// `(Δ₁, Δ₂, Δ₃)` on some set of pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl Objectives {
    pub fn get(&self, method: Method) -> f64 {
        match method {
            Method::TransformIndependent => self.delta1,
            Method::SpatialIndependent => self.delta2,
            Method::SpatialJoint => self.delta3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedBank {
    pub bank: SfBank,
    pub method: Method,
    /// Ridge used for each band.
    pub lambda: Vec<f64>,
    pub ridge_retried: bool,
    /// Per-band mean squared residual of the trained method's objective
    /// (transform-domain for method 1, spatial otherwise), per pixel.
    pub band_residuals: Vec<f64>,
    /// All three objectives on the training pairs.
    pub objectives: Objectives,
}

/// Squared-error terms of one pair, each divided by the pixel count.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTerms {
    /// `|d_k|² / n`
    pub transform: Vec<f64>,
    /// `|B_k^T d_k|² / n`
    pub spatial: Vec<f64>,
    /// `|Σ_k B_k^T d_k|² / n`
    pub joint: f64,
}

impl PairTerms {
    /// Objectives of this pair alone.
    pub fn objectives(&self) -> Objectives {
        aggregate(std::slice::from_ref(self))
    }
}

pub fn pair_terms(t: &RedundantTransform, bank: &SfBank, pair: &TrainingPair) -> Result<PairTerms> {
    let n = t.pixel_count() as f64;
    let xw = t.forward(&pair.clean)?;
    let yt = bank.apply(&t.forward(&pair.noisy)?)?;
    let d = xw.sub(&yt)?;
    let mut transform = Vec::with_capacity(t.band_count());
    let mut spatial = Vec::with_capacity(t.band_count());
    let mut joint = Image::zeros(t.width(), t.height());
    for k in 0..t.band_count() {
        let dk = d.band(k);
        transform.push(dk.iter().map(|v| v * v).sum::<f64>() / n);
        let ds = t.band_adjoint(k, dk)?;
        spatial.push(ds.norm_squared() / n);
        for (a, b) in joint.samples_mut().iter_mut().zip(ds.samples()) {
            *a += b;
        }
    }
    Ok(PairTerms {
        transform,
        spatial,
        joint: joint.norm_squared() / n,
    })
}

fn aggregate(terms: &[PairTerms]) -> Objectives {
    let count = terms.len() as f64;
    let bands = terms[0].transform.len();
    let band_mean = |k: usize, f: &dyn Fn(&PairTerms) -> &Vec<f64>| terms.iter().map(|p| f(p)[k]).sum::<f64>() / count;
    Objectives {
        delta1: (0..bands).map(|k| band_mean(k, &|p| &p.transform).sqrt()).sum(),
        delta2: (0..bands).map(|k| band_mean(k, &|p| &p.spatial).sqrt()).sum(),
        delta3: (terms.iter().map(|p| p.joint).sum::<f64>() / count).sqrt(),
    }
}

/// Empirical `(Δ₁, Δ₂, Δ₃)` of `bank` over `pairs`.
pub fn objective_values(t: &RedundantTransform, bank: &SfBank, pairs: &[TrainingPair]) -> Result<Objectives> {
    if pairs.is_empty() {
        return Err(invalid("objective values need at least one pair"));
    }
    let terms = pairs.iter().map(|p| pair_terms(t, bank, p)).collect::<Result<Vec<_>>>()?;
    Ok(aggregate(&terms))
}

/// Parameter map `p = M q` enforcing odd symmetry.
fn odd_map(m: usize) -> DMatrix<f64> {
    let free = m / 2;
    let mut map = DMatrix::zeros(m, free);
    for i in 0..free {
        map[(m - 1 - i, i)] = 1.0;
        map[(i, i)] = -1.0;
    }
    map
}

fn check_inputs(t: &RedundantTransform, grids: &[KnotGrid], pairs: &[TrainingPair]) -> Result<usize> {
    check_grids(t, grids)?;
    if pairs.is_empty() {
        return Err(invalid("training needs at least one pair"));
    }
    let m = grids[0].knot_count();
    if grids.iter().any(|g| g.knot_count() != m) {
        return Err(invalid("all bands must use the same knot count"));
    }
    for p in pairs {
        p.clean.check_same_shape(&p.noisy)?;
        t.check_image(&p.clean)?;
    }
    Ok(m)
}

/// Solve a system built in full knot coordinates, reducing to the symmetric
/// parameterization when requested.
fn solve_system(mut sys: NormalSystem, m: usize, opts: &TrainOptions) -> Result<Solution> {
    sys.symmetrize();
    if !opts.odd_symmetry {
        return sys.solve(opts.ridge, &opts.solver);
    }
    let blocks = sys.blocks();
    let local = odd_map(m);
    let free = local.ncols();
    let mut map = DMatrix::zeros(blocks * m, blocks * free);
    for b in 0..blocks {
        map.view_mut((b * m, b * free), (m, free)).copy_from(&local);
    }
    let reduced = NormalSystem {
        gram: map.tr_mul(&sys.gram) * &map,
        rhs: map.tr_mul(&sys.rhs),
        block: free,
    };
    let sol = reduced.solve(opts.ridge, &opts.solver)?;
    Ok(Solution {
        params: &map * &sol.params,
        ..sol
    })
}

fn finish(
    t: &RedundantTransform,
    grids: &[KnotGrid],
    pairs: &[TrainingPair],
    method: Method,
    per_band: Vec<(DVector<f64>, Vec<f64>, bool)>,
) -> Result<TrainedBank> {
    let mut lambda = Vec::with_capacity(grids.len());
    let mut retried = false;
    let mut sfs = Vec::with_capacity(grids.len());
    for (g, (p, l, r)) in grids.iter().zip(per_band) {
        sfs.push(PiecewiseLinearSf::new(*g, p.iter().copied().collect())?);
        lambda.extend(l);
        retried |= r;
    }
    let bank = SfBank::new(t.window(), sfs)?;
    let terms = pairs.iter().map(|p| pair_terms(t, &bank, p)).collect::<Result<Vec<_>>>()?;
    let objectives = aggregate(&terms);
    let count = terms.len() as f64;
    let band_residuals = (0..t.band_count())
        .map(|k| {
            terms
                .iter()
                .map(|p| match method {
                    Method::TransformIndependent => p.transform[k],
                    _ => p.spatial[k],
                })
                .sum::<f64>()
                / count
        })
        .collect();
    Ok(TrainedBank {
        bank,
        method,
        lambda,
        ridge_retried: retried,
        band_residuals,
        objectives,
    })
}

/// Method 1: per band, `min_p Σ |x_k - A_k p|² + λ|p|²`.
pub fn train_method1(
    t: &RedundantTransform,
    grids: &[KnotGrid],
    pairs: &[TrainingPair],
    opts: &TrainOptions,
) -> Result<TrainedBank> {
    let m = check_inputs(t, grids, pairs)?;
    let mut systems: Vec<NormalSystem> = (0..t.band_count()).map(|_| NormalSystem::zeros(m, m)).collect();
    for p in pairs {
        let xw = t.forward(&p.clean)?;
        let yw = t.forward(&p.noisy)?;
        for (k, (design, sys)) in designs_from_stack(grids, &yw).iter().zip(&mut systems).enumerate() {
            design.accumulate(xw.band(k), &mut sys.gram, &mut sys.rhs);
        }
    }
    let per_band = systems
        .into_iter()
        .map(|s| solve_system(s, m, opts).map(|sol| (sol.params, sol.lambda, sol.ridge_retried)))
        .collect::<Result<Vec<_>>>()?;
    finish(t, grids, pairs, Method::TransformIndependent, per_band)
}

/// Method 2: per band, `min_p Σ |B_k^T x_k - G_k p|² + λ|p|²` with `G_k = B_k^T A_k`.
pub fn train_method2(
    t: &RedundantTransform,
    grids: &[KnotGrid],
    pairs: &[TrainingPair],
    opts: &TrainOptions,
) -> Result<TrainedBank> {
    let m = check_inputs(t, grids, pairs)?;
    let n = t.pixel_count();
    let mut systems: Vec<NormalSystem> = (0..t.band_count()).map(|_| NormalSystem::zeros(m, m)).collect();
    let mut g = DMatrix::zeros(n, m);
    for p in pairs {
        let xw = t.forward(&p.clean)?;
        let yw = t.forward(&p.noisy)?;
        for (k, (design, sys)) in designs_from_stack(grids, &yw).iter().zip(&mut systems).enumerate() {
            spatial_columns(t, k, design, g.as_mut_slice());
            let target = DVector::from_vec(t.band_adjoint(k, xw.band(k))?.into_samples());
            sys.gram += g.tr_mul(&g);
            sys.rhs += g.tr_mul(&target);
        }
    }
    let per_band = systems
        .into_iter()
        .map(|s| solve_system(s, m, opts).map(|sol| (sol.params, sol.lambda, sol.ridge_retried)))
        .collect::<Result<Vec<_>>>()?;
    finish(t, grids, pairs, Method::SpatialIndependent, per_band)
}

/// Method 3: jointly, `min Σ |x - Σ_k G_k p_k|² + Σ_k λ_k |p_k|²`.
pub fn train_method3(
    t: &RedundantTransform,
    grids: &[KnotGrid],
    pairs: &[TrainingPair],
    opts: &TrainOptions,
) -> Result<TrainedBank> {
    let m = check_inputs(t, grids, pairs)?;
    let n = t.pixel_count();
    let bands = t.band_count();
    let mut sys = NormalSystem::zeros(bands * m, m);
    let mut g = DMatrix::zeros(n, bands * m);
    for p in pairs {
        let yw = t.forward(&p.noisy)?;
        for (k, design) in designs_from_stack(grids, &yw).iter().enumerate() {
            spatial_columns(t, k, design, &mut g.as_mut_slice()[k * m * n..(k + 1) * m * n]);
        }
        let target = DVector::from_column_slice(p.clean.samples());
        sys.gram += g.tr_mul(&g);
        sys.rhs += g.tr_mul(&target);
    }
    let sol = solve_system(sys, m, opts)?;
    let per_band = (0..bands)
        .map(|k| {
            (
                sol.params.rows(k * m, m).into_owned(),
                vec![sol.lambda[k]],
                sol.ridge_retried,
            )
        })
        .collect();
    finish(t, grids, pairs, Method::SpatialJoint, per_band)
}

pub fn train(
    method: Method,
    t: &RedundantTransform,
    grids: &[KnotGrid],
    pairs: &[TrainingPair],
    opts: &TrainOptions,
) -> Result<TrainedBank> {
    match method {
        Method::TransformIndependent => train_method1(t, grids, pairs, opts),
        Method::SpatialIndependent => train_method2(t, grids, pairs, opts),
        Method::SpatialJoint => train_method3(t, grids, pairs, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{add_gaussian_noise, NoiseSpec};
    use crate::rng::CounterRng;

    fn smooth_image(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = CounterRng::new(seed);
        let a = rng.next_f64() * 3.0;
        let b = rng.next_f64() * 3.0;
        Image::from_fn(w, h, |r, c| {
            100.0 + 40.0 * ((r as f64 * 0.4 + a).sin() + (c as f64 * 0.3 + b).cos()) + 10.0 * rng.next_gaussian()
        })
    }

    fn pairs(w: usize, h: usize, count: usize, sigma: f64) -> Vec<TrainingPair> {
        (0..count)
            .map(|i| {
                let x = smooth_image(w, h, i as u64);
                let y = add_gaussian_noise(&x, NoiseSpec { sigma, seed: 1000 + i as u64 }).unwrap();
                TrainingPair::new(x, y).unwrap()
            })
            .collect()
    }

    #[test]
    fn method_numbers() {
        for m in Method::ALL {
            assert_eq!(Method::from_number(m.number()).unwrap(), m);
        }
        assert!(Method::from_number(4).is_err());
        assert_eq!(serde_json::to_string(&Method::SpatialJoint).unwrap(), "3");
    }

    #[test]
    fn design_reproduces_identity() {
        let t = RedundantTransform::new(2, 1, 1, 8, 8).unwrap();
        let ps = pairs(8, 8, 1, 5.0);
        let grids = grids_for_pairs(&t, &ps, 7, HalfRangeRule::default()).unwrap();
        let yw = t.forward(&ps[0].noisy).unwrap();
        for (k, d) in assemble_design(&t, &grids, &ps[0]).unwrap().iter().enumerate() {
            let out = d.apply(&grids[k].knots());
            for (a, b) in out.iter().zip(yw.band(k)) {
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn noiseless_pairs_train_identity() {
        let t = RedundantTransform::new(2, 1, 1, 8, 8).unwrap();
        let ps = pairs(8, 8, 3, 0.0);
        let grids = grids_for_pairs(&t, &ps, 5, HalfRangeRule::default()).unwrap();
        let opts = TrainOptions {
            ridge: Ridge::Relative(1e-14),
            ..TrainOptions::default()
        };
        // every knot visited? not guaranteed, so compare outputs instead of params
        for method in Method::ALL {
            let tb = train(method, &t, &grids, &ps, &opts).unwrap();
            assert!(tb.objectives.delta3 < 1e-6, "{method}: {:?}", tb.objectives);
        }
    }

    #[test]
    fn unitary_methods_agree() {
        let t = RedundantTransform::unitary(4, 16, 16).unwrap();
        let ps = pairs(16, 16, 6, 15.0);
        let grids = grids_for_pairs(&t, &ps, 9, HalfRangeRule::default()).unwrap();
        let opts = TrainOptions::default();
        let b1 = train_method1(&t, &grids, &ps, &opts).unwrap();
        let b2 = train_method2(&t, &grids, &ps, &opts).unwrap();
        let b3 = train_method3(&t, &grids, &ps, &opts).unwrap();
        let p1 = b1.bank.flat_params();
        for other in [&b2, &b3] {
            let diff = p1
                .iter()
                .zip(other.bank.flat_params())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-8, "{} differs by {diff}", other.method);
        }
    }

    #[test]
    fn objective_ordering_and_minimizers() {
        let t = RedundantTransform::new(4, 2, 2, 16, 16).unwrap();
        let ps = pairs(16, 16, 4, 20.0);
        let grids = grids_for_pairs(&t, &ps, 7, HalfRangeRule::default()).unwrap();
        let opts = TrainOptions::default();
        let b1 = train_method1(&t, &grids, &ps, &opts).unwrap();
        let b2 = train_method2(&t, &grids, &ps, &opts).unwrap();
        let b3 = train_method3(&t, &grids, &ps, &opts).unwrap();
        for b in [&b1, &b2, &b3] {
            let o = b.objectives;
            assert!(o.delta1 >= o.delta2 - 1e-10 && o.delta2 >= o.delta3 - 1e-10, "{o:?}");
        }
        assert!(b1.objectives.delta1 >= b2.objectives.delta2);
        assert!(b2.objectives.delta2 >= b3.objectives.delta3);
        assert!(b2.objectives.delta2 <= b1.objectives.delta2 + 1e-9);
        assert!(b3.objectives.delta3 <= b2.objectives.delta3 + 1e-9);
    }

    #[test]
    fn odd_symmetry_ties_parameters() {
        let t = RedundantTransform::new(2, 1, 1, 8, 8).unwrap();
        let ps = pairs(8, 8, 2, 10.0);
        let grids = grids_for_pairs(&t, &ps, 7, HalfRangeRule::default()).unwrap();
        let opts = TrainOptions {
            odd_symmetry: true,
            ..TrainOptions::default()
        };
        for method in Method::ALL {
            let tb = train(method, &t, &grids, &ps, &opts).unwrap();
            for sf in tb.bank.sfs() {
                let p = sf.params();
                assert_eq!(p[3], 0.0);
                for j in 0..3 {
                    assert_eq!(p[j], -p[6 - j]);
                }
            }
        }
    }

    #[test]
    fn cg_path_matches_direct() {
        let t = RedundantTransform::new(2, 1, 1, 8, 8).unwrap();
        let ps = pairs(8, 8, 3, 10.0);
        let grids = grids_for_pairs(&t, &ps, 5, HalfRangeRule::default()).unwrap();
        let direct = train_method3(&t, &grids, &ps, &TrainOptions::default()).unwrap();
        let opts = TrainOptions {
            solver: SolverOptions {
                direct_limit: 4,
                ..SolverOptions::default()
            },
            ..TrainOptions::default()
        };
        let cg = train_method3(&t, &grids, &ps, &opts).unwrap();
        let diff = direct
            .bank
            .flat_params()
            .iter()
            .zip(cg.bank.flat_params())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn empty_inputs_rejected() {
        let t = RedundantTransform::unitary(2, 4, 4).unwrap();
        let g = KnotGrid::new(1.0, 3).unwrap();
        let bank = SfBank::identity(2, &[g; 4]).unwrap();
        assert!(objective_values(&t, &bank, &[]).is_err());
        assert!(train_method1(&t, &[g; 4], &[], &TrainOptions::default()).is_err());
        assert!(train_method1(&t, &[g; 3], &pairs(4, 4, 1, 1.0), &TrainOptions::default()).is_err());
    }
}

//! Brute-force dense-matrix oracles, built straight from the definitions.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use shrinkframe::rng::CounterRng;
use shrinkframe::{Image, KnotGrid, PiecewiseLinearSf, SfBank};

/// `C[f][p]` of the orthonormal 1-D DCT-II.
pub fn dct_matrix(w: usize) -> DMatrix<f64> {
    DMatrix::from_fn(w, w, |f, p| {
        let scale = if f == 0 { (1.0 / w as f64).sqrt() } else { (2.0 / w as f64).sqrt() };
        scale * (std::f64::consts::PI * (2 * p + 1) as f64 * f as f64 / (2 * w) as f64).cos()
    })
}

/// Explicit frame matrix, `k n x n`, rows in band-major order.
pub fn dense_frame(w: usize, sx: usize, sy: usize, width: usize, height: usize) -> DMatrix<f64> {
    let c = dct_matrix(w);
    let (nx, ny) = (w / sx, w / sy);
    let k = nx * ny;
    let (bx_n, by_n) = (width / w, height / w);
    let band_len = k * bx_n * by_n;
    let n = width * height;
    let mut m = DMatrix::zeros(w * w * band_len, n);
    let norm = 1.0 / (k as f64).sqrt();
    for fy in 0..w {
        for fx in 0..w {
            let band = fy * w + fx;
            for s in 0..k {
                let (ox, oy) = ((s % nx) * sx, (s / nx) * sy);
                for by in 0..by_n {
                    for bx in 0..bx_n {
                        let row = band * band_len + (s * by_n + by) * bx_n + bx;
                        for r in 0..w {
                            for q in 0..w {
                                let pr = (by * w + oy + r) % height;
                                let pc = (bx * w + ox + q) % width;
                                m[(row, pr * width + pc)] += norm * c[(fy, r)] * c[(fx, q)];
                            }
                        }
                    }
                }
            }
        }
    }
    m
}

/// Rows of band `b` of the dense frame: `B_b`.
pub fn band_rows(frame: &DMatrix<f64>, bands: usize, b: usize) -> DMatrix<f64> {
    let len = frame.nrows() / bands;
    frame.rows(b * len, len).into_owned()
}

/// Hat-function weights with linear extrapolation, written out per knot.
pub fn hat_row(t: f64, half: f64, m: usize) -> Vec<f64> {
    let h = 2.0 * half / (m - 1) as f64;
    let knots: Vec<f64> = (0..m).map(|j| -half + j as f64 * h).collect();
    let mut row = vec![0.0; m];
    if t < knots[0] {
        let s = (t - knots[0]) / h;
        row[0] = 1.0 - s;
        row[1] = s;
    } else if t > knots[m - 1] {
        let s = (t - knots[m - 2]) / h;
        row[m - 2] = 1.0 - s;
        row[m - 1] = s;
    } else {
        for (j, kj) in knots.iter().enumerate() {
            row[j] = (1.0 - (t - kj).abs() / h).max(0.0);
        }
    }
    row
}

pub fn eval_sf(t: f64, half: f64, params: &[f64]) -> f64 {
    hat_row(t, half, params.len()).iter().zip(params).map(|(a, b)| a * b).sum()
}

pub fn vec_of(img: &Image) -> DVector<f64> {
    DVector::from_column_slice(img.samples())
}

pub fn random_image(w: usize, h: usize, rng: &mut CounterRng, scale: f64) -> Image {
    Image::from_fn(w, h, |_, _| scale * rng.next_gaussian())
}

/// Bank with independent random parameters per band.
pub fn random_bank(window: usize, m: usize, rng: &mut CounterRng) -> SfBank {
    let sfs = (0..window * window)
        .map(|_| {
            let g = KnotGrid::new(1.0 + 4.0 * rng.next_f64(), m).unwrap();
            let p = (0..m).map(|_| 3.0 * rng.next_gaussian()).collect();
            PiecewiseLinearSf::new(g, p).unwrap()
        })
        .collect();
    SfBank::new(window, sfs).unwrap()
}

/// `W^T ψ(W y)` through explicit matrices.
pub fn dense_denoise(frame: &DMatrix<f64>, bank: &SfBank, y: &Image) -> DVector<f64> {
    let bands = bank.band_count();
    let len = frame.nrows() / bands;
    let mut z = frame * vec_of(y);
    for b in 0..bands {
        let sf = bank.sf(b);
        for i in 0..len {
            z[b * len + i] = eval_sf(z[b * len + i], sf.grid().half_range(), sf.params());
        }
    }
    frame.transpose() * z
}

/// Ridge least squares `min |A p - b|² + λ|p|²` by SVD of the stacked system.
pub fn ridge_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let (r, c) = a.shape();
    let mut big = DMatrix::zeros(r + c, c);
    big.rows_mut(0, r).copy_from(a);
    for i in 0..c {
        big[(r + i, i)] = lambda.sqrt();
    }
    let mut rhs = DVector::zeros(r + c);
    rhs.rows_mut(0, r).copy_from(b);
    big.svd(true, true).solve(&rhs, 1e-14).unwrap()
}

/// Design `A_b` of band `b` stacked over all noisy images.
fn band_design(frame: &DMatrix<f64>, bands: usize, b: usize, half: f64, m: usize, noisy: &[Image]) -> Vec<DMatrix<f64>> {
    let bb = band_rows(frame, bands, b);
    noisy
        .iter()
        .map(|y| {
            let coeffs = &bb * vec_of(y);
            DMatrix::from_fn(coeffs.len(), m, |i, j| hat_row(coeffs[i], half, m)[j])
        })
        .collect()
}

fn vstack(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, blocks[0].ncols());
    let mut at = 0;
    for b in blocks {
        out.rows_mut(at, b.nrows()).copy_from(b);
        at += b.nrows();
    }
    out
}

fn vstack_vec(blocks: &[DVector<f64>]) -> DVector<f64> {
    let rows: usize = blocks.iter().map(|b| b.len()).sum();
    let mut out = DVector::zeros(rows);
    let mut at = 0;
    for b in blocks {
        out.rows_mut(at, b.len()).copy_from(b);
        at += b.len();
    }
    out
}

/// Per-band parameters of methods 1, 2 and 3 with a fixed ridge.
pub fn dense_train(
    method: u8,
    frame: &DMatrix<f64>,
    bands: usize,
    halves: &[f64],
    m: usize,
    clean: &[Image],
    noisy: &[Image],
    lambda: f64,
) -> Vec<DVector<f64>> {
    match method {
        1 | 2 => (0..bands)
            .map(|b| {
                let bb = band_rows(frame, bands, b);
                let designs = band_design(frame, bands, b, halves[b], m, noisy);
                let (a, target): (Vec<_>, Vec<_>) = designs
                    .iter()
                    .zip(clean)
                    .map(|(ab, x)| {
                        let xb = &bb * vec_of(x);
                        if method == 1 {
                            (ab.clone(), xb)
                        } else {
                            (bb.transpose() * ab, bb.transpose() * xb)
                        }
                    })
                    .unzip();
                ridge_lstsq(&vstack(&a), &vstack_vec(&target), lambda)
            })
            .collect(),
        3 => {
            let per_pair: Vec<DMatrix<f64>> = (0..clean.len())
                .map(|i| {
                    let n = clean[i].len();
                    let mut g = DMatrix::zeros(n, bands * m);
                    for b in 0..bands {
                        let bb = band_rows(frame, bands, b);
                        let ab = &band_design(frame, bands, b, halves[b], m, &noisy[i..=i])[0];
                        g.columns_mut(b * m, m).copy_from(&(bb.transpose() * ab));
                    }
                    g
                })
                .collect();
            let targets: Vec<DVector<f64>> = clean.iter().map(vec_of).collect();
            let p = ridge_lstsq(&vstack(&per_pair), &vstack_vec(&targets), lambda);
            (0..bands).map(|b| p.rows(b * m, m).into_owned()).collect()
        }
        _ => panic!("method {method}"),
    }
}

/// Small geometries (at most 64 pixels) covering unitary, partial and full redundancy.
pub const GEOMETRIES: [(usize, usize, usize, usize, usize); 8] = [
    (2, 2, 2, 8, 8),
    (2, 1, 1, 8, 8),
    (2, 2, 1, 4, 8),
    (2, 1, 2, 6, 4),
    (4, 2, 2, 8, 8),
    (4, 1, 1, 4, 8),
    (4, 4, 2, 8, 4),
    (4, 1, 4, 8, 8),
];

fn scaled_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let scale = b.amax().max(1.0);
    (a - b).amax() / scale
}

fn stack_vec(z: &shrinkframe::BandStack) -> DVector<f64> {
    DVector::from_column_slice(z.as_slice())
}

/// Largest scaled deviation of `forward` and `adjoint` from the dense frame.
pub fn forward_adjoint_errors(cases: usize, seed: u64) -> (f64, f64) {
    let (mut ef, mut ea) = (0.0f64, 0.0f64);
    for case in 0..cases {
        let (w, sx, sy, width, height) = GEOMETRIES[case % GEOMETRIES.len()];
        let mut rng = CounterRng::from_tag(seed, "oracle-frame", case as u64);
        let t = shrinkframe::RedundantTransform::new(w, sx, sy, width, height).unwrap();
        let frame = dense_frame(w, sx, sy, width, height);
        let x = random_image(width, height, &mut rng, 10.0);
        ef = ef.max(scaled_err(&stack_vec(&t.forward(&x).unwrap()), &(&frame * vec_of(&x))));
        let mut z = t.empty_stack();
        z.as_mut_slice().iter_mut().for_each(|v| *v = rng.next_gaussian());
        ea = ea.max(scaled_err(&vec_of(&t.adjoint(&z).unwrap()), &(frame.transpose() * stack_vec(&z))));
    }
    (ef, ea)
}

pub fn denoise_error(cases: usize, seed: u64) -> f64 {
    let mut e = 0.0f64;
    for case in 0..cases {
        let (w, sx, sy, width, height) = GEOMETRIES[case % GEOMETRIES.len()];
        let mut rng = CounterRng::from_tag(seed, "oracle-denoise", case as u64);
        let t = shrinkframe::RedundantTransform::new(w, sx, sy, width, height).unwrap();
        let frame = dense_frame(w, sx, sy, width, height);
        let bank = random_bank(w, 5, &mut rng);
        let y = random_image(width, height, &mut rng, 4.0);
        let got = vec_of(&shrinkframe::denoise(&y, &t, &bank).unwrap());
        e = e.max(scaled_err(&got, &dense_denoise(&frame, &bank, &y)));
    }
    e
}

/// Largest scaled parameter deviation of trainer `method` from the dense
/// ridge least-squares solution.
pub fn trainer_error(method: u8, cases: usize, seed: u64) -> f64 {
    use shrinkframe::training::{train, Ridge, TrainOptions};
    let lambda = 1e-2;
    let m = 5;
    let mut e = 0.0f64;
    for case in 0..cases {
        let (w, sx, sy, width, height) = GEOMETRIES[case % GEOMETRIES.len()];
        let mut rng = CounterRng::from_tag(seed, "oracle-train", (method as u64) << 32 | case as u64);
        let t = shrinkframe::RedundantTransform::new(w, sx, sy, width, height).unwrap();
        let frame = dense_frame(w, sx, sy, width, height);
        let bands = w * w;
        let halves: Vec<f64> = (0..bands).map(|_| 2.0 + 6.0 * rng.next_f64()).collect();
        let pairs_n = 2 + case % 2;
        let clean: Vec<Image> = (0..pairs_n).map(|_| random_image(width, height, &mut rng, 3.0)).collect();
        let noisy: Vec<Image> = clean
            .iter()
            .map(|x| Image::from_fn(width, height, |r, c| x.get(r, c) + rng.next_gaussian()))
            .collect();
        let grids: Vec<KnotGrid> = halves.iter().map(|&h| KnotGrid::new(h, m).unwrap()).collect();
        let pairs: Vec<_> = clean
            .iter()
            .zip(&noisy)
            .map(|(x, y)| shrinkframe::TrainingPair::new(x.clone(), y.clone()).unwrap())
            .collect();
        let opts = TrainOptions {
            ridge: Ridge::Fixed(lambda),
            ..TrainOptions::default()
        };
        let got = train(shrinkframe::Method::from_number(method).unwrap(), &t, &grids, &pairs, &opts).unwrap();
        let want = dense_train(method, &frame, bands, &halves, m, &clean, &noisy, lambda);
        for b in 0..bands {
            let g = DVector::from_column_slice(got.bank.sf(b).params());
            e = e.max(scaled_err(&g, &want[b]));
        }
    }
    e
}

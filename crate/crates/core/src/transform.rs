//! Windowed DCT bases and their cycle-spinning tight frames.
//!
//! A [`RedundantTransform`] stacks `k` cyclically shifted copies of the
//! non-overlapping `w x w` block DCT and scales the stack by `1/sqrt(k)`, so
//! that `adjoint(forward(x)) = x` and `|forward(x)| = |x|` hold exactly for
//! every shift set built from strides dividing `w`.
//!
//! Coefficients are always laid out band-major: all coefficients of band 0,
//! then band 1, and so on. Inside a band plane the index is
//! `(offset * blocks_y + block_row) * blocks_x + block_col`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, shape, Result};
use crate::image::Image;
use crate::rng::CounterRng;

/// Frequency pair of a DCT band: `fx` along the x-axis (columns), `fy` along
/// the y-axis (rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BandId {
    pub fx: usize,
    pub fy: usize,
}

/// Orthonormal 2-D DCT-II basis of a `w x w` window.
#[derive(Debug, Clone, PartialEq)]
pub struct DctBasis {
    window: usize,
    // table[freq * w + pos]
    table: Vec<f64>,
}

/// Build the `w²` orthonormal DCT-II kernels of a `w x w` window.
pub fn make_dct_basis(window: usize) -> Result<DctBasis> {
    DctBasis::new(window)
}

impl DctBasis {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(invalid("DCT window must be at least 1"));
        }
        let w = window as f64;
        let mut table = Vec::with_capacity(window * window);
        for freq in 0..window {
            let alpha = if freq == 0 { (1.0 / w).sqrt() } else { (2.0 / w).sqrt() };
            for pos in 0..window {
                let v = if freq == 0 {
                    alpha
                } else {
                    alpha * (PI * (2 * pos + 1) as f64 * freq as f64 / (2.0 * w)).cos()
                };
                table.push(v);
            }
        }
        Ok(Self { window, table })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of kernels, `w²`.
    pub fn band_count(&self) -> usize {
        self.window * self.window
    }

    /// 1-D DCT-II basis value.
    #[inline]
    pub fn cosine(&self, freq: usize, pos: usize) -> f64 {
        self.table[freq * self.window + pos]
    }

    pub fn band_id(&self, band: usize) -> BandId {
        BandId {
            fx: band % self.window,
            fy: band / self.window,
        }
    }

    pub fn band_index(&self, id: BandId) -> Result<usize> {
        if id.fx >= self.window || id.fy >= self.window {
            return Err(invalid(format!(
                "band ({}, {}) outside a {}-wide window",
                id.fx, id.fy, self.window
            )));
        }
        Ok(id.fy * self.window + id.fx)
    }

    pub fn band_ids(&self) -> Vec<BandId> {
        (0..self.band_count()).map(|k| self.band_id(k)).collect()
    }

    /// Kernel of band `band` as a row-major `w x w` array:
    /// `kernel[r * w + c] = C[fy][r] * C[fx][c]`.
    pub fn kernel(&self, band: usize) -> Vec<f64> {
        let w = self.window;
        let id = self.band_id(band);
        let mut k = Vec::with_capacity(w * w);
        for r in 0..w {
            for c in 0..w {
                k.push(self.cosine(id.fy, r) * self.cosine(id.fx, c));
            }
        }
        k
    }

    pub fn kernels(&self) -> Vec<Vec<f64>> {
        (0..self.band_count()).map(|k| self.kernel(k)).collect()
    }
}

/// Basis displacements `(i * stride_x, j * stride_y)` with `0 <= i < w/stride_x`
/// and `0 <= j < w/stride_y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftSet {
    window: usize,
    stride_x: usize,
    stride_y: usize,
}

impl ShiftSet {
    pub fn new(window: usize, stride_x: usize, stride_y: usize) -> Result<Self> {
        if window == 0 {
            return Err(invalid("window must be at least 1"));
        }
        for (name, s) in [("stride_x", stride_x), ("stride_y", stride_y)] {
            if s == 0 || window % s != 0 {
                return Err(invalid(format!(
                    "{name} = {s} does not divide window {window}; valid strides: {:?}",
                    divisors(window)
                )));
            }
        }
        Ok(Self {
            window,
            stride_x,
            stride_y,
        })
    }

    /// Shift set with redundancy `k`, choosing the most balanced stride pair.
    pub fn for_redundancy(window: usize, k: usize) -> Result<Self> {
        let options = realizable_redundancies(window);
        let best = options
            .iter()
            .filter(|r| r.redundancy == k)
            .min_by_key(|r| {
                let (nx, ny) = (window / r.stride_x, window / r.stride_y);
                (nx.abs_diff(ny), ny)
            });
        match best {
            Some(r) => Self::new(window, r.stride_x, r.stride_y),
            None => {
                let mut ks: Vec<String> = options
                    .iter()
                    .map(|r| format!("k={} (strides {}x{})", r.redundancy, r.stride_x, r.stride_y))
                    .collect();
                ks.dedup();
                Err(invalid(format!(
                    "redundancy {k} is not realizable with window {window}; valid: {}",
                    ks.join(", ")
                )))
            }
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn stride_x(&self) -> usize {
        self.stride_x
    }

    pub fn stride_y(&self) -> usize {
        self.stride_y
    }

    pub fn count_x(&self) -> usize {
        self.window / self.stride_x
    }

    pub fn count_y(&self) -> usize {
        self.window / self.stride_y
    }

    /// Redundancy rate `k`.
    pub fn redundancy(&self) -> usize {
        self.count_x() * self.count_y()
    }

    /// Displacement `(dx, dy)` of offset `index`.
    pub fn offset(&self, index: usize) -> (usize, usize) {
        let nx = self.count_x();
        ((index % nx) * self.stride_x, (index / nx) * self.stride_y)
    }

    pub fn offsets(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.redundancy()).map(|i| self.offset(i))
    }
}

/// One stride pair and the redundancy it produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrideOption {
    pub stride_x: usize,
    pub stride_y: usize,
    pub redundancy: usize,
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Every stride pair admissible for `window`, sorted by redundancy.
pub fn realizable_redundancies(window: usize) -> Vec<StrideOption> {
    let ds = divisors(window);
    let mut out: Vec<StrideOption> = ds
        .iter()
        .flat_map(|&sy| {
            ds.iter().map(move |&sx| StrideOption {
                stride_x: sx,
                stride_y: sy,
                redundancy: (window / sx) * (window / sy),
            })
        })
        .collect();
    out.sort_by_key(|o| (o.redundancy, o.stride_y, o.stride_x));
    out
}

/// Transform-domain coefficients grouped per band, band-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStack {
    band_count: usize,
    band_len: usize,
    offsets: usize,
    data: Vec<f64>,
}

impl BandStack {
    pub fn zeros(band_count: usize, band_len: usize, offsets: usize) -> Self {
        assert!(offsets > 0 && band_len % offsets == 0);
        Self {
            band_count,
            band_len,
            offsets,
            data: vec![0.0; band_count * band_len],
        }
    }

    pub fn from_vec(band_count: usize, band_len: usize, offsets: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != band_count * band_len || offsets == 0 || band_len % offsets != 0 {
            return Err(shape(format!(
                "{} coefficients cannot form {} bands of {} ({} offsets)",
                data.len(),
                band_count,
                band_len,
                offsets
            )));
        }
        Ok(Self {
            band_count,
            band_len,
            offsets,
            data,
        })
    }

    pub fn band_count(&self) -> usize {
        self.band_count
    }

    pub fn band_len(&self) -> usize {
        self.band_len
    }

    pub fn offset_count(&self) -> usize {
        self.offsets
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn band(&self, k: usize) -> &[f64] {
        &self.data[k * self.band_len..(k + 1) * self.band_len]
    }

    pub fn band_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.data[k * self.band_len..(k + 1) * self.band_len]
    }

    /// Coefficients of band `k` produced by the shifted unitary transform
    /// `offset` (still carrying the `1/sqrt(k)` frame scale).
    pub fn offset_slice(&self, k: usize, offset: usize) -> &[f64] {
        let per = self.band_len / self.offsets;
        let start = k * self.band_len + offset * per;
        &self.data[start..start + per]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn norm_squared(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn same_layout(&self, other: &BandStack) -> bool {
        self.band_count == other.band_count
            && self.band_len == other.band_len
            && self.offsets == other.offsets
    }

    pub fn sub(&self, other: &BandStack) -> Result<BandStack> {
        if !self.same_layout(other) {
            return Err(shape("band stacks have different layouts"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(BandStack { data, ..*self })
    }
}

/// Cycle-spinning tight frame `W = [U_1; ...; U_k] / sqrt(k)` over a fixed
/// image size with periodic boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct RedundantTransform {
    basis: DctBasis,
    shifts: ShiftSet,
    width: usize,
    height: usize,
    scale: f64,
}

impl RedundantTransform {
    pub fn new(window: usize, stride_x: usize, stride_y: usize, width: usize, height: usize) -> Result<Self> {
        let basis = DctBasis::new(window)?;
        let shifts = ShiftSet::new(window, stride_x, stride_y)?;
        Self::from_parts(basis, shifts, width, height)
    }

    /// The non-overlapping block transform (`k = 1`).
    pub fn unitary(window: usize, width: usize, height: usize) -> Result<Self> {
        Self::new(window, window, window, width, height)
    }

    /// Transform with redundancy `k` using the most balanced stride pair.
    pub fn with_redundancy(window: usize, k: usize, width: usize, height: usize) -> Result<Self> {
        let basis = DctBasis::new(window)?;
        let shifts = ShiftSet::for_redundancy(window, k)?;
        Self::from_parts(basis, shifts, width, height)
    }

    pub fn from_parts(basis: DctBasis, shifts: ShiftSet, width: usize, height: usize) -> Result<Self> {
        let w = basis.window();
        if shifts.window() != w {
            return Err(invalid("shift set and basis use different windows"));
        }
        if width == 0 || height == 0 || width % w != 0 || height % w != 0 {
            return Err(invalid(format!(
                "image {width}x{height} is not a non-empty multiple of window {w}"
            )));
        }
        let scale = 1.0 / (shifts.redundancy() as f64).sqrt();
        Ok(Self {
            basis,
            shifts,
            width,
            height,
            scale,
        })
    }

    /// Replace the frame normalization. Only useful for building broken
    /// transforms in negative-control tests.
    #[doc(hidden)]
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn basis(&self) -> &DctBasis {
        &self.basis
    }

    pub fn shifts(&self) -> &ShiftSet {
        &self.shifts
    }

    pub fn window(&self) -> usize {
        self.basis.window()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn redundancy(&self) -> usize {
        self.shifts.redundancy()
    }

    pub fn is_unitary(&self) -> bool {
        self.redundancy() == 1
    }

    pub fn band_count(&self) -> usize {
        self.basis.band_count()
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn blocks_x(&self) -> usize {
        self.width / self.window()
    }

    pub fn blocks_y(&self) -> usize {
        self.height / self.window()
    }

    /// Coefficients per band: `k * n / w²`.
    pub fn band_len(&self) -> usize {
        self.redundancy() * self.blocks_x() * self.blocks_y()
    }

    /// Total coefficients: `k * n`.
    pub fn coefficient_count(&self) -> usize {
        self.band_len() * self.band_count()
    }

    pub fn empty_stack(&self) -> BandStack {
        BandStack::zeros(self.band_count(), self.band_len(), self.redundancy())
    }

    /// Top-left pixel `(row, col)` of the atom at in-band position `pos`,
    /// before periodic wrapping.
    #[inline]
    pub fn atom_origin(&self, pos: usize) -> (usize, usize) {
        let (bx_n, by_n) = (self.blocks_x(), self.blocks_y());
        let bx = pos % bx_n;
        let by = (pos / bx_n) % by_n;
        let s = pos / (bx_n * by_n);
        let (ox, oy) = self.shifts.offset(s);
        let w = self.window();
        (by * w + oy, bx * w + ox)
    }

    pub(crate) fn check_image(&self, x: &Image) -> Result<()> {
        if x.width() != self.width || x.height() != self.height {
            return Err(shape(format!(
                "image is {}x{}, transform expects {}x{}",
                x.width(),
                x.height(),
                self.width,
                self.height
            )));
        }
        Ok(())
    }

    pub(crate) fn check_stack(&self, z: &BandStack) -> Result<()> {
        if z.band_count() != self.band_count()
            || z.band_len() != self.band_len()
            || z.offset_count() != self.redundancy()
        {
            return Err(shape(format!(
                "stack has {} bands of {}, transform expects {} bands of {}",
                z.band_count(),
                z.band_len(),
                self.band_count(),
                self.band_len()
            )));
        }
        Ok(())
    }

    fn wrapped_rows(&self, origin: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.window()).map(move |r| (origin + r) % self.height)
    }

    fn wrapped_cols(&self, origin: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.window()).map(move |c| (origin + c) % self.width)
    }

    /// Analysis `W x`, band-major.
    pub fn forward(&self, x: &Image) -> Result<BandStack> {
        self.check_image(x)?;
        let w = self.window();
        let band_len = self.band_len();
        let mut out = self.empty_stack();
        let data = out.as_mut_slice();
        let src = x.samples();
        let mut patch = vec![0.0; w * w];
        let mut tmp = vec![0.0; w * w];
        let mut rows = vec![0usize; w];
        let mut cols = vec![0usize; w];
        for pos in 0..band_len {
            let (r0, c0) = self.atom_origin(pos);
            rows.iter_mut().zip(self.wrapped_rows(r0)).for_each(|(d, s)| *d = s);
            cols.iter_mut().zip(self.wrapped_cols(c0)).for_each(|(d, s)| *d = s);
            for (r, &row) in rows.iter().enumerate() {
                let line = &src[row * self.width..(row + 1) * self.width];
                for (c, &col) in cols.iter().enumerate() {
                    patch[r * w + c] = line[col];
                }
            }
            // tmp[fy][c] = sum_r C[fy][r] patch[r][c]
            for fy in 0..w {
                let t = &mut tmp[fy * w..(fy + 1) * w];
                t.fill(0.0);
                for r in 0..w {
                    let cf = self.basis.cosine(fy, r);
                    for (tv, pv) in t.iter_mut().zip(&patch[r * w..(r + 1) * w]) {
                        *tv += cf * pv;
                    }
                }
            }
            for fy in 0..w {
                let t = &tmp[fy * w..(fy + 1) * w];
                for fx in 0..w {
                    let cx = &self.basis.table[fx * w..(fx + 1) * w];
                    let v: f64 = t.iter().zip(cx).map(|(a, b)| a * b).sum();
                    data[(fy * w + fx) * band_len + pos] = self.scale * v;
                }
            }
        }
        Ok(out)
    }

    /// Synthesis `W^T z`.
    pub fn adjoint(&self, z: &BandStack) -> Result<Image> {
        self.check_stack(z)?;
        let w = self.window();
        let band_len = self.band_len();
        let data = z.as_slice();
        let mut out = Image::zeros(self.width, self.height);
        let dst = out.samples_mut();
        let mut coef = vec![0.0; w * w];
        let mut tmp = vec![0.0; w * w];
        for pos in 0..band_len {
            for (k, c) in coef.iter_mut().enumerate() {
                *c = data[k * band_len + pos];
            }
            // tmp[fy][c] = sum_fx coef[fy][fx] C[fx][c]
            for fy in 0..w {
                let t = &mut tmp[fy * w..(fy + 1) * w];
                t.fill(0.0);
                for fx in 0..w {
                    let cv = coef[fy * w + fx];
                    if cv == 0.0 {
                        continue;
                    }
                    for (tv, b) in t.iter_mut().zip(&self.basis.table[fx * w..(fx + 1) * w]) {
                        *tv += cv * b;
                    }
                }
            }
            let (r0, c0) = self.atom_origin(pos);
            for (r, row) in self.wrapped_rows(r0).enumerate() {
                for (c, col) in self.wrapped_cols(c0).enumerate() {
                    let mut v = 0.0;
                    for fy in 0..w {
                        v += self.basis.cosine(fy, r) * tmp[fy * w + c];
                    }
                    dst[row * self.width + col] += self.scale * v;
                }
            }
        }
        Ok(out)
    }

    /// `B_k x`: the coefficients of a single band.
    pub fn band_forward(&self, band: usize, x: &Image) -> Result<Vec<f64>> {
        self.check_band(band)?;
        self.check_image(x)?;
        let kernel = self.basis.kernel(band);
        let w = self.window();
        let src = x.samples();
        Ok((0..self.band_len())
            .map(|pos| {
                let (r0, c0) = self.atom_origin(pos);
                let mut acc = 0.0;
                for (r, row) in self.wrapped_rows(r0).enumerate() {
                    for (c, col) in self.wrapped_cols(c0).enumerate() {
                        acc += kernel[r * w + c] * src[row * self.width + col];
                    }
                }
                self.scale * acc
            })
            .collect())
    }

    /// `B_k^T d`: synthesis from a single band plane.
    pub fn band_adjoint(&self, band: usize, plane: &[f64]) -> Result<Image> {
        self.check_band(band)?;
        if plane.len() != self.band_len() {
            return Err(shape(format!(
                "band plane has {} coefficients, expected {}",
                plane.len(),
                self.band_len()
            )));
        }
        let kernel = self.basis.kernel(band);
        let mut out = Image::zeros(self.width, self.height);
        for (pos, &v) in plane.iter().enumerate() {
            if v != 0.0 {
                self.scatter_atom(out.samples_mut(), &kernel, pos, self.scale * v);
            }
        }
        Ok(out)
    }

    /// Add `amount * kernel` at the atom position `pos` into `target`.
    #[inline]
    pub(crate) fn scatter_atom(&self, target: &mut [f64], kernel: &[f64], pos: usize, amount: f64) {
        let w = self.window();
        let (r0, c0) = self.atom_origin(pos);
        for (r, row) in self.wrapped_rows(r0).enumerate() {
            let line = &mut target[row * self.width..(row + 1) * self.width];
            for (c, col) in self.wrapped_cols(c0).enumerate() {
                line[col] += amount * kernel[r * w + c];
            }
        }
    }

    fn check_band(&self, band: usize) -> Result<()> {
        if band >= self.band_count() {
            return Err(invalid(format!(
                "band {band} out of range (transform has {} bands)",
                self.band_count()
            )));
        }
        Ok(())
    }
}

/// Outcome of [`verify_tight_frame`].
#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    pub window: usize,
    pub stride_x: usize,
    pub stride_y: usize,
    pub redundancy: usize,
    pub trials: usize,
    pub tolerance: f64,
    /// max over trials of `| |Wx| - |x| | / |x|`
    pub norm_deviation: f64,
    /// max over trials of `|W^T W x - x| / |x|`
    pub reconstruction_deviation: f64,
    /// max over trials of `(|W^T z| - |z|) / |z|`, clipped at zero
    pub contraction_excess: f64,
    pub passed: bool,
}

impl FrameReport {
    pub fn max_deviation(&self) -> f64 {
        self.norm_deviation
            .max(self.reconstruction_deviation)
            .max(self.contraction_excess)
    }
}

/// Check Parseval, perfect reconstruction and adjoint contraction on
/// `trials` random images (and as many random coefficient vectors).
pub fn verify_tight_frame(t: &RedundantTransform, trials: usize, tol: f64, seed: u64) -> Result<FrameReport> {
    if trials == 0 {
        return Err(invalid("verify_tight_frame needs at least one trial"));
    }
    let mut rng = CounterRng::from_tag(seed, "verify-frame", t.redundancy() as u64);
    let mut norm_dev: f64 = 0.0;
    let mut rec_dev: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    for _ in 0..trials {
        let x = Image::from_fn(t.width(), t.height(), |_, _| rng.next_gaussian());
        let z = t.forward(&x)?;
        let xr = t.adjoint(&z)?;
        let xn = x.norm();
        norm_dev = norm_dev.max((z.norm() - xn).abs() / xn);
        rec_dev = rec_dev.max(xr.sub(&x)?.norm() / xn);

        let mut zr = t.empty_stack();
        zr.as_mut_slice().iter_mut().for_each(|v| *v = rng.next_gaussian());
        let back = t.adjoint(&zr)?;
        contraction = contraction.max((back.norm() - zr.norm()) / zr.norm());
    }
    let contraction = contraction.max(0.0);
    let passed = norm_dev <= tol && rec_dev <= tol && contraction <= tol;
    Ok(FrameReport {
        window: t.window(),
        stride_x: t.shifts().stride_x(),
        stride_y: t.shifts().stride_y(),
        redundancy: t.redundancy(),
        trials,
        tolerance: tol,
        norm_deviation: norm_dev,
        reconstruction_deviation: rec_dev,
        contraction_excess: contraction,
        passed,
    })
}

//! Periodic grids, complex grid functions, and FFT plumbing.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Scalar;

/// Uniform periodic grid with `n` nodes per axis on a box of side `length`.
///
/// Node `k` along an axis sits at `origin + k * length / n`; by default the box
/// is centered, `origin = -length / 2`. Fields are stored row-major with the
/// `x` index slowest: `idx = (i * n + j) * n + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
    origin: f64,
}

impl Grid {
    /// Three-dimensional grid; requires `n >= 4`.
    pub fn cubic(n: usize, length: f64) -> Result<Grid> {
        Self::build(3, n, length, 4)
    }

    /// One-dimensional grid; requires `n >= 8`.
    pub fn line(n: usize, length: f64) -> Result<Grid> {
        Self::build(1, n, length, 8)
    }

    fn build(dim: usize, n: usize, length: f64, min_n: usize) -> Result<Grid> {
        if n < min_n {
            return Err(Error::InvalidGrid(format!("{dim}D grid needs at least {min_n} nodes per axis, got {n}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive and finite, got {length}")));
        }
        Ok(Grid {
            dim,
            n,
            length,
            origin: -length / 2.0,
        })
    }

    pub fn with_origin(mut self, origin: f64) -> Grid {
        self.origin = origin;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Number of nodes, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn coord(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.spacing()
    }

    /// Per-axis node indices of flat index `idx` (unused axes are 0).
    pub fn indices(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            1 => [idx, 0, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    /// Coordinates of node `idx`; unused axes are reported as 0.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ix = self.indices(idx);
        let mut p = [0.0; 3];
        for (axis, slot) in p.iter_mut().enumerate().take(self.dim) {
            *slot = self.coord(ix[axis]);
        }
        p
    }

    /// Distance between consecutive elements along `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    /// Angular wavenumber of FFT bin `m`, in `numpy.fft.fftfreq` order.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let n = self.n as isize;
        let m = m as isize;
        let signed = if m <= (n - 1) / 2 { m } else { m - n };
        2.0 * PI * signed as f64 / self.length
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Complex-valued function sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Vec<Scalar>,
}

impl ScalarField {
    pub fn from_vec(grid: Grid, data: Vec<Scalar>) -> Self {
        assert_eq!(data.len(), grid.len(), "field length must match grid");
        Self { grid, data }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, Scalar::new(0.0, 0.0))
    }

    pub fn constant(grid: Grid, c: Scalar) -> Self {
        Self::from_vec(grid, vec![c; grid.len()])
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> Scalar) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::from_vec(grid, data)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Scalar] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Scalar> {
        self.data
    }

    /// `sum conj(self) * other * h^dim`.
    pub fn inner(&self, other: &ScalarField) -> Result<Scalar> {
        self.grid.ensure_same(&other.grid)?;
        Ok(raw_inner(&self.data, &other.data) * self.grid.cell_volume())
    }

    /// Grid-weighted L2 norm.
    pub fn norm(&self) -> f64 {
        (raw_norm_sqr(&self.data) * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Scalar) -> ScalarField {
        Self::from_vec(self.grid, self.data.iter().map(|x| x * c).collect())
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(Scalar, Scalar) -> Scalar) -> Result<ScalarField> {
        self.grid.ensure_same(&other.grid)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_vec(self.grid, data))
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Random trigonometric polynomial whose per-axis frequencies are at most
    /// `band` fundamentals. Coefficients are uniform in the unit square.
    pub fn random_band_limited(grid: Grid, band: usize, rng: &mut impl Rng) -> ScalarField {
        assert!(2 * band < grid.n(), "band {band} does not fit below the Nyquist bin of n = {}", grid.n());
        let n = grid.n();
        let bin = |m: isize| if m >= 0 { m as usize } else { (n as isize + m) as usize };
        let band = band as isize;
        let mut spectrum = vec![Scalar::new(0.0, 0.0); grid.len()];
        let range = |active: bool| if active { -band..=band } else { 0..=0 };
        for a in range(true) {
            for b in range(grid.dim() > 1) {
                for c in range(grid.dim() > 1) {
                    let idx = match grid.dim() {
                        1 => bin(a),
                        _ => (bin(a) * n + bin(b)) * n + bin(c),
                    };
                    spectrum[idx] = Scalar::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
                }
            }
        }
        for axis in 0..grid.dim() {
            transform_axis(&grid, &mut spectrum, axis, Direction::Inverse);
        }
        ScalarField::from_vec(grid, spectrum)
    }

    /// Band-limited random field times a centered Gaussian envelope that decays
    /// to about `e^-36` at the box faces.
    pub fn random_localized(grid: Grid, band: usize, rng: &mut impl Rng) -> ScalarField {
        let mut f = Self::random_band_limited(grid, band, rng);
        let center = grid.origin() + grid.length() / 2.0;
        let sigma = grid.length() / (2.0 * 72f64.sqrt());
        for (idx, v) in f.data.iter_mut().enumerate() {
            let p = grid.point(idx);
            let r2: f64 = p.iter().take(grid.dim()).map(|x| (x - center).powi(2)).sum();
            *v *= (-r2 / (2.0 * sigma * sigma)).exp();
        }
        f
    }
}

pub(crate) fn raw_inner(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn raw_norm_sqr(a: &[Scalar]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// In-place FFT of every line along `axis`. The inverse is normalized by `1/n`.
pub(crate) fn transform_axis(grid: &Grid, data: &mut [Scalar], axis: usize, dir: Direction) {
    let n = grid.n();
    let (fwd, inv) = plans(n);
    let plan = if dir == Direction::Forward { fwd } else { inv };
    let stride = grid.stride(axis);
    let scale = if dir == Direction::Inverse { 1.0 / n as f64 } else { 1.0 };
    if stride == 1 {
        plan.process(data);
        if scale != 1.0 {
            data.iter_mut().for_each(|v| *v *= scale);
        }
        return;
    }
    let lines = data.len() / n;
    let mut buf = vec![Scalar::new(0.0, 0.0); n];
    for line in 0..lines {
        let base = (line / stride) * stride * n + line % stride;
        for (t, slot) in buf.iter_mut().enumerate() {
            *slot = data[base + t * stride];
        }
        plan.process(&mut buf);
        for (t, v) in buf.iter().enumerate() {
            data[base + t * stride] = v * scale;
        }
    }
}

/// Applies the Fourier multiplier `mult(bin)` along `axis`.
pub(crate) fn fourier_multiply(grid: &Grid, data: &mut [Scalar], axis: usize, mult: impl Fn(usize) -> Scalar) {
    let n = grid.n();
    let stride = grid.stride(axis);
    transform_axis(grid, data, axis, Direction::Forward);
    let factors: Vec<Scalar> = (0..n).map(mult).collect();
    for (idx, v) in data.iter_mut().enumerate() {
        *v *= factors[(idx / stride) % n];
    }
    transform_axis(grid, data, axis, Direction::Inverse);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn grid_validation() {
        assert!(Grid::cubic(3, 1.0).is_err());
        assert!(Grid::cubic(4, 0.0).is_err());
        assert!(Grid::line(7, 1.0).is_err());
        let g = Grid::cubic(8, 4.0).unwrap();
        assert_eq!(g.len(), 512);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.coord(0), -2.0);
        assert_eq!(g.point(g.len() - 1), [1.5, 1.5, 1.5]);
    }

    #[test]
    fn row_major_layout() {
        let g = Grid::cubic(4, 4.0).unwrap();
        assert_eq!(g.indices(1), [0, 0, 1]);
        assert_eq!(g.indices(4), [0, 1, 0]);
        assert_eq!(g.indices(16), [1, 0, 0]);
        assert_eq!(g.stride(0), 16);
    }

    #[test]
    fn wavenumbers() {
        let g = Grid::line(8, 2.0 * PI).unwrap();
        let k: Vec<f64> = (0..8).map(|m| g.wavenumber(m)).collect();
        assert_eq!(k, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn fft_round_trip() {
        let g = Grid::cubic(8, 3.0).unwrap();
        let mut rng = random::rng(5, 0);
        let f = ScalarField::random_band_limited(g, 3, &mut rng);
        let mut d = f.data().to_vec();
        for axis in 0..3 {
            transform_axis(&g, &mut d, axis, Direction::Forward);
        }
        for axis in 0..3 {
            transform_axis(&g, &mut d, axis, Direction::Inverse);
        }
        let err = d.iter().zip(f.data()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn band_limited_field_has_no_high_modes() {
        let g = Grid::cubic(16, 2.0 * PI).unwrap();
        let mut rng = random::rng(6, 0);
        let f = ScalarField::random_band_limited(g, 3, &mut rng);
        let mut d = f.data().to_vec();
        for axis in 0..3 {
            transform_axis(&g, &mut d, axis, Direction::Forward);
        }
        for (idx, v) in d.iter().enumerate() {
            let ix = g.indices(idx);
            let outside = ix.iter().any(|&m| g.wavenumber(m).abs() > 3.5);
            if outside {
                assert!(v.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn inner_product_weights_cells() {
        let g = Grid::cubic(4, 2.0).unwrap();
        let one = ScalarField::constant(g, Scalar::new(1.0, 0.0));
        assert!((one.inner(&one).unwrap() - Scalar::new(8.0, 0.0)).norm() < 1e-12);
        let other = ScalarField::zeros(Grid::cubic(8, 2.0).unwrap());
        assert!(matches!(one.inner(&other), Err(Error::GridMismatch(_))));
    }
}

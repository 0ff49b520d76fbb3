//! Scalar linear operators on grid functions: multiplication by a field,
//! momentum, and their sums, multiples and compositions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{fourier_multiply, Grid, ScalarField};
use crate::Scalar;

/// Discretization of `p = -i d/dx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Fourier multiplier `k`. The unpaired Nyquist bin keeps its `-N/2`
    /// wavenumber so that `p∘p` has the full kinetic energy there; zeroing it
    /// would leave a spurious zero-energy mode per axis in every spectrum.
    #[default]
    Spectral,
    /// Periodic centered difference `-i (f[j+1] - f[j-1]) / 2h`.
    Central2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Spectral => "spectral",
            Scheme::Central2 => "central2",
        }
    }
}

enum Node {
    Zero,
    Identity,
    Multiply(Vec<Scalar>),
    Momentum { axis: usize, scheme: Scheme },
    Scale(Scalar, ScalarOperator),
    Sum(Vec<ScalarOperator>),
    /// `outer ∘ inner`: the inner operator acts first.
    Compose(ScalarOperator, ScalarOperator),
}

/// Immutable linear map on the fields of one grid. Cloning is cheap.
#[derive(Clone)]
pub struct ScalarOperator {
    grid: Grid,
    node: Arc<Node>,
}

const ONE: Scalar = Scalar::new(1.0, 0.0);

impl ScalarOperator {
    fn from_node(grid: Grid, node: Node) -> Self {
        Self {
            grid,
            node: Arc::new(node),
        }
    }

    pub fn zero(grid: Grid) -> Self {
        Self::from_node(grid, Node::Zero)
    }

    pub fn identity(grid: Grid) -> Self {
        Self::from_node(grid, Node::Identity)
    }

    /// Pointwise multiplication by `field`.
    pub fn multiply(field: &ScalarField) -> Self {
        Self::from_node(*field.grid(), Node::Multiply(field.data().to_vec()))
    }

    /// Momentum `p = -i d/dx_axis` (`axis` counts from 0).
    pub fn momentum(grid: Grid, axis: usize, scheme: Scheme) -> Self {
        assert!(axis < grid.dim(), "axis {axis} out of range for a {}D grid", grid.dim());
        Self::from_node(grid, Node::Momentum { axis, scheme })
    }

    /// `sum_i p_i p_i` over all grid axes.
    pub fn momentum_squared(grid: Grid, scheme: Scheme) -> Self {
        (0..grid.dim())
            .map(|a| {
                let p = Self::momentum(grid, a, scheme);
                p.compose(&p)
            })
            .fold(Self::zero(grid), |acc, t| acc.add(&t))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Structurally zero (no probing involved).
    pub fn is_zero(&self) -> bool {
        matches!(*self.node, Node::Zero)
    }

    pub fn is_identity(&self) -> bool {
        matches!(*self.node, Node::Identity)
    }

    fn same_grid(&self, other: &ScalarOperator) {
        assert_eq!(self.grid, other.grid, "operators live on different grids");
    }

    pub fn add(&self, other: &ScalarOperator) -> ScalarOperator {
        self.same_grid(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut parts = Vec::new();
        for op in [self, other] {
            match &*op.node {
                Node::Sum(inner) => parts.extend(inner.iter().cloned()),
                _ => parts.push(op.clone()),
            }
        }
        Self::from_node(self.grid, Node::Sum(parts))
    }

    pub fn sub(&self, other: &ScalarOperator) -> ScalarOperator {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: Scalar) -> ScalarOperator {
        if c == Scalar::new(0.0, 0.0) || self.is_zero() {
            return Self::zero(self.grid);
        }
        if c == ONE {
            return self.clone();
        }
        if let Node::Scale(c0, inner) = &*self.node {
            return inner.scale(c0 * c);
        }
        Self::from_node(self.grid, Node::Scale(c, self.clone()))
    }

    /// `self ∘ inner`: `inner` is applied first.
    pub fn compose(&self, inner: &ScalarOperator) -> ScalarOperator {
        self.same_grid(inner);
        if self.is_zero() || inner.is_zero() {
            return Self::zero(self.grid);
        }
        if self.is_identity() {
            return inner.clone();
        }
        if inner.is_identity() {
            return self.clone();
        }
        Self::from_node(self.grid, Node::Compose(self.clone(), inner.clone()))
    }

    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        self.grid.ensure_same(f.grid())?;
        Ok(ScalarField::from_vec(self.grid, self.apply_slice(f.data())))
    }

    /// Applies the operator to raw data in the grid layout.
    pub fn apply_slice(&self, f: &[Scalar]) -> Vec<Scalar> {
        debug_assert_eq!(f.len(), self.grid.len());
        match &*self.node {
            Node::Zero => vec![Scalar::new(0.0, 0.0); f.len()],
            Node::Identity => f.to_vec(),
            Node::Multiply(d) => f.iter().zip(d).map(|(a, b)| a * b).collect(),
            Node::Momentum { axis, scheme } => momentum_apply(&self.grid, *axis, *scheme, f),
            Node::Scale(c, op) => {
                let mut out = op.apply_slice(f);
                out.iter_mut().for_each(|v| *v *= c);
                out
            }
            Node::Sum(parts) => {
                let mut out = parts[0].apply_slice(f);
                for p in &parts[1..] {
                    for (o, v) in out.iter_mut().zip(p.apply_slice(f)) {
                        *o += v;
                    }
                }
                out
            }
            Node::Compose(outer, inner) => outer.apply_slice(&inner.apply_slice(f)),
        }
    }

    fn describe(&self, out: &mut String) {
        match &*self.node {
            Node::Zero => out.push('0'),
            Node::Identity => out.push('1'),
            Node::Multiply(_) => out.push_str("mul"),
            Node::Momentum { axis, scheme } => {
                let s = if *scheme == Scheme::Spectral { "" } else { "~" };
                out.push_str(&format!("p{}{s}", ["x", "y", "z"][*axis]));
            }
            Node::Scale(c, op) => {
                out.push_str(&crate::algebra::format_scalar(*c));
                out.push('*');
                op.describe(out);
            }
            Node::Sum(parts) => {
                out.push('(');
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    p.describe(out);
                }
                out.push(')');
            }
            Node::Compose(a, b) => {
                a.describe(out);
                out.push('.');
                b.describe(out);
            }
        }
    }
}

impl fmt::Debug for ScalarOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.describe(&mut s);
        f.write_str(&s)
    }
}

/// Momentum operator along `axis` (0-based).
pub fn momentum_op(grid: &Grid, axis: usize, scheme: Scheme) -> ScalarOperator {
    ScalarOperator::momentum(*grid, axis, scheme)
}

fn momentum_apply(grid: &Grid, axis: usize, scheme: Scheme, f: &[Scalar]) -> Vec<Scalar> {
    match scheme {
        Scheme::Spectral => {
            let mut out = f.to_vec();
            fourier_multiply(grid, &mut out, axis, |m| Scalar::new(grid.wavenumber(m), 0.0));
            out
        }
        Scheme::Central2 => {
            let n = grid.n();
            let s = grid.stride(axis);
            let c = Scalar::new(0.0, -1.0 / (2.0 * grid.spacing()));
            (0..f.len())
                .map(|idx| {
                    let t = (idx / s) % n;
                    let up = if t + 1 < n { idx + s } else { idx + s - n * s };
                    let down = if t > 0 { idx - s } else { idx + (n - 1) * s };
                    c * (f[up] - f[down])
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::cubic(8, 2.0 * PI).unwrap()
    }

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.data().iter().zip(b.data()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn momentum_kills_constants() {
        let g = grid();
        let one = ScalarField::constant(g, ONE);
        for scheme in [Scheme::Spectral, Scheme::Central2] {
            for axis in 0..3 {
                let out = momentum_op(&g, axis, scheme).apply(&one).unwrap();
                assert!(out.max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_momentum_on_plane_wave() {
        let g = grid();
        for k in [-3i32, -1, 0, 2, 3] {
            let wave = ScalarField::from_fn(g, |p| Scalar::new(0.0, f64::from(k) * p[1]).exp());
            let out = momentum_op(&g, 1, Scheme::Spectral).apply(&wave).unwrap();
            assert!(max_diff(&out, &wave.scale(Scalar::new(f64::from(k), 0.0))) < 1e-12);
        }
    }

    #[test]
    fn central_difference_is_second_order() {
        let errs: Vec<f64> = [16usize, 32]
            .iter()
            .map(|&n| {
                let g = Grid::cubic(n, 2.0 * PI).unwrap();
                let f = ScalarField::from_fn(g, |p| Scalar::new(p[2].sin(), 0.0));
                let exact = ScalarField::from_fn(g, |p| Scalar::new(0.0, -p[2].cos()));
                max_diff(&momentum_op(&g, 2, Scheme::Central2).apply(&f).unwrap(), &exact)
            })
            .collect();
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 2.0).abs() < 0.05, "observed order {order}");
    }

    #[test]
    fn momentum_is_hermitian() {
        let g = grid();
        let mut rng = random::rng(1, 0);
        let f = ScalarField::random_localized(g, 3, &mut rng);
        let h = ScalarField::random_localized(g, 3, &mut rng);
        for scheme in [Scheme::Spectral, Scheme::Central2] {
            let p = momentum_op(&g, 0, scheme);
            let lhs = f.inner(&p.apply(&h).unwrap()).unwrap();
            let rhs = p.apply(&f).unwrap().inner(&h).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn momenta_commute() {
        let g = grid();
        let f = ScalarField::random_band_limited(g, 3, &mut random::rng(2, 0));
        let (px, pz) = (momentum_op(&g, 0, Scheme::Spectral), momentum_op(&g, 2, Scheme::Spectral));
        let a = px.compose(&pz).apply(&f).unwrap();
        let b = pz.compose(&px).apply(&f).unwrap();
        assert!(max_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn combinators() {
        let g = grid();
        let f = ScalarField::random_band_limited(g, 2, &mut random::rng(3, 0));
        let v = ScalarField::from_fn(g, |p| Scalar::new(p[0].cos(), 0.0));
        let m = ScalarOperator::multiply(&v);
        let p = momentum_op(&g, 0, Scheme::Spectral);
        // [p, cos x] = i sin x
        let comm = p.compose(&m).sub(&m.compose(&p));
        let expected = f.mul(&ScalarField::from_fn(g, |q| Scalar::new(0.0, q[0].sin()))).unwrap();
        assert!(max_diff(&comm.apply(&f).unwrap(), &expected) < 1e-12);
        assert!(ScalarOperator::zero(g).compose(&p).is_zero());
        assert!(p.scale(Scalar::new(0.0, 0.0)).is_zero());
        let two_p = p.scale(Scalar::new(2.0, 0.0));
        assert!(max_diff(&two_p.apply(&f).unwrap(), &p.apply(&f).unwrap().scale(Scalar::new(2.0, 0.0))) < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let f = ScalarField::zeros(Grid::cubic(4, 1.0).unwrap());
        assert!(ScalarOperator::identity(grid()).apply(&f).is_err());
    }
}

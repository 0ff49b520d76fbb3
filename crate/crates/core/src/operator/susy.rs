//! Potential-derived coefficient fields, the supercharges and the Hamiltonian.

use super::oct::{octop_mul, OctOperator};
use super::scalar::{Scheme, ScalarOperator};
use crate::algebra::SplitUnit;
use crate::error::{Error, Result};
use crate::expr::{eval_on_grid, ScalarExpr, Var};
use crate::grid::{Grid, ScalarField};
use crate::Scalar;

const I: Scalar = Scalar::new(0.0, 1.0);
const HALF: Scalar = Scalar::new(0.5, 0.0);

/// `V`, its gradient, Hessian and Laplacian sampled on a 3D grid.
///
/// Derivatives are symbolic; the Hessian is symmetric because only `j >= i`
/// entries are evaluated, and the Laplacian is the pointwise trace.
#[derive(Debug, Clone)]
pub struct CoefficientFields {
    pub potential: ScalarExpr,
    pub v: ScalarField,
    pub grad: [ScalarField; 3],
    pub hessian: [[ScalarField; 3]; 3],
    pub laplacian: ScalarField,
    /// `sum_j (dV/dx_j)^2`.
    pub grad_squared: ScalarField,
}

pub fn coefficient_fields(v: &ScalarExpr, grid: &Grid) -> Result<CoefficientFields> {
    if grid.dim() != 3 {
        return Err(Error::InvalidGrid(format!("octonionic operators need a 3D grid, got {}D", grid.dim())));
    }
    let field = eval_on_grid(v, grid)?;
    let firsts: Vec<ScalarExpr> = Var::ALL.iter().map(|&x| v.differentiate(x)).collect();
    let grad: [ScalarField; 3] = [
        eval_on_grid(&firsts[0], grid)?,
        eval_on_grid(&firsts[1], grid)?,
        eval_on_grid(&firsts[2], grid)?,
    ];
    let mut upper: Vec<Vec<Option<ScalarField>>> = vec![vec![None, None, None]; 3];
    for i in 0..3 {
        for j in i..3 {
            upper[i][j] = Some(eval_on_grid(&firsts[i].differentiate(Var::from_axis(j)), grid)?);
        }
    }
    let hessian: [[ScalarField; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            upper[a][b].clone().expect("upper triangle evaluated")
        })
    });
    let laplacian = hessian[0][0].add(&hessian[1][1])?.add(&hessian[2][2])?;
    let grad_squared = ScalarField::from_fn(*grid, |_| Scalar::new(0.0, 0.0));
    let grad_squared = grad
        .iter()
        .try_fold(grad_squared, |acc, g| acc.add(&g.mul(g)?))?;
    Ok(CoefficientFields {
        potential: v.clone(),
        v: field,
        grad,
        hessian,
        laplacian,
        grad_squared,
    })
}

impl CoefficientFields {
    pub fn grid(&self) -> &Grid {
        self.v.grid()
    }

    /// `D_i = -p_i + i V_,i`.
    pub fn d(&self, i: usize, scheme: Scheme) -> ScalarOperator {
        let p = ScalarOperator::momentum(*self.grid(), i, scheme);
        p.scale(Scalar::new(-1.0, 0.0)).add(&ScalarOperator::multiply(&self.grad[i]).scale(I))
    }

    /// `Dbar_i = p_i + i V_,i`.
    pub fn dbar(&self, i: usize, scheme: Scheme) -> ScalarOperator {
        let p = ScalarOperator::momentum(*self.grid(), i, scheme);
        p.add(&ScalarOperator::multiply(&self.grad[i]).scale(I))
    }

    /// `p^2 + sum_j V_,j^2 + sign * Laplacian(V)`, written out directly.
    pub fn closed_form_square(&self, scheme: Scheme, sign: f64) -> ScalarOperator {
        ScalarOperator::momentum_squared(*self.grid(), scheme)
            .add(&ScalarOperator::multiply(&self.grad_squared))
            .add(&ScalarOperator::multiply(&self.laplacian).scale(Scalar::new(sign, 0.0)))
    }
}

/// `Q = sum_i D_i ⊗ u_i*`.
pub fn build_q(coeffs: &CoefficientFields, scheme: Scheme) -> OctOperator {
    let terms: Vec<_> = (0..3).map(|i| (SplitUnit::u_star(i + 1), coeffs.d(i, scheme))).collect();
    OctOperator::new(*coeffs.grid(), terms, "Q")
}

/// `Qbar = sum_i Dbar_i ⊗ u_i`.
pub fn build_qbar(coeffs: &CoefficientFields, scheme: Scheme) -> OctOperator {
    let terms: Vec<_> = (0..3).map(|i| (SplitUnit::u(i + 1), coeffs.dbar(i, scheme))).collect();
    OctOperator::new(*coeffs.grid(), terms, "Qbar")
}

/// Both supercharges of one potential.
#[derive(Debug, Clone)]
pub struct Supercharges {
    pub coeffs: CoefficientFields,
    pub scheme: Scheme,
    pub q: OctOperator,
    pub qbar: OctOperator,
}

impl Supercharges {
    pub fn new(v: &ScalarExpr, grid: &Grid, scheme: Scheme) -> Result<Self> {
        let coeffs = coefficient_fields(v, grid)?;
        Ok(Self::from_coefficients(coeffs, scheme))
    }

    pub fn from_coefficients(coeffs: CoefficientFields, scheme: Scheme) -> Self {
        let q = build_q(&coeffs, scheme);
        let qbar = build_qbar(&coeffs, scheme);
        Self { coeffs, scheme, q, qbar }
    }

    pub fn hamiltonian(&self) -> Hamiltonian {
        hamiltonian(&self.q, &self.qbar)
    }

    /// `H` assembled from `H± = (p^2 + |grad V|^2 ± Laplacian(V)) / 2` with the
    /// derivatives of `V` taken symbolically.
    ///
    /// Equal to [`Supercharges::hamiltonian`] when the derivatives of `V` are
    /// periodic on the box. For a confining `V` the operator products in the
    /// factored form differentiate the jump of `grad V` across the box faces,
    /// which binds spurious states there; eigenvalue problems use this form.
    pub fn closed_form_hamiltonian(&self) -> Hamiltonian {
        let half = |sign: f64| self.coeffs.closed_form_square(self.scheme, sign).scale(HALF);
        let (h_plus, h_minus) = (half(1.0), half(-1.0));
        Hamiltonian {
            h: OctOperator::new(
                *self.coeffs.grid(),
                vec![(SplitUnit::U0c, h_plus.clone()), (SplitUnit::U0, h_minus.clone())],
                "H",
            ),
            h_plus,
            h_minus,
        }
    }
}

/// `H = (Qbar Q + Q Qbar) / 2` and its two diagonal blocks.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub h: OctOperator,
    /// Coefficient of `u0*`.
    pub h_plus: ScalarOperator,
    /// Coefficient of `u0`.
    pub h_minus: ScalarOperator,
}

pub fn hamiltonian(q: &OctOperator, qbar: &OctOperator) -> Hamiltonian {
    let h = octop_mul(qbar, q).add(&octop_mul(q, qbar)).scale(HALF).named("H");
    let pick = |u| h.term(u).cloned().unwrap_or_else(|| ScalarOperator::zero(*h.grid()));
    Hamiltonian {
        h_plus: pick(SplitUnit::U0c),
        h_minus: pick(SplitUnit::U0),
        h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar_expr;
    use crate::operator::oct::{octop_apply, OctField};
    use crate::random;
    use std::f64::consts::PI;
    use SplitUnit::*;

    fn max_diff(a: &[Scalar], b: &[Scalar]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn harmonic_coefficients() {
        let g = Grid::cubic(4, 4.0).unwrap();
        let c = coefficient_fields(&parse_scalar_expr("0.5*(x^2+y^2+z^2)").unwrap(), &g).unwrap();
        for idx in 0..g.len() {
            let p = g.point(idx);
            for a in 0..3 {
                assert_eq!(c.grad[a].data()[idx].re, p[a]);
            }
            assert_eq!(c.laplacian.data()[idx].re, 3.0);
        }
    }

    #[test]
    fn cosine_hessian() {
        let g = Grid::cubic(4, 2.0 * PI).unwrap();
        let c = coefficient_fields(&parse_scalar_expr("cos(x)").unwrap(), &g).unwrap();
        for idx in 0..g.len() {
            let p = g.point(idx);
            assert!((c.hessian[0][0].data()[idx].re + p[0].cos()).abs() < 1e-15);
            for (i, j) in [(0, 1), (1, 1), (1, 2), (2, 2), (0, 2)] {
                assert_eq!(c.hessian[i][j].data()[idx].norm(), 0.0);
            }
            let trace: Scalar = (0..3).map(|i| c.hessian[i][i].data()[idx]).sum();
            assert_eq!(trace, c.laplacian.data()[idx]);
        }
    }

    #[test]
    fn one_dimensional_grid_is_rejected() {
        let g = Grid::line(8, 1.0).unwrap();
        assert!(matches!(
            coefficient_fields(&parse_scalar_expr("x").unwrap(), &g),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn supercharge_shapes() {
        let g = Grid::cubic(4, 2.0 * PI).unwrap();
        let s = Supercharges::new(&parse_scalar_expr("0").unwrap(), &g, Scheme::Spectral).unwrap();
        assert_eq!(s.q.support(), vec![U1c, U2c, U3c]);
        assert_eq!(s.qbar.support(), vec![U1, U2, U3]);
        assert_eq!(s.q.term_count(), 3);
        // Q acting on a u0* field only reaches the u_i* components.
        let f = OctField::single(U0c, &ScalarField::random_band_limited(g, 1, &mut random::rng(1, 0)));
        let out = octop_apply(&s.q, &f).unwrap();
        for u in [U0, U0c, U1, U2, U3] {
            assert_eq!(out.component(u).iter().map(|v| v.norm()).sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn closed_form_matches_factored_for_periodic_v() {
        let g = Grid::cubic(16, 2.0 * PI).unwrap();
        let s = Supercharges::new(&parse_scalar_expr("cos(x) + cos(y) + cos(z)").unwrap(), &g, Scheme::Spectral).unwrap();
        let (a, b) = (s.hamiltonian(), s.closed_form_hamiltonian());
        let mut rng = random::rng(5, 0);
        let f = crate::grid::ScalarField::random_band_limited(g, 3, &mut rng);
        for (x, y) in [(&a.h_plus, &b.h_plus), (&a.h_minus, &b.h_minus)] {
            let (u, v) = (x.apply(&f).unwrap(), y.apply(&f).unwrap());
            assert!(u.sub(&v).unwrap().norm() <= 1e-12 * u.norm());
        }
    }

    #[test]
    fn hamiltonian_blocks() {
        let g = Grid::cubic(8, 2.0 * PI).unwrap();
        let s = Supercharges::new(&parse_scalar_expr("cos(x) + sin(2*y)").unwrap(), &g, Scheme::Spectral).unwrap();
        let h = s.hamiltonian();
        assert_eq!(h.h.support(), vec![U0, U0c]);
        let f = ScalarField::random_band_limited(g, 1, &mut random::rng(2, 0));
        let diff = h.h_plus.sub(&h.h_minus).apply(&f).unwrap();
        let expected = f.mul(&s.coeffs.laplacian).unwrap();
        assert!(max_diff(diff.data(), expected.data()) < 1e-12 * (1.0 + expected.max_abs()));
    }

    #[test]
    fn free_hamiltonian_is_half_p_squared() {
        let g = Grid::cubic(8, 2.0 * PI).unwrap();
        let s = Supercharges::new(&parse_scalar_expr("0").unwrap(), &g, Scheme::Spectral).unwrap();
        let h = s.hamiltonian();
        let f = ScalarField::random_band_limited(g, 2, &mut random::rng(3, 0));
        let half_p2 = ScalarOperator::momentum_squared(g, Scheme::Spectral).scale(HALF).apply(&f).unwrap();
        for op in [&h.h_plus, &h.h_minus] {
            assert!(max_diff(op.apply(&f).unwrap().data(), half_p2.data()) < 1e-12 * half_p2.max_abs());
        }
    }
}

//! Operators with split-octonion coefficients and the fields they act on.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::scalar::ScalarOperator;
use crate::algebra::{format_scalar, split_table, Basis, Octonion, SplitUnit};
use crate::error::Result;
use crate::grid::{raw_inner, raw_norm_sqr, Grid, ScalarField};
use crate::Scalar;

/// Record of how a composite operator was assembled. Products are binary and
/// keep the nesting of the calls that built them.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Grouping {
    Leaf { name: String },
    Product { lhs: Arc<Grouping>, rhs: Arc<Grouping> },
    Sum { lhs: Arc<Grouping>, rhs: Arc<Grouping> },
    Difference { lhs: Arc<Grouping>, rhs: Arc<Grouping> },
    Scaled { factor: String, inner: Arc<Grouping> },
}

impl Grouping {
    pub fn leaf(name: impl Into<String>) -> Self {
        Grouping::Leaf { name: name.into() }
    }

    /// Nesting depth of products; leaves have depth 0.
    pub fn product_depth(&self) -> usize {
        match self {
            Grouping::Leaf { .. } => 0,
            Grouping::Product { lhs, rhs } => 1 + lhs.product_depth().max(rhs.product_depth()),
            Grouping::Sum { lhs, rhs } | Grouping::Difference { lhs, rhs } => {
                lhs.product_depth().max(rhs.product_depth())
            }
            Grouping::Scaled { inner, .. } => inner.product_depth(),
        }
    }
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grouping::Leaf { name } => f.write_str(name),
            Grouping::Product { lhs, rhs } => write!(f, "({lhs}*{rhs})"),
            Grouping::Sum { lhs, rhs } => write!(f, "({lhs} + {rhs})"),
            Grouping::Difference { lhs, rhs } => write!(f, "({lhs} - {rhs})"),
            Grouping::Scaled { factor, inner } => write!(f, "{factor}*{inner}"),
        }
    }
}

/// `sum_e e ⊗ S_e` over split basis elements `e`, with at most one scalar
/// operator per element.
#[derive(Clone)]
pub struct OctOperator {
    grid: Grid,
    terms: [Option<ScalarOperator>; 8],
    grouping: Grouping,
}

impl OctOperator {
    /// Builds a canonical operator, summing repeated basis elements and
    /// dropping structurally zero terms.
    pub fn new(grid: Grid, terms: impl IntoIterator<Item = (SplitUnit, ScalarOperator)>, name: &str) -> Self {
        let mut slots: [Option<ScalarOperator>; 8] = Default::default();
        for (u, op) in terms {
            assert_eq!(op.grid(), &grid, "term lives on a different grid");
            let slot = &mut slots[u.index()];
            *slot = Some(match slot.take() {
                Some(prev) => prev.add(&op),
                None => op,
            });
        }
        for slot in &mut slots {
            if slot.as_ref().is_some_and(|op| op.is_zero()) {
                *slot = None;
            }
        }
        Self {
            grid,
            terms: slots,
            grouping: Grouping::leaf(name),
        }
    }

    pub fn zero(grid: Grid) -> Self {
        Self::new(grid, [], "0")
    }

    /// `S ⊗ 1`, with the unit written as `u0 + u0*`.
    pub fn from_scalar(op: &ScalarOperator, name: &str) -> Self {
        Self::new(*op.grid(), [(SplitUnit::U0, op.clone()), (SplitUnit::U0c, op.clone())], name)
    }

    /// `S ⊗ e` for one basis element.
    pub fn single(unit: SplitUnit, op: &ScalarOperator, name: &str) -> Self {
        Self::new(*op.grid(), [(unit, op.clone())], name)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grouping(&self) -> &Grouping {
        &self.grouping
    }

    /// Same operator under a new leaf name.
    pub fn named(&self, name: &str) -> Self {
        Self {
            grouping: Grouping::leaf(name),
            ..self.clone()
        }
    }

    pub fn term(&self, unit: SplitUnit) -> Option<&ScalarOperator> {
        self.terms[unit.index()].as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (SplitUnit, &ScalarOperator)> {
        self.terms
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.as_ref().map(|op| (SplitUnit::from_index(i), op)))
    }

    pub fn support(&self) -> Vec<SplitUnit> {
        self.terms().map(|(u, _)| u).collect()
    }

    pub fn term_count(&self) -> usize {
        self.terms().count()
    }

    fn combine(&self, other: &OctOperator, sign: Scalar, grouping: Grouping) -> OctOperator {
        self.grid.ensure_same(&other.grid).expect("operators live on different grids");
        let terms = self
            .terms()
            .map(|(u, op)| (u, op.clone()))
            .chain(other.terms().map(|(u, op)| (u, op.scale(sign))));
        let mut out = OctOperator::new(self.grid, terms.collect::<Vec<_>>(), "");
        out.grouping = grouping;
        out
    }

    pub fn add(&self, other: &OctOperator) -> OctOperator {
        let g = Grouping::Sum {
            lhs: Arc::new(self.grouping.clone()),
            rhs: Arc::new(other.grouping.clone()),
        };
        self.combine(other, Scalar::new(1.0, 0.0), g)
    }

    pub fn sub(&self, other: &OctOperator) -> OctOperator {
        let g = Grouping::Difference {
            lhs: Arc::new(self.grouping.clone()),
            rhs: Arc::new(other.grouping.clone()),
        };
        self.combine(other, Scalar::new(-1.0, 0.0), g)
    }

    pub fn scale(&self, c: Scalar) -> OctOperator {
        let terms: Vec<_> = self.terms().map(|(u, op)| (u, op.scale(c))).collect();
        let mut out = OctOperator::new(self.grid, terms, "");
        out.grouping = Grouping::Scaled {
            factor: format_scalar(c),
            inner: Arc::new(self.grouping.clone()),
        };
        out
    }
}

impl fmt::Debug for OctOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_struct("OctOperator");
        m.field("grouping", &self.grouping.to_string());
        for (u, op) in self.terms() {
            m.field(u.name(), op);
        }
        m.finish()
    }
}

/// Binary product: basis elements multiply through the split table and the
/// scalar parts compose with `b`'s acting first.
pub fn octop_mul(a: &OctOperator, b: &OctOperator) -> OctOperator {
    a.grid.ensure_same(&b.grid).expect("operators live on different grids");
    let table = split_table();
    let mut terms = Vec::new();
    for (ua, sa) in a.terms() {
        for (ub, sb) in b.terms() {
            if let Some((sign, c)) = table[ua.index()][ub.index()] {
                terms.push((SplitUnit::from_index(c), sa.compose(sb).scale(Scalar::new(f64::from(sign), 0.0))));
            }
        }
    }
    let mut out = OctOperator::new(a.grid, terms, "");
    out.grouping = Grouping::Product {
        lhs: Arc::new(a.grouping.clone()),
        rhs: Arc::new(b.grouping.clone()),
    };
    out
}

/// The individual nonvanishing term-pair products that [`octop_mul`] sums.
pub fn product_pieces(a: &OctOperator, b: &OctOperator) -> Vec<OctOperator> {
    let table = split_table();
    let mut out = Vec::new();
    for (ua, sa) in a.terms() {
        for (ub, sb) in b.terms() {
            if let Some((sign, c)) = table[ua.index()][ub.index()] {
                let op = sa.compose(sb).scale(Scalar::new(f64::from(sign), 0.0));
                out.push(OctOperator::single(SplitUnit::from_index(c), &op, &format!("{}{}", ua.name(), ub.name())));
            }
        }
    }
    out
}

/// `ab - ba`, each product formed by [`octop_mul`].
pub fn octop_commutator(a: &OctOperator, b: &OctOperator) -> OctOperator {
    octop_mul(a, b).sub(&octop_mul(b, a))
}

/// Octonion-valued grid function stored as eight split-basis components.
#[derive(Debug, Clone, PartialEq)]
pub struct OctField {
    grid: Grid,
    comps: [Vec<Scalar>; 8],
}

impl OctField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            comps: std::array::from_fn(|_| vec![Scalar::new(0.0, 0.0); grid.len()]),
        }
    }

    pub fn from_fields(fields: [ScalarField; 8]) -> Result<Self> {
        let grid = *fields[0].grid();
        for f in &fields[1..] {
            grid.ensure_same(f.grid())?;
        }
        Ok(Self {
            grid,
            comps: fields.map(ScalarField::into_vec),
        })
    }

    /// `field ⊗ unit`.
    pub fn single(unit: SplitUnit, field: &ScalarField) -> Self {
        let mut out = Self::zeros(*field.grid());
        out.comps[unit.index()] = field.data().to_vec();
        out
    }

    /// Every component drawn by [`ScalarField::random_band_limited`].
    pub fn random_band_limited(grid: Grid, band: usize, rng: &mut impl Rng) -> Self {
        Self {
            grid,
            comps: std::array::from_fn(|_| ScalarField::random_band_limited(grid, band, rng).into_vec()),
        }
    }

    /// Every component drawn by [`ScalarField::random_localized`].
    pub fn random_localized(grid: Grid, band: usize, rng: &mut impl Rng) -> Self {
        Self {
            grid,
            comps: std::array::from_fn(|_| ScalarField::random_localized(grid, band, rng).into_vec()),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, unit: SplitUnit) -> &[Scalar] {
        &self.comps[unit.index()]
    }

    pub fn component_mut(&mut self, unit: SplitUnit) -> &mut [Scalar] {
        &mut self.comps[unit.index()]
    }

    pub fn component_field(&self, unit: SplitUnit) -> ScalarField {
        ScalarField::from_vec(self.grid, self.comps[unit.index()].clone())
    }

    /// Value at node `idx` as a split-basis octonion.
    pub fn value_at(&self, idx: usize) -> Octonion {
        Octonion::new(std::array::from_fn(|c| self.comps[c][idx]), Basis::Split)
    }

    /// Grid-weighted L2 norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.comps.iter().map(|c| raw_norm_sqr(c)).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    /// Grid-weighted inner product of coefficient vectors.
    pub fn inner(&self, other: &OctField) -> Result<Scalar> {
        self.grid.ensure_same(&other.grid)?;
        let s: Scalar = self.comps.iter().zip(&other.comps).map(|(a, b)| raw_inner(a, b)).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn axpy(&mut self, c: Scalar, x: &OctField) {
        for (a, b) in self.comps.iter_mut().zip(&x.comps) {
            for (p, q) in a.iter_mut().zip(b) {
                *p += c * q;
            }
        }
    }

    pub fn sub(&self, other: &OctField) -> OctField {
        let mut out = self.clone();
        out.axpy(Scalar::new(-1.0, 0.0), other);
        out
    }

    pub fn scale(&self, c: Scalar) -> OctField {
        let mut out = self.clone();
        out.comps.iter_mut().flatten().for_each(|v| *v *= c);
        out
    }

    fn is_component_zero(&self, c: usize) -> bool {
        self.comps[c].iter().all(|v| *v == Scalar::new(0.0, 0.0))
    }
}

fn apply_sided(a: &OctOperator, f: &OctField, right: bool) -> Result<OctField> {
    a.grid.ensure_same(&f.grid)?;
    let table = split_table();
    let mut out = OctField::zeros(f.grid);
    for (u, op) in a.terms() {
        for b in 0..8 {
            let prod = if right { table[b][u.index()] } else { table[u.index()][b] };
            let Some((sign, c)) = prod else { continue };
            if f.is_component_zero(b) {
                continue;
            }
            let image = op.apply_slice(&f.comps[b]);
            let s = f64::from(sign);
            for (o, v) in out.comps[c].iter_mut().zip(image) {
                *o += s * v;
            }
        }
    }
    Ok(out)
}

/// `A f = sum_{e,b} (e b) (S_e f_b)`: basis elements multiply from the left.
pub fn octop_apply(a: &OctOperator, f: &OctField) -> Result<OctField> {
    apply_sided(a, f, false)
}

/// `f A = sum_{e,b} (b e) (S_e f_b)`: basis elements multiply from the right.
pub fn octop_apply_right(a: &OctOperator, f: &OctField) -> Result<OctField> {
    apply_sided(a, f, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use std::f64::consts::PI;
    use SplitUnit::*;

    fn grid() -> Grid {
        Grid::cubic(4, 2.0 * PI).unwrap()
    }

    fn bump(g: Grid) -> ScalarField {
        ScalarField::random_band_limited(g, 1, &mut random::rng(9, 0))
    }

    #[test]
    fn identity_operator_leaves_fields_unchanged() {
        let g = grid();
        let one = OctOperator::from_scalar(&ScalarOperator::identity(g), "1");
        let f = OctField::random_band_limited(g, 1, &mut random::rng(1, 0));
        assert_eq!(octop_apply(&one, &f).unwrap(), f);
        assert_eq!(octop_apply_right(&one, &f).unwrap(), f);
    }

    #[test]
    fn left_multiplication_follows_table() {
        let g = grid();
        let id = ScalarOperator::identity(g);
        let f = OctField::single(U0c, &bump(g));
        let keep = octop_apply(&OctOperator::single(U0c, &id, "u0c"), &f).unwrap();
        assert_eq!(keep, f);
        let moved = octop_apply(&OctOperator::single(U1, &id, "u1"), &f).unwrap();
        assert_eq!(moved.component(U1), f.component(U0c));
        assert_eq!(moved.norm(), f.norm());
        let killed = octop_apply(&OctOperator::single(U0, &id, "u0"), &f).unwrap();
        assert_eq!(killed.max_abs(), 0.0);
    }

    #[test]
    fn canonical_terms_are_summed() {
        let g = grid();
        let id = ScalarOperator::identity(g);
        let op = OctOperator::new(g, [(U1, id.clone()), (U1, id.scale(Scalar::new(2.0, 0.0)))], "t");
        assert_eq!(op.term_count(), 1);
        let f = OctField::single(U0c, &bump(g));
        let out = octop_apply(&op, &f).unwrap();
        let expected: Vec<Scalar> = f.component(U0c).iter().map(|v| v * 3.0).collect();
        assert_eq!(out.component(U1), &expected[..]);
    }

    #[test]
    fn products_keep_grouping() {
        let g = grid();
        let id = ScalarOperator::identity(g);
        let a = OctOperator::single(U1, &id, "a");
        let b = OctOperator::single(U2, &id, "b");
        let c = OctOperator::single(U3, &id, "c");
        let left = octop_mul(&octop_mul(&a, &b), &c);
        let right = octop_mul(&a, &octop_mul(&b, &c));
        assert_eq!(left.grouping().to_string(), "((a*b)*c)");
        assert_eq!(right.grouping().to_string(), "(a*(b*c))");
        assert_eq!(left.support(), vec![U0c]);
        assert_eq!(right.support(), vec![U0]);
        assert_eq!(left.grouping().product_depth(), 2);
    }

    #[test]
    fn product_pieces_sum_to_product() {
        let g = grid();
        let id = ScalarOperator::identity(g);
        let a = OctOperator::new(g, [(U1, id.clone()), (U2c, id.clone())], "a");
        let b = OctOperator::new(g, [(U2, id.clone()), (U1c, id.clone()), (U0c, id.clone())], "b");
        let f = OctField::random_band_limited(g, 1, &mut random::rng(4, 0));
        let whole = octop_apply(&octop_mul(&a, &b), &f).unwrap();
        let mut sum = OctField::zeros(g);
        for p in product_pieces(&a, &b) {
            sum.axpy(Scalar::new(1.0, 0.0), &octop_apply(&p, &f).unwrap());
        }
        assert!(whole.sub(&sum).max_abs() < 1e-14);
    }

    #[test]
    fn pointwise_action_matches_algebra() {
        let g = grid();
        let mut rng = random::rng(5, 0);
        let coeff = random::octonion(&mut rng, Basis::Split, random::ScalarMode::Complex);
        let terms: Vec<_> = SplitUnit::ALL
            .iter()
            .map(|&u| (u, ScalarOperator::identity(g).scale(coeff.coeff(u.index()))))
            .collect();
        let op = OctOperator::new(g, terms, "c");
        let f = OctField::random_band_limited(g, 1, &mut rng);
        let left = octop_apply(&op, &f).unwrap();
        let right = octop_apply_right(&op, &f).unwrap();
        for idx in [0, 7, 33] {
            assert!(left.value_at(idx).distance(&coeff.mul_oct(&f.value_at(idx))) < 1e-14);
            assert!(right.value_at(idx).distance(&f.value_at(idx).mul_oct(&coeff)) < 1e-14);
        }
    }

    #[test]
    fn grid_mismatch() {
        let op = OctOperator::zero(grid());
        let f = OctField::zeros(Grid::cubic(8, 1.0).unwrap());
        assert!(octop_apply(&op, &f).is_err());
    }
}

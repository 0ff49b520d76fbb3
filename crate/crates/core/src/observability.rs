//! Representable wavefunctions and the observable/unobservable classification.
//!
//! In Zorn form a ket `Psi = (psi1, 0; psi2, 0)` occupies the upper-left scalar
//! and lower-left vector blocks, i.e. the split components
//! `psi1 u0* + sum_i psi2_i u_i`. A bra `(xi1, xi2; 0, 0)` occupies the top
//! row: `xi1 u0* - sum_i xi2_i u_i*`. An element or operator is observable when
//! its left action keeps kets representable and its right action keeps bras
//! representable.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{format_scalar, split_table, Basis, Octonion, SplitUnit};
use crate::error::Result;
use crate::grid::{Grid, ScalarField};
use crate::operator::{octop_apply, octop_apply_right, OctField, OctOperator};
use crate::{random, Scalar};

/// Relative leak above which an output counts as non-representable.
pub const REPRESENTABLE_TOL: f64 = 1e-12;

/// Which representable subspace is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Columns, acted on from the left.
    Ket,
    /// Rows, acted on from the right.
    Bra,
}

impl Side {
    /// Split units spanning the subspace, in `(slot1, slot2_x, slot2_y, slot2_z)` order.
    pub fn units(self) -> [SplitUnit; 4] {
        use SplitUnit::*;
        match self {
            Side::Ket => [U0c, U1, U2, U3],
            Side::Bra => [U0c, U1c, U2c, U3c],
        }
    }

    /// Coefficient of each unit in terms of the wavefunction slot.
    fn signs(self) -> [f64; 4] {
        match self {
            Side::Ket => [1.0, 1.0, 1.0, 1.0],
            Side::Bra => [1.0, -1.0, -1.0, -1.0],
        }
    }

    fn contains(self, unit: SplitUnit) -> bool {
        self.units().contains(&unit)
    }
}

/// Zorn column (or row) wavefunction on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub psi1: ScalarField,
    pub psi2: [ScalarField; 3],
}

impl WaveFunction {
    pub fn new(psi1: ScalarField, psi2: [ScalarField; 3]) -> Result<Self> {
        for f in &psi2 {
            psi1.grid().ensure_same(f.grid())?;
        }
        Ok(Self { psi1, psi2 })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            psi1: ScalarField::zeros(grid),
            psi2: std::array::from_fn(|_| ScalarField::zeros(grid)),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.psi1.grid()
    }

    fn slots(&self) -> [&ScalarField; 4] {
        [&self.psi1, &self.psi2[0], &self.psi2[1], &self.psi2[2]]
    }

    /// Embeds the wavefunction as an octonion field on `side`.
    pub fn to_oct_field(&self, side: Side) -> OctField {
        let mut out = OctField::zeros(*self.grid());
        for ((unit, sign), slot) in side.units().into_iter().zip(side.signs()).zip(self.slots()) {
            for (o, v) in out.component_mut(unit).iter_mut().zip(slot.data()) {
                *o = sign * v;
            }
        }
        out
    }

    /// Reads the representable part of `f` on `side`, discarding the rest.
    pub fn from_oct_field(f: &OctField, side: Side) -> Self {
        let [a, b, c, d] = std::array::from_fn(|s| {
            let sign = side.signs()[s];
            let data = f.component(side.units()[s]).iter().map(|v| sign * v).collect();
            ScalarField::from_vec(*f.grid(), data)
        });
        Self { psi1: a, psi2: [b, c, d] }
    }

    pub fn random(grid: Grid, band: usize, rng: &mut impl Rng) -> Self {
        Self {
            psi1: ScalarField::random_band_limited(grid, band, rng),
            psi2: std::array::from_fn(|_| ScalarField::random_band_limited(grid, band, rng)),
        }
    }
}

/// Outcome of a representability test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Representability {
    pub representable: bool,
    /// Norm outside the subspace over total norm (0 for the zero field).
    pub deviation: f64,
}

/// Whether `f` is a ket: the upper-right vector and lower-right scalar blocks
/// (the `u0` and `u_i*` components) vanish.
pub fn is_representable(f: &OctField) -> Representability {
    representability(f, Side::Ket)
}

/// Whether `f` is a bra: only the top Zorn row (`u0*` and `u_i*`) is occupied.
pub fn is_representable_bra(f: &OctField) -> Representability {
    representability(f, Side::Bra)
}

fn representability(f: &OctField, side: Side) -> Representability {
    let mut inside = 0.0;
    let mut outside = 0.0;
    for u in SplitUnit::ALL {
        let s: f64 = f.component(u).iter().map(|v| v.norm_sqr()).sum();
        if side.contains(u) {
            inside += s;
        } else {
            outside += s;
        }
    }
    let total = inside + outside;
    let deviation = if total == 0.0 { 0.0 } else { (outside / total).sqrt() };
    Representability {
        representable: deviation <= REPRESENTABLE_TOL,
        deviation,
    }
}

/// `<Xi, Psi> = sum (conj(xi1) psi1 + conj(xi2) . psi2) h^3`.
pub fn scalar_product(xi: &WaveFunction, psi: &WaveFunction) -> Result<Scalar> {
    let mut s = xi.psi1.inner(&psi.psi1)?;
    for (a, b) in xi.psi2.iter().zip(&psi.psi2) {
        s += a.inner(b)?;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Preserves,
    Violates,
}

/// Input slot whose image leaves the subspace, and the image itself.
#[derive(Debug, Clone, Serialize)]
pub struct BasisWitness {
    /// `psi1`, `psi2_x`, `psi2_y` or `psi2_z` set to 1, the rest 0.
    pub input: String,
    /// Image in the split basis.
    pub image: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SideAction {
    pub verdict: Verdict,
    /// 4x4 matrix on `(slot1, slot2_x, slot2_y, slot2_z)` when preserved.
    pub action: Option<[[Scalar; 4]; 4]>,
    pub witness: Option<BasisWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ElementClassification {
    pub element: String,
    pub value: String,
    pub ket: SideAction,
    pub bra: SideAction,
    /// `Preserves` only when both sides do.
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub elements: Vec<ElementClassification>,
}

impl ClassificationReport {
    pub fn get(&self, element: &str) -> Option<&ElementClassification> {
        self.elements.iter().find(|e| e.element == element)
    }
}

const SLOT_NAMES: [&str; 4] = ["psi1", "psi2_x", "psi2_y", "psi2_z"];

/// Exact action of multiplication by `x` on one side, from the table.
///
/// Linearity means checking the four unit inputs decides the question for
/// every representable input.
pub fn classify_side(x: &Octonion, side: Side) -> SideAction {
    let x = x.to_split();
    let table = split_table();
    let mut action = [[Scalar::new(0.0, 0.0); 4]; 4];
    for (col, (&unit, sign_in)) in side.units().iter().zip(side.signs()).enumerate() {
        let mut image = [Scalar::new(0.0, 0.0); 8];
        for e in 0..8 {
            let c = x.coeff(e);
            if c == Scalar::new(0.0, 0.0) {
                continue;
            }
            let prod = match side {
                Side::Ket => table[e][unit.index()],
                Side::Bra => table[unit.index()][e],
            };
            if let Some((s, out)) = prod {
                image[out] += c * f64::from(s) * sign_in;
            }
        }
        let leaks = SplitUnit::ALL
            .iter()
            .any(|&u| !side.contains(u) && image[u.index()] != Scalar::new(0.0, 0.0));
        if leaks {
            return SideAction {
                verdict: Verdict::Violates,
                action: None,
                witness: Some(BasisWitness {
                    input: SLOT_NAMES[col].into(),
                    image: Octonion::new(image, Basis::Split).to_string(),
                }),
            };
        }
        for (row, (&u, sign_out)) in side.units().iter().zip(side.signs()).enumerate() {
            action[row][col] = image[u.index()] * sign_out;
        }
    }
    SideAction {
        verdict: Verdict::Preserves,
        action: Some(action),
        witness: None,
    }
}

/// Classifies multiplication by `x` on kets and bras.
pub fn classify_element(name: &str, x: &Octonion) -> ElementClassification {
    let ket = classify_side(x, Side::Ket);
    let bra = classify_side(x, Side::Bra);
    let verdict = if ket.verdict == Verdict::Preserves && bra.verdict == Verdict::Preserves {
        Verdict::Preserves
    } else {
        Verdict::Violates
    };
    ElementClassification {
        element: name.into(),
        value: x.to_split().to_string(),
        ket,
        bra,
        verdict,
    }
}

/// The named elements `1, i e7, -i e7, u0, u0*, u_i, u_i*`.
pub fn named_elements() -> Vec<(String, Octonion)> {
    let i = Scalar::new(0.0, 1.0);
    let ie7 = Octonion::real_unit(7).scale(i);
    let mut out = vec![
        ("1".to_string(), Octonion::one(Basis::Split)),
        ("i*e7".to_string(), ie7),
        ("-i*e7".to_string(), ie7.scale(Scalar::new(-1.0, 0.0))),
        ("u0".to_string(), Octonion::split_unit(SplitUnit::U0)),
        ("u0*".to_string(), Octonion::split_unit(SplitUnit::U0c)),
    ];
    for k in 1..=3 {
        out.push((format!("u{k}"), Octonion::split_unit(SplitUnit::u(k))));
    }
    for k in 1..=3 {
        out.push((format!("u{k}*"), Octonion::split_unit(SplitUnit::u_star(k))));
    }
    out
}

pub fn classify_basis_actions() -> ClassificationReport {
    ClassificationReport {
        elements: named_elements().iter().map(|(n, x)| classify_element(n, x)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Observability {
    Observable,
    Unobservable,
}

/// Probe that pushed an operator out of the representable subspace.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorWitness {
    pub probe: String,
    pub deviation: f64,
    /// Split components carrying the leaked weight.
    pub leaked_components: Vec<String>,
    #[serde(skip)]
    pub wavefunction: WaveFunction,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorSide {
    pub preserves: bool,
    pub probes: usize,
    pub max_deviation: f64,
    pub witness: Option<OperatorWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorClassification {
    pub operator: String,
    pub ket: OperatorSide,
    pub bra: OperatorSide,
    pub verdict: Observability,
}

/// Number of random probes in [`classify_octop`], besides the structured ones.
pub const RANDOM_PROBES: usize = 8;
const CLASSIFY_STREAM: u64 = 5000;

fn probe_set(grid: Grid, seed: u64) -> Vec<(String, WaveFunction)> {
    let band = ((grid.n() - 1) / 2).min(2);
    let mut out = Vec::new();
    let mut rng = random::rng(seed, CLASSIFY_STREAM);
    let shared = ScalarField::random_band_limited(grid, band, &mut rng);
    for (slot, name) in SLOT_NAMES.iter().enumerate() {
        let mut w = WaveFunction::zeros(grid);
        match slot {
            0 => w.psi1 = shared.clone(),
            k => w.psi2[k - 1] = shared.clone(),
        }
        out.push((format!("structured {name}"), w));
    }
    for k in 0..RANDOM_PROBES {
        let mut rng = random::rng(seed, CLASSIFY_STREAM + 1 + k as u64);
        out.push((format!("random #{k}"), WaveFunction::random(grid, band, &mut rng)));
    }
    out
}

fn classify_octop_side(a: &OctOperator, side: Side, probes: &[(String, WaveFunction)]) -> Result<OperatorSide> {
    let mut max_dev = 0.0f64;
    let mut witness: Option<OperatorWitness> = None;
    for (name, w) in probes {
        let f = w.to_oct_field(side);
        let out = match side {
            Side::Ket => octop_apply(a, &f)?,
            Side::Bra => octop_apply_right(a, &f)?,
        };
        let rep = representability(&out, side);
        if rep.deviation > max_dev {
            max_dev = rep.deviation;
            if !rep.representable {
                let leaked_components = SplitUnit::ALL
                    .iter()
                    .filter(|&&u| !side.contains(u) && out.component(u).iter().any(|v| v.norm() > 0.0))
                    .map(|u| u.name().to_string())
                    .collect();
                witness = Some(OperatorWitness {
                    probe: name.clone(),
                    deviation: rep.deviation,
                    leaked_components,
                    wavefunction: w.clone(),
                });
            }
        }
    }
    Ok(OperatorSide {
        preserves: witness.is_none(),
        probes: probes.len(),
        max_deviation: max_dev,
        witness,
    })
}

/// Probes `a` with representable kets (left action) and bras (right action).
pub fn classify_octop(a: &OctOperator, seed: u64) -> Result<OperatorClassification> {
    let probes = probe_set(*a.grid(), seed);
    let ket = classify_octop_side(a, Side::Ket, &probes)?;
    let bra = classify_octop_side(a, Side::Bra, &probes)?;
    let verdict = if ket.preserves && bra.preserves {
        Observability::Observable
    } else {
        Observability::Unobservable
    };
    Ok(OperatorClassification {
        operator: a.grouping().to_string(),
        ket,
        bra,
        verdict,
    })
}

/// Human-readable rendering of an action matrix.
pub fn format_action(m: &[[Scalar; 4]; 4]) -> String {
    m.iter()
        .map(|row| row.iter().map(|c| format_scalar(*c)).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::to_zorn;
    use crate::expr::parse_scalar_expr;
    use crate::operator::{octop_mul, ScalarOperator, Scheme, Supercharges};
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::cubic(8, 2.0 * PI).unwrap()
    }

    fn c(re: f64) -> Scalar {
        Scalar::new(re, 0.0)
    }

    #[test]
    fn representability_examples() {
        let g = grid();
        let f = ScalarField::random_band_limited(g, 1, &mut random::rng(1, 0));
        let ket = OctField::single(SplitUnit::U0c, &f);
        assert_eq!(is_representable(&ket).deviation, 0.0);
        let bad = OctField::single(SplitUnit::U2c, &f);
        let r = is_representable(&bad);
        assert!(!r.representable);
        assert_eq!(r.deviation, 1.0);
        let zero = is_representable(&OctField::zeros(g));
        assert!(zero.representable && zero.deviation == 0.0);
        assert!(is_representable_bra(&bad).representable);
    }

    #[test]
    fn ket_embedding_matches_zorn_column() {
        let g = grid();
        let w = WaveFunction::random(g, 1, &mut random::rng(2, 0));
        let f = w.to_oct_field(Side::Ket);
        for idx in [0, 5, 100] {
            let z = to_zorn(&f.value_at(idx));
            assert_eq!(z.a, w.psi1.data()[idx]);
            assert_eq!(z.b, c(0.0));
            for k in 0..3 {
                assert_eq!(z.y[k], w.psi2[k].data()[idx]);
                assert_eq!(z.x[k], c(0.0));
            }
        }
        let b = w.to_oct_field(Side::Bra);
        let z = to_zorn(&b.value_at(3));
        assert_eq!(z.x[1], w.psi2[1].data()[3]);
        assert_eq!(WaveFunction::from_oct_field(&b, Side::Bra), w);
    }

    #[test]
    fn scalar_product_examples() {
        let g = Grid::cubic(4, 3.0).unwrap();
        let mut w = WaveFunction::zeros(g);
        w.psi1 = ScalarField::constant(g, c(1.0));
        assert!((scalar_product(&w, &w).unwrap() - c(27.0)).norm() < 1e-12);
        let mut v = WaveFunction::zeros(g);
        v.psi2[1] = ScalarField::constant(g, c(2.0));
        assert_eq!(scalar_product(&w, &v).unwrap(), c(0.0));
        let mut rng = random::rng(3, 0);
        let (a, b) = (WaveFunction::random(g, 1, &mut rng), WaveFunction::random(g, 1, &mut rng));
        let ab = scalar_product(&a, &b).unwrap();
        let ba = scalar_product(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);
        assert!(scalar_product(&a, &a).unwrap().re > 0.0);
    }

    #[test]
    fn scalar_product_is_zorn_row_times_column() {
        // The upper-left block of (conj xi1, conj xi2; 0, 0)(psi1, 0; psi2, 0).
        let g = grid();
        let mut rng = random::rng(4, 0);
        let (xi, psi) = (WaveFunction::random(g, 1, &mut rng), WaveFunction::random(g, 1, &mut rng));
        let conj = WaveFunction {
            psi1: xi.psi1.zip_with(&xi.psi1, |v, _| v.conj()).unwrap(),
            psi2: std::array::from_fn(|k| xi.psi2[k].zip_with(&xi.psi2[k], |v, _| v.conj()).unwrap()),
        };
        let rows = conj.to_oct_field(Side::Bra);
        let cols = psi.to_oct_field(Side::Ket);
        let mut total = c(0.0);
        for idx in 0..g.len() {
            let p = to_zorn(&rows.value_at(idx)).mul_zorn(&to_zorn(&cols.value_at(idx)));
            assert!(p.x.iter().chain(p.y.iter()).all(|v| v.norm() < 1e-14) && p.b.norm() < 1e-14);
            total += p.a;
        }
        let expected = scalar_product(&xi, &psi).unwrap();
        assert!((total * g.cell_volume() - expected).norm() < 1e-12);
    }

    #[test]
    fn basis_classification() {
        let r = classify_basis_actions();
        assert_eq!(r.elements.len(), 11);
        for e in &r.elements {
            let expected = if ["1", "i*e7", "-i*e7", "u0", "u0*"].contains(&e.element.as_str()) {
                Verdict::Preserves
            } else {
                Verdict::Violates
            };
            assert_eq!(e.verdict, expected, "{}", e.element);
        }
        let m = r.get("-i*e7").unwrap().ket.action.unwrap();
        for (k, row) in m.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                let want = if k != l { 0.0 } else if k == 0 { 1.0 } else { -1.0 };
                assert_eq!(*v, c(want));
            }
        }
        let u1 = r.get("u1").unwrap();
        let w = u1.ket.witness.as_ref().unwrap();
        assert_eq!(w.input, "psi2_y");
        assert_eq!(w.image, "u3c");
        // The left action of u_i* keeps kets; only the bra side rules it out.
        let u2c = r.get("u2*").unwrap();
        assert_eq!(u2c.ket.verdict, Verdict::Preserves);
        assert_eq!(u2c.bra.verdict, Verdict::Violates);
    }

    #[test]
    fn minus_i_e7_squares_to_identity() {
        let r = classify_basis_actions();
        let m = r.get("-i*e7").unwrap().ket.action.unwrap();
        for k in 0..4 {
            for l in 0..4 {
                let s: Scalar = (0..4).map(|j| m[k][j] * m[j][l]).sum();
                assert_eq!(s, c(if k == l { 1.0 } else { 0.0 }));
            }
        }
    }

    #[test]
    fn operator_classification() {
        let g = grid();
        for v in ["0", "cos(x) + cos(y) + cos(z)"] {
            let s = Supercharges::new(&parse_scalar_expr(v).unwrap(), &g, Scheme::Spectral).unwrap();
            let h = s.hamiltonian().h;
            for op in [&h, &octop_mul(&s.q, &s.qbar), &octop_mul(&s.qbar, &s.q)] {
                assert_eq!(classify_octop(op, 1).unwrap().verdict, Observability::Observable);
            }
            for op in [&s.q, &s.qbar] {
                let c = classify_octop(op, 1).unwrap();
                assert_eq!(c.verdict, Observability::Unobservable);
            }
        }
        let zero = OctOperator::zero(g);
        assert_eq!(classify_octop(&zero, 1).unwrap().verdict, Observability::Observable);
        let u1 = OctOperator::single(SplitUnit::U1, &ScalarOperator::identity(g), "u1");
        let c = classify_octop(&u1, 1).unwrap();
        assert!(!c.ket.preserves && c.bra.preserves);
        assert!(c.ket.witness.unwrap().leaked_components.iter().all(|n| n.ends_with('c')));
    }
}

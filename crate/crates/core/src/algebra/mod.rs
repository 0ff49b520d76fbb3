//! Octonion arithmetic in the real and split bases, and Zorn vector matrices.

mod octonion;
mod tables;
mod zorn;

pub use octonion::{associator, commutator, format_scalar, Basis, Octonion, DEFAULT_TOL};
pub(crate) use tables::split_table;
pub use tables::{levi_civita, split_unit_product, SplitUnit, StructureTable, STRUCTURE_TRIPLES};
pub use zorn::{cross, dot, from_zorn, to_zorn, Vec3, ZornMatrix};

use serde::Serialize;

use crate::random::{self, ScalarMode};
use crate::Scalar;

#[derive(Debug, Clone, Serialize)]
pub struct TableEntry {
    pub lhs: String,
    pub rhs: String,
    pub expected: String,
    pub computed: String,
    pub matches: bool,
}

/// Outcome of comparing a multiplication table against an independent route.
#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub total: usize,
    pub matches: usize,
    pub mismatches: Vec<TableEntry>,
    #[serde(skip)]
    pub entries: Vec<TableEntry>,
}

impl TableReport {
    fn from_entries(entries: Vec<TableEntry>) -> Self {
        let mismatches: Vec<_> = entries.iter().filter(|e| !e.matches).cloned().collect();
        Self {
            total: entries.len(),
            matches: entries.len() - mismatches.len(),
            mismatches,
            entries,
        }
    }

    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks all 64 split-basis products against the structure constants.
///
/// The expected side is the split rule table; the computed side expands both
/// factors in `1, e_1..e_7`, multiplies with `a_ABC`, and converts back.
/// Every coefficient involved is a dyadic rational, so the comparison is exact.
pub fn verify_split_table() -> TableReport {
    let mut entries = Vec::with_capacity(64);
    for a in SplitUnit::ALL {
        for b in SplitUnit::ALL {
            let expected = match split_unit_product(a, b) {
                Some((s, u)) => Octonion::split_unit(u).scale(Scalar::new(f64::from(s), 0.0)),
                None => Octonion::zero(Basis::Split),
            };
            let lhs = Octonion::split_unit(a).to_real();
            let rhs = Octonion::split_unit(b).to_real();
            let computed = lhs.mul_structure(&rhs).to_split();
            entries.push(TableEntry {
                lhs: a.name().into(),
                rhs: b.name().into(),
                expected: expected.to_string(),
                computed: computed.to_string(),
                matches: computed.distance(&expected) == 0.0,
            });
        }
    }
    TableReport::from_entries(entries)
}

/// Checks `e_A e_B = a_ABC e_C - d_AB` for all 49 ordered pairs, computing the
/// product through the split table.
pub fn verify_real_table() -> TableReport {
    let table = StructureTable::get();
    let mut entries = Vec::with_capacity(49);
    for a in 1..8 {
        for b in 1..8 {
            let mut expected = [Scalar::new(0.0, 0.0); 8];
            for (c, slot) in expected.iter_mut().enumerate().skip(1) {
                *slot = Scalar::new(f64::from(table.entry(a, b, c)), 0.0);
            }
            if a == b {
                expected[0] = Scalar::new(-1.0, 0.0);
            }
            let expected = Octonion::new(expected, Basis::Real);
            let computed = Octonion::real_unit(a).mul_oct(&Octonion::real_unit(b));
            entries.push(TableEntry {
                lhs: format!("e{a}"),
                rhs: format!("e{b}"),
                expected: expected.to_string(),
                computed: computed.to_string(),
                matches: computed.distance(&expected) == 0.0,
            });
        }
    }
    TableReport::from_entries(entries)
}

/// One sampled identity check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: &str, samples: usize, max_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            samples,
            max_error,
            tolerance,
            pass: max_error <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraSelfTest {
    pub seed: u64,
    pub samples: usize,
    pub split_table: TableReport,
    pub real_table: TableReport,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// Relative error in the `|a - b| / (1 + |b|)` sense.
fn rel_err(a: Scalar, b: Scalar) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn sampled(
    name: &str,
    seed: u64,
    stream: u64,
    samples: usize,
    tolerance: f64,
    mode: ScalarMode,
    mut err: impl FnMut(&Octonion, &Octonion) -> f64,
) -> CheckResult {
    let mut rng = random::rng(seed, stream);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = random::octonion(&mut rng, Basis::Real, mode);
        let y = random::octonion(&mut rng, Basis::Real, mode);
        worst = worst.max(err(&x, &y));
    }
    CheckResult::new(name, samples, worst, tolerance)
}

/// Runs the table checks plus the sampled composition, alternativity, Zorn
/// norm and homomorphism laws on `samples` random pairs.
pub fn selftest(seed: u64, samples: usize) -> AlgebraSelfTest {
    use ScalarMode::{Complex, Real};
    let mut checks = Vec::new();

    for (mode, stream, label) in [(Real, 1, "real"), (Complex, 2, "complex")] {
        checks.push(sampled(&format!("composition_{label}"), seed, stream, samples, 1e-10, mode, |x, y| {
            rel_err(x.mul_oct(y).quadratic_form(), x.quadratic_form() * y.quadratic_form())
        }));
    }
    checks.push(sampled("zorn_norm_multiplicative", seed, 3, samples, 1e-10, Complex, |x, y| {
        let (zx, zy) = (to_zorn(x), to_zorn(y));
        rel_err(zx.mul_zorn(&zy).norm(), zx.norm() * zy.norm())
    }));
    checks.push(sampled("zorn_norm_equals_quadratic_form", seed, 4, samples, 1e-12, Complex, |x, _| {
        rel_err(to_zorn(x).norm(), x.quadratic_form())
    }));
    checks.push(sampled("alternative_left", seed, 5, samples, 1e-12, Complex, |x, y| {
        associator(x, x, y).max_abs()
    }));
    checks.push(sampled("alternative_right", seed, 6, samples, 1e-12, Complex, |x, y| {
        associator(x, y, y).max_abs()
    }));
    checks.push(sampled("flexible", seed, 7, samples, 1e-12, Complex, |x, y| {
        associator(x, y, x).max_abs()
    }));
    checks.push(sampled("zorn_homomorphism", seed, 8, samples, 1e-12, Complex, |x, y| {
        (to_zorn(&x.mul_oct(y)) - to_zorn(x).mul_zorn(&to_zorn(y))).max_abs()
    }));
    checks.push(sampled("zorn_round_trip", seed, 9, samples, 1e-14, Complex, |x, _| {
        from_zorn(&to_zorn(x)).distance(&x.to_split())
    }));
    checks.push(sampled("product_routes_agree", seed, 10, samples, 1e-13, Complex, |x, y| {
        x.mul_oct(y).distance(&x.mul_structure(y))
    }));
    checks.push(sampled("conjugation_reverses_products", seed, 11, samples, 1e-13, Complex, |x, y| {
        x.mul_oct(y).conj().distance(&y.conj().mul_oct(&x.conj()))
    }));

    let mut anticomm = 0.0f64;
    for a in 1..8 {
        for b in 1..8 {
            let (ea, eb) = (Octonion::real_unit(a), Octonion::real_unit(b));
            let expected = if a == b {
                Octonion::scalar(Scalar::new(-2.0, 0.0), Basis::Real)
            } else {
                Octonion::zero(Basis::Real)
            };
            anticomm = anticomm.max((ea * eb + eb * ea).distance(&expected));
        }
    }
    checks.push(CheckResult::new("unit_anticommutation", 49, anticomm, 0.0));

    let u = Octonion::split_unit;
    let witness = associator(&u(SplitUnit::U1), &u(SplitUnit::U2), &u(SplitUnit::U3));
    let ie7 = Octonion::real_unit(7).scale(Scalar::new(0.0, 1.0));
    checks.push(CheckResult::new("associator_u1_u2_u3_is_i_e7", 1, witness.distance(&ie7), 0.0));

    let split_table = verify_split_table();
    let real_table = verify_real_table();
    let pass = split_table.pass() && real_table.pass() && checks.iter().all(|c| c.pass);
    AlgebraSelfTest {
        seed,
        samples,
        split_table,
        real_table,
        checks,
        pass,
    }
}

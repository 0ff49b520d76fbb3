//! Probe-based verification of the operator identities satisfied (or
//! violated) by the supercharges and the Hamiltonian.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oct::{octop_apply, octop_commutator, octop_mul, product_pieces, OctField, OctOperator};
use super::scalar::{Scheme, ScalarOperator};
use super::susy::{CoefficientFields, Supercharges};
use crate::algebra::SplitUnit;
use crate::error::{Error, Result};
use crate::expr::ScalarExpr;
use crate::grid::Grid;
use crate::{random, Scalar};

const EPS: f64 = 1e-30;
const I: Scalar = Scalar::new(0.0, 1.0);
/// Probe generators use streams from here on, one per probe.
const PROBE_STREAM: u64 = 1000;
/// Default upper tolerance outside the exact regime (localized probes or
/// finite differences), where only the truncation error is controlled.
pub const APPROXIMATE_TOLERANCE: f64 = 5e-2;
/// Lower bound on the relative size of a nonvanishing associator.
pub const NONVANISHING_BOUND: f64 = 0.1;
/// Allowed deviation of a fitted factor from its analytic value.
pub const FACTOR_TOLERANCE: f64 = 1e-6;

/// How probe fields are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeMode {
    /// Trigonometric `V`, band-limited probes, no aliasing: identities hold to
    /// rounding error.
    #[default]
    BandLimited,
    /// Any `V`; probes carry a centered Gaussian envelope so the box edges are
    /// invisible. Errors are truncation-limited.
    Localized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckConfig {
    pub probes: usize,
    pub seed: u64,
    /// Per-axis probe bandwidth `M` in fundamentals.
    pub band: usize,
    pub mode: ProbeMode,
    pub scheme: Scheme,
    /// Overrides the upper tolerance of every check.
    pub tolerance: Option<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            probes: 8,
            seed: crate::DEFAULT_SEED,
            band: 3,
            mode: ProbeMode::BandLimited,
            scheme: Scheme::Spectral,
            tolerance: None,
        }
    }
}

impl CheckConfig {
    fn exact(&self) -> bool {
        self.mode == ProbeMode::BandLimited && self.scheme == Scheme::Spectral
    }
}

/// Catalog of checkable identities. The string ids are the public names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityId {
    QQbar,
    QbarQ,
    HamiltonianClosedForm,
    QSquared,
    QbarSquared,
    QCommutatorH,
    QbarCommutatorH,
    QQbarCommutesWithH,
    QbarQCommutesWithH,
    AssociatorQ,
    AssociatorQbar,
    HeisenbergQ,
    HeisenbergQbar,
}

impl IdentityId {
    pub const ALL: [IdentityId; 13] = [
        IdentityId::QQbar,
        IdentityId::QbarQ,
        IdentityId::HamiltonianClosedForm,
        IdentityId::QSquared,
        IdentityId::QbarSquared,
        IdentityId::QCommutatorH,
        IdentityId::QbarCommutatorH,
        IdentityId::QQbarCommutesWithH,
        IdentityId::QbarQCommutesWithH,
        IdentityId::AssociatorQ,
        IdentityId::AssociatorQbar,
        IdentityId::HeisenbergQ,
        IdentityId::HeisenbergQbar,
    ];

    pub fn id(self) -> &'static str {
        use IdentityId::*;
        match self {
            QQbar => "eq3-33",
            QbarQ => "eq3-36",
            HamiltonianClosedForm => "eq3-50",
            QSquared => "eq3-60-Q2",
            QbarSquared => "eq3-60-Qbar2",
            QCommutatorH => "eq3-70",
            QbarCommutatorH => "eq3-80",
            QQbarCommutesWithH => "eq3-90-QQbarH",
            QbarQCommutesWithH => "eq3-90-QbarQH",
            AssociatorQ => "eq3-170-assoc-nonzero",
            AssociatorQbar => "eq3-180-assoc-nonzero",
            HeisenbergQ => "eq4-20",
            HeisenbergQbar => "eq4-30",
        }
    }

    pub fn from_id(s: &str) -> Option<IdentityId> {
        Self::ALL.into_iter().find(|i| i.id().eq_ignore_ascii_case(s))
    }

    pub fn statement(self) -> &'static str {
        use IdentityId::*;
        match self {
            QQbar => "Q*Qbar = (p^2 + |grad V|^2 + lap V) u0*",
            QbarQ => "Qbar*Q = (p^2 + |grad V|^2 - lap V) u0",
            HamiltonianClosedForm => "(Qbar*Q + Q*Qbar)/2 = (p^2 + |grad V|^2)/2 + (lap V)/2 (u0* - u0)",
            QSquared => "Q*Q = 0",
            QbarSquared => "Qbar*Qbar = 0",
            QCommutatorH => "Q*H - H*Q = c * (sum V_ij D_j u_i* - (lap V)*Q), analytic c = 1",
            QbarCommutatorH => "Qbar*H - H*Qbar = c * (sum V_ij Dbar_j u_i - (lap V)*Qbar), analytic c = -1",
            QQbarCommutesWithH => "(Q*Qbar)*H - H*(Q*Qbar) = 0",
            QbarQCommutesWithH => "(Qbar*Q)*H - H*(Qbar*Q) = 0",
            AssociatorQ => "(Q*Qbar)*Q - Q*(Qbar*Q) != 0",
            AssociatorQbar => "(Qbar*Q)*Qbar - Qbar*(Q*Qbar) != 0",
            HeisenbergQ => "i(H*Q - Q*H) = c * i(sum V_ij D_j u_i* - (lap V)*Q), analytic c = -1",
            HeisenbergQbar => "i(H*Qbar - Qbar*H) = c * i(sum V_ij Dbar_j u_i - (lap V)*Qbar), analytic c = 1",
        }
    }

    /// Tolerance under the exact (band-limited, spectral) protocol.
    fn exact_tolerance(self) -> f64 {
        use IdentityId::*;
        match self {
            QSquared | QbarSquared | QQbarCommutesWithH | QbarQCommutesWithH => 1e-12,
            _ => 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Equal,
    Vanish,
    NonVanish,
    Proportional(f64),
}

/// Whether the residual is compared from above or from below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSummary {
    pub n: usize,
    pub length: f64,
}

impl From<&Grid> for GridSummary {
    fn from(g: &Grid) -> Self {
        Self {
            n: g.n(),
            length: g.length(),
        }
    }
}

/// Result of one identity check.
///
/// `residual` is `|(L - cR) f| / max(|L f|, |cR f|, |S f|, eps)` over probes
/// `f`, where `S` ranges over the individual groupings that make up `L`. It is
/// the maximum over probes for upper bounds and the minimum for lower bounds.
/// `c` is 1 except for proportionality checks, where it is the least-squares
/// factor.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub statement: String,
    pub lhs: String,
    pub rhs: String,
    pub potential: String,
    pub grid: GridSummary,
    pub scheme: Scheme,
    pub probe_mode: ProbeMode,
    pub k: Option<u32>,
    pub m: usize,
    pub probes: usize,
    pub seed: u64,
    pub bound: Bound,
    pub residual: f64,
    pub tolerance: f64,
    pub fitted_factor: Option<Scalar>,
    pub expected_factor: Option<f64>,
    /// Residual with the factor pinned to 1, for proportionality checks.
    pub unit_factor_residual: Option<f64>,
    pub pass: bool,
}

/// Validates the band-limit inequality `N/2 > 3K + M` and returns `K`.
pub fn check_protocol(v: &ScalarExpr, grid: &Grid, cfg: &CheckConfig) -> Result<Option<u32>> {
    if grid.dim() != 3 {
        return Err(Error::InvalidGrid(format!("identity checks need a 3D grid, got {}D", grid.dim())));
    }
    let k = v.trig_bandwidth(grid.length()).map(|b| b.into_iter().max().unwrap_or(0));
    if cfg.mode == ProbeMode::Localized {
        return Ok(k);
    }
    let Some(k) = k else {
        return Err(Error::ProtocolViolation(format!(
            "`{v}` is not a trigonometric polynomial periodic on a box of side {}",
            grid.length()
        )));
    };
    let needed = 3 * k as usize + cfg.band;
    if grid.n() / 2 <= needed || grid.n() % 2 == 1 && grid.n() / 2 < needed {
        return Err(Error::ProtocolViolation(format!(
            "N/2 = {} must exceed 3K + M = 3*{k} + {} = {needed}",
            grid.n() as f64 / 2.0,
            cfg.band
        )));
    }
    Ok(Some(k))
}

/// Deterministic probe fields for `cfg`.
pub fn probe_fields(grid: &Grid, cfg: &CheckConfig) -> Vec<OctField> {
    (0..cfg.probes)
        .into_par_iter()
        .map(|k| {
            let mut rng = random::rng(cfg.seed, PROBE_STREAM + k as u64);
            match cfg.mode {
                ProbeMode::BandLimited => OctField::random_band_limited(*grid, cfg.band, &mut rng),
                ProbeMode::Localized => OctField::random_localized(*grid, cfg.band, &mut rng),
            }
        })
        .collect()
}

struct Probed {
    l: OctField,
    r: OctField,
    scale: f64,
}

fn probe(lhs: &OctOperator, rhs: &OctOperator, scales: &[OctOperator], fields: &[OctField]) -> Result<Vec<Probed>> {
    fields
        .par_iter()
        .map(|f| {
            let l = octop_apply(lhs, f)?;
            let r = octop_apply(rhs, f)?;
            let mut scale = 0.0f64;
            for s in scales {
                scale = scale.max(octop_apply(s, f)?.norm());
            }
            Ok(Probed { l, r, scale })
        })
        .collect()
}

fn relative(p: &Probed, c: Scalar) -> f64 {
    let cr = p.r.scale(c);
    let denom = p.l.norm().max(cr.norm()).max(p.scale).max(EPS);
    p.l.sub(&cr).norm() / denom
}

/// Least-squares `c` minimizing `sum |L f - c R f|^2`; `None` if `R` vanishes
/// on every probe.
fn fit(data: &[Probed]) -> Result<Option<Scalar>> {
    let mut num = Scalar::new(0.0, 0.0);
    let mut den = 0.0;
    let mut lnorm = 0.0f64;
    for p in data {
        num += p.r.inner(&p.l)?;
        den += p.r.norm().powi(2);
        lnorm = lnorm.max(p.l.norm()).max(p.scale);
    }
    Ok((den.sqrt() > 1e-14 * lnorm.max(EPS) && den > 0.0).then(|| num / den))
}

/// Residual of the `R` operator built from the Hessian:
/// `sum_ij V_,ij C_j ⊗ w_i - (lap V) * charge`, where `C_j` are the charge's
/// scalar parts and `w_i` its basis elements. `charge_first` puts the
/// Laplacian to the right of the charge instead.
fn hessian_rhs(coeffs: &CoefficientFields, scheme: Scheme, bar: bool, charge: &OctOperator, charge_first: bool) -> OctOperator {
    let grid = *coeffs.grid();
    let terms: Vec<_> = (0..3)
        .map(|i| {
            let unit = if bar { SplitUnit::u(i + 1) } else { SplitUnit::u_star(i + 1) };
            let op = (0..3).fold(ScalarOperator::zero(grid), |acc, j| {
                let c = if bar { coeffs.dbar(j, scheme) } else { coeffs.d(j, scheme) };
                acc.add(&ScalarOperator::multiply(&coeffs.hessian[i][j]).compose(&c))
            });
            (unit, op)
        })
        .collect();
    let name = if bar { "sum V_ij Dbar_j u_i" } else { "sum V_ij D_j u_i*" };
    let hess = OctOperator::new(grid, terms, name);
    let lap = OctOperator::from_scalar(&ScalarOperator::multiply(&coeffs.laplacian), "lapV");
    let tail = if charge_first { octop_mul(charge, &lap) } else { octop_mul(&lap, charge) };
    hess.sub(&tail)
}

struct Built {
    lhs: OctOperator,
    rhs: OctOperator,
    scales: Vec<OctOperator>,
    kind: Kind,
}

fn build(id: IdentityId, s: &Supercharges) -> Built {
    use IdentityId::*;
    let (q, qbar, c, scheme) = (&s.q, &s.qbar, &s.coeffs, s.scheme);
    let grid = *c.grid();
    let h = s.hamiltonian().h;
    let zero = OctOperator::zero(grid);
    let both = |a: &OctOperator, b: &OctOperator| vec![octop_mul(a, b), octop_mul(b, a)];
    match id {
        QQbar => Built {
            lhs: octop_mul(q, qbar),
            rhs: OctOperator::single(SplitUnit::U0c, &c.closed_form_square(scheme, 1.0), "(p^2 + W + lapV) u0*"),
            scales: vec![],
            kind: Kind::Equal,
        },
        QbarQ => Built {
            lhs: octop_mul(qbar, q),
            rhs: OctOperator::single(SplitUnit::U0, &c.closed_form_square(scheme, -1.0), "(p^2 + W - lapV) u0"),
            scales: vec![],
            kind: Kind::Equal,
        },
        HamiltonianClosedForm => {
            let half = Scalar::new(0.5, 0.0);
            let kinetic = ScalarOperator::momentum_squared(grid, scheme)
                .add(&ScalarOperator::multiply(&c.grad_squared))
                .scale(half);
            let lap = ScalarOperator::multiply(&c.laplacian).scale(half);
            let rhs = OctOperator::from_scalar(&kinetic, "(p^2 + W)/2").add(&OctOperator::new(
                grid,
                [(SplitUnit::U0c, lap.clone()), (SplitUnit::U0, lap.scale(Scalar::new(-1.0, 0.0)))],
                "(lapV/2)(u0* - u0)",
            ));
            Built {
                lhs: h,
                rhs,
                scales: vec![],
                kind: Kind::Equal,
            }
        }
        QSquared => Built {
            lhs: octop_mul(q, q),
            rhs: zero,
            scales: product_pieces(q, q),
            kind: Kind::Vanish,
        },
        QbarSquared => Built {
            lhs: octop_mul(qbar, qbar),
            rhs: zero,
            scales: product_pieces(qbar, qbar),
            kind: Kind::Vanish,
        },
        QCommutatorH => Built {
            lhs: octop_commutator(q, &h),
            rhs: hessian_rhs(c, scheme, false, q, false),
            scales: both(q, &h),
            kind: Kind::Proportional(1.0),
        },
        QbarCommutatorH => Built {
            lhs: octop_commutator(qbar, &h),
            rhs: hessian_rhs(c, scheme, true, qbar, false),
            scales: both(qbar, &h),
            kind: Kind::Proportional(-1.0),
        },
        QQbarCommutesWithH => {
            let a = octop_mul(q, qbar);
            Built {
                lhs: octop_commutator(&a, &h),
                rhs: zero,
                scales: both(&a, &h),
                kind: Kind::Vanish,
            }
        }
        QbarQCommutesWithH => {
            let a = octop_mul(qbar, q);
            Built {
                lhs: octop_commutator(&a, &h),
                rhs: zero,
                scales: both(&a, &h),
                kind: Kind::Vanish,
            }
        }
        AssociatorQ => Built {
            lhs: octop_mul(&octop_mul(q, qbar), q),
            rhs: octop_mul(q, &octop_mul(qbar, q)),
            scales: vec![],
            kind: Kind::NonVanish,
        },
        AssociatorQbar => Built {
            lhs: octop_mul(&octop_mul(qbar, q), qbar),
            rhs: octop_mul(qbar, &octop_mul(q, qbar)),
            scales: vec![],
            kind: Kind::NonVanish,
        },
        HeisenbergQ => Built {
            lhs: octop_commutator(&h, q).scale(I),
            rhs: hessian_rhs(c, scheme, false, q, false).scale(I),
            scales: both(&h, q),
            kind: Kind::Proportional(-1.0),
        },
        HeisenbergQbar => Built {
            lhs: octop_commutator(&h, qbar).scale(I),
            rhs: hessian_rhs(c, scheme, true, qbar, false).scale(I),
            scales: both(&h, qbar),
            kind: Kind::Proportional(1.0),
        },
    }
}

/// Builds both sides of `id` as explicitly grouped operators and compares
/// them on `cfg.probes` random probe fields.
pub fn check_identity(id: IdentityId, v: &ScalarExpr, grid: &Grid, cfg: &CheckConfig) -> Result<IdentityReport> {
    let k = check_protocol(v, grid, cfg)?;
    let s = Supercharges::new(v, grid, cfg.scheme)?;
    check_identity_with(id, &s, k, cfg)
}

/// As [`check_identity`], reusing already built supercharges.
pub fn check_identity_with(id: IdentityId, s: &Supercharges, k: Option<u32>, cfg: &CheckConfig) -> Result<IdentityReport> {
    let grid = *s.coeffs.grid();
    let built = build(id, s);
    let fields = probe_fields(&grid, cfg);
    let data = probe(&built.lhs, &built.rhs, &built.scales, &fields)?;
    let one = Scalar::new(1.0, 0.0);
    let upper_tol = cfg.tolerance.unwrap_or(if cfg.exact() { id.exact_tolerance() } else { APPROXIMATE_TOLERANCE });
    let max_at = |c: Scalar| data.iter().map(|p| relative(p, c)).fold(0.0, f64::max);

    let (bound, residual, tolerance, fitted, expected, unit, pass) = match built.kind {
        Kind::Equal | Kind::Vanish => {
            let r = max_at(one);
            (Bound::Upper, r, upper_tol, None, None, None, r <= upper_tol)
        }
        Kind::NonVanish => {
            let r = data.iter().map(|p| relative(p, one)).fold(f64::INFINITY, f64::min);
            (Bound::Lower, r, NONVANISHING_BOUND, None, None, None, r >= NONVANISHING_BOUND)
        }
        Kind::Proportional(expected) => {
            let c = fit(&data)?;
            let r = max_at(c.unwrap_or(one));
            let factor_ok = c.is_none_or(|c| (c - Scalar::new(expected, 0.0)).norm() <= FACTOR_TOLERANCE);
            let unit = max_at(one);
            (Bound::Upper, r, upper_tol, c, Some(expected), Some(unit), r <= upper_tol && factor_ok)
        }
    };
    Ok(IdentityReport {
        id: id.id().into(),
        statement: id.statement().into(),
        lhs: built.lhs.grouping().to_string(),
        rhs: built.rhs.grouping().to_string(),
        potential: s.coeffs.potential.to_string(),
        grid: (&grid).into(),
        scheme: cfg.scheme,
        probe_mode: cfg.mode,
        k,
        m: cfg.band,
        probes: cfg.probes,
        seed: cfg.seed,
        bound,
        residual,
        tolerance,
        fitted_factor: fitted,
        expected_factor: expected,
        unit_factor_residual: unit,
        pass,
    })
}

/// Runs every catalog entry on one set of supercharges.
pub fn check_all(v: &ScalarExpr, grid: &Grid, cfg: &CheckConfig) -> Result<Vec<IdentityReport>> {
    let k = check_protocol(v, grid, cfg)?;
    let s = Supercharges::new(v, grid, cfg.scheme)?;
    IdentityId::ALL.iter().map(|&id| check_identity_with(id, &s, k, cfg)).collect()
}

/// Which supercharge a Heisenberg check is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Charge {
    Q,
    Qbar,
}

/// Fit of the grouped commutator against one candidate right-hand side.
#[derive(Debug, Clone, Serialize)]
pub struct FactorFit {
    pub rhs: String,
    pub best_factor: Option<Scalar>,
    pub residual: f64,
    pub unit_factor_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeisenbergReport {
    pub which: Charge,
    pub potential: String,
    pub grid: GridSummary,
    pub scheme: Scheme,
    pub probe_mode: ProbeMode,
    pub k: Option<u32>,
    pub m: usize,
    pub probes: usize,
    pub seed: u64,
    pub lhs: String,
    pub fit: FactorFit,
    /// Same fit with the Laplacian multiplying the charge from the right.
    pub alternative_ordering: FactorFit,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct HeisenbergResult {
    pub lhs: OctOperator,
    pub rhs_hessian: OctOperator,
    pub best_factor: Option<Scalar>,
    pub report: HeisenbergReport,
}

/// Residual tolerance at the fitted factor under the exact protocol.
pub const HEISENBERG_TOLERANCE: f64 = 1e-8;

/// Compares `i (Q (Qbar Q) - (Q Qbar) Q)` (or its `Qbar` mirror) with the
/// Hessian right-hand side and reports the best scalar factor between them.
pub fn heisenberg_rhs(which: Charge, v: &ScalarExpr, grid: &Grid, cfg: &CheckConfig) -> Result<HeisenbergResult> {
    let k = check_protocol(v, grid, cfg)?;
    let s = Supercharges::new(v, grid, cfg.scheme)?;
    let bar = which == Charge::Qbar;
    let (a, b) = if bar { (&s.qbar, &s.q) } else { (&s.q, &s.qbar) };
    let left = octop_mul(a, &octop_mul(b, a));
    let right = octop_mul(&octop_mul(a, b), a);
    let lhs = left.sub(&right).scale(I);
    let rhs = hessian_rhs(&s.coeffs, cfg.scheme, bar, a, false).scale(I);
    let alt = hessian_rhs(&s.coeffs, cfg.scheme, bar, a, true).scale(I);
    let fields = probe_fields(grid, cfg);
    let scales = [left, right];

    let fit_one = |r: &OctOperator| -> Result<FactorFit> {
        let data = probe(&lhs, r, &scales, &fields)?;
        let c = fit(&data)?;
        let one = Scalar::new(1.0, 0.0);
        let max_at = |c: Scalar| data.iter().map(|p| relative(p, c)).fold(0.0, f64::max);
        Ok(FactorFit {
            rhs: r.grouping().to_string(),
            best_factor: c,
            residual: max_at(c.unwrap_or(one)),
            unit_factor_residual: max_at(one),
        })
    };
    let fit_main = fit_one(&rhs)?;
    let fit_alt = fit_one(&alt)?;
    let tolerance = cfg
        .tolerance
        .unwrap_or(if cfg.exact() { HEISENBERG_TOLERANCE } else { APPROXIMATE_TOLERANCE });
    let report = HeisenbergReport {
        which,
        potential: v.to_string(),
        grid: grid.into(),
        scheme: cfg.scheme,
        probe_mode: cfg.mode,
        k,
        m: cfg.band,
        probes: cfg.probes,
        seed: cfg.seed,
        lhs: lhs.grouping().to_string(),
        pass: fit_main.residual <= tolerance,
        fit: fit_main,
        alternative_ordering: fit_alt,
        tolerance,
    };
    Ok(HeisenbergResult {
        best_factor: report.fit.best_factor,
        lhs,
        rhs_hessian: rhs,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar_expr;

    fn trig() -> ScalarExpr {
        parse_scalar_expr("cos(x) + cos(y) + cos(z)").unwrap()
    }

    fn grid() -> Grid {
        Grid::cubic(16, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn quick() -> CheckConfig {
        CheckConfig {
            probes: 2,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn ids_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(IdentityId::from_id(id.id()), Some(id));
        }
        assert_eq!(IdentityId::from_id("nope"), None);
    }

    #[test]
    fn protocol_inequality() {
        let g = Grid::cubic(8, 2.0 * std::f64::consts::PI).unwrap();
        let err = check_identity(IdentityId::QQbar, &trig(), &g, &quick()).unwrap_err();
        assert!(matches!(err, Error::ProtocolViolation(_)));
        let harmonic = parse_scalar_expr("0.5*(x^2+y^2+z^2)").unwrap();
        assert!(matches!(check_protocol(&harmonic, &grid(), &quick()), Err(Error::ProtocolViolation(_))));
        let loc = CheckConfig {
            mode: ProbeMode::Localized,
            ..quick()
        };
        assert_eq!(check_protocol(&harmonic, &grid(), &loc).unwrap(), None);
    }

    #[test]
    fn quadratic_products() {
        for id in [IdentityId::QQbar, IdentityId::QbarQ, IdentityId::HamiltonianClosedForm] {
            let r = check_identity(id, &trig(), &grid(), &quick()).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn nilpotency() {
        let r = check_identity(IdentityId::QSquared, &trig(), &grid(), &quick()).unwrap();
        assert!(r.residual <= 1e-12, "{r:?}");
    }

    #[test]
    fn commutator_factors() {
        for id in [IdentityId::QCommutatorH, IdentityId::QbarCommutatorH, IdentityId::HeisenbergQ, IdentityId::HeisenbergQbar] {
            let r = check_identity(id, &trig(), &grid(), &quick()).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn associators_vanish_only_for_free_motion() {
        let r = check_identity(IdentityId::AssociatorQ, &trig(), &grid(), &quick()).unwrap();
        assert!(r.pass && r.residual >= 0.1, "{r:?}");
        let free = parse_scalar_expr("0").unwrap();
        let r = check_identity(IdentityId::AssociatorQ, &free, &grid(), &quick()).unwrap();
        assert!(r.residual < 1e-12, "{r:?}");
        assert!(!r.pass);
    }

    #[test]
    fn heisenberg_free_motion_is_trivial() {
        let free = parse_scalar_expr("0").unwrap();
        let h = heisenberg_rhs(Charge::Q, &free, &grid(), &quick()).unwrap();
        assert_eq!(h.best_factor, None);
        assert!(h.report.fit.residual < 1e-12);
    }

    #[test]
    fn heisenberg_trig_factor() {
        let h = heisenberg_rhs(Charge::Q, &trig(), &grid(), &quick()).unwrap();
        let c = h.best_factor.unwrap();
        assert!((c - Scalar::new(2.0, 0.0)).norm() < 1e-6, "{:?}", h.report);
        assert!(h.report.pass);
        let hb = heisenberg_rhs(Charge::Qbar, &trig(), &grid(), &quick()).unwrap();
        assert!((hb.best_factor.unwrap() - Scalar::new(-2.0, 0.0)).norm() < 1e-6, "{:?}", hb.report);
        assert!(h.report.alternative_ordering.residual > 1e-3);
    }

    #[test]
    fn heisenberg_harmonic_is_proportional_to_q() {
        let v = parse_scalar_expr("0.5*(x^2+y^2+z^2)").unwrap();
        let g = Grid::cubic(32, 12.0).unwrap();
        let cfg = CheckConfig {
            mode: ProbeMode::Localized,
            band: 1,
            ..quick()
        };
        let h = heisenberg_rhs(Charge::Q, &v, &g, &cfg).unwrap();
        assert!(h.report.pass, "{:?}", h.report);
        assert!(h.report.fit.residual < 1e-5, "{:?}", h.report);
        assert!((h.best_factor.unwrap() - Scalar::new(2.0, 0.0)).norm() < 1e-4, "{:?}", h.report);
    }
}

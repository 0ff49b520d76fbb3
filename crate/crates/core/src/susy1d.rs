//! One-dimensional supersymmetric quantum mechanics with 2x2 matrix charges,
//! and the embedding of its matrix algebra into the split octonions.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Basis, Octonion, SplitUnit};
use crate::error::{Error, Result};
use crate::expr::{eval_on_grid, ScalarExpr, Var};
use crate::grid::{Grid, ScalarField};
use crate::operator::{CheckConfig, GridSummary, ProbeMode, ScalarOperator, Scheme, APPROXIMATE_TOLERANCE};
use crate::spectral::{dense_eigen, eigs_lowest, Method, SectorSpectrum};
use crate::{random, Scalar};

const EPS: f64 = 1e-30;
const I: Scalar = Scalar::new(0.0, 1.0);

/// `(V-, V+)` with `V± = U'^2/8 ∓ U''/4`.
pub fn partner_potentials(u: &ScalarExpr) -> (ScalarExpr, ScalarExpr) {
    let u1 = u.differentiate(Var::X);
    let u2 = u1.differentiate(Var::X);
    let base = u1.powi(2) / ScalarExpr::constant(8.0);
    let shift = u2 / ScalarExpr::constant(4.0);
    (base.clone() + shift.clone(), base - shift)
}

/// 2x2 matrix of scalar operators acting on pairs of fields.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    grid: Grid,
    blocks: [[ScalarOperator; 2]; 2],
}

impl BlockOperator {
    pub fn zero(grid: Grid) -> Self {
        Self {
            grid,
            blocks: std::array::from_fn(|_| std::array::from_fn(|_| ScalarOperator::zero(grid))),
        }
    }

    pub fn from_blocks(blocks: [[ScalarOperator; 2]; 2]) -> Self {
        let grid = *blocks[0][0].grid();
        Self { grid, blocks }
    }

    pub fn diag(a: &ScalarOperator, b: &ScalarOperator) -> Self {
        let mut m = Self::zero(*a.grid());
        m.blocks[0][0] = a.clone();
        m.blocks[1][1] = b.clone();
        m
    }

    /// `op ⊗ m` for a numeric 2x2 matrix `m`.
    pub fn tensor(op: &ScalarOperator, m: [[f64; 2]; 2]) -> Self {
        Self::from_blocks(std::array::from_fn(|i| std::array::from_fn(|j| op.scale(Scalar::new(m[i][j], 0.0)))))
    }

    pub fn block(&self, i: usize, j: usize) -> &ScalarOperator {
        &self.blocks[i][j]
    }

    /// Every block is structurally zero.
    pub fn is_zero(&self) -> bool {
        self.blocks.iter().flatten().all(ScalarOperator::is_zero)
    }

    pub fn mul(&self, other: &BlockOperator) -> BlockOperator {
        Self::from_blocks(std::array::from_fn(|i| {
            std::array::from_fn(|k| {
                self.blocks[i][0]
                    .compose(&other.blocks[0][k])
                    .add(&self.blocks[i][1].compose(&other.blocks[1][k]))
            })
        }))
    }

    pub fn add(&self, other: &BlockOperator) -> BlockOperator {
        Self::from_blocks(std::array::from_fn(|i| std::array::from_fn(|j| self.blocks[i][j].add(&other.blocks[i][j]))))
    }

    pub fn sub(&self, other: &BlockOperator) -> BlockOperator {
        Self::from_blocks(std::array::from_fn(|i| std::array::from_fn(|j| self.blocks[i][j].sub(&other.blocks[i][j]))))
    }

    pub fn scale(&self, c: Scalar) -> BlockOperator {
        Self::from_blocks(std::array::from_fn(|i| std::array::from_fn(|j| self.blocks[i][j].scale(c))))
    }

    pub fn anticommutator(&self, other: &BlockOperator) -> BlockOperator {
        self.mul(other).add(&other.mul(self))
    }

    pub fn commutator(&self, other: &BlockOperator) -> BlockOperator {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn apply(&self, f: &[ScalarField; 2]) -> Result<[ScalarField; 2]> {
        for x in f {
            self.grid.ensure_same(x.grid())?;
        }
        Ok(std::array::from_fn(|i| {
            let mut out = self.blocks[i][0].apply_slice(f[0].data());
            for (o, v) in out.iter_mut().zip(self.blocks[i][1].apply_slice(f[1].data())) {
                *o += v;
            }
            ScalarField::from_vec(self.grid, out)
        }))
    }
}

const SIGMA_PLUS: [[f64; 2]; 2] = [[0.0, 1.0], [0.0, 0.0]];
const SIGMA_MINUS: [[f64; 2]; 2] = [[0.0, 0.0], [1.0, 0.0]];

/// Superpotential, partner potentials and the operators built from them.
#[derive(Debug, Clone)]
pub struct SusyPair {
    pub u: ScalarExpr,
    pub v_minus: ScalarExpr,
    pub v_plus: ScalarExpr,
    pub grid: Grid,
    pub scheme: Scheme,
    /// `p^2/2 + V-`.
    pub h_minus: ScalarOperator,
    /// `p^2/2 + V+`.
    pub h_plus: ScalarOperator,
    /// `(p - i U'/2) σ+`.
    pub q: BlockOperator,
    /// `(p + i U'/2) σ-`.
    pub qbar: BlockOperator,
    /// `diag(H-, H+)`.
    pub h: BlockOperator,
}

pub fn build_susy_ops(u: &ScalarExpr, grid: &Grid) -> Result<SusyPair> {
    build_susy_ops_with(u, grid, Scheme::Spectral)
}

pub fn build_susy_ops_with(u: &ScalarExpr, grid: &Grid, scheme: Scheme) -> Result<SusyPair> {
    if grid.dim() != 1 {
        return Err(Error::InvalidGrid(format!("the 2x2 construction needs a 1D grid, got {}D", grid.dim())));
    }
    let (v_minus, v_plus) = partner_potentials(u);
    let half_w = eval_on_grid(&u.differentiate(Var::X), grid)?.scale(Scalar::new(0.5, 0.0));
    let w = ScalarOperator::multiply(&half_w).scale(I);
    let p = ScalarOperator::momentum(*grid, 0, scheme);
    let kinetic = p.compose(&p).scale(Scalar::new(0.5, 0.0));
    let h_minus = kinetic.add(&ScalarOperator::multiply(&eval_on_grid(&v_minus, grid)?));
    let h_plus = kinetic.add(&ScalarOperator::multiply(&eval_on_grid(&v_plus, grid)?));
    Ok(SusyPair {
        q: BlockOperator::tensor(&p.sub(&w), SIGMA_PLUS),
        qbar: BlockOperator::tensor(&p.add(&w), SIGMA_MINUS),
        h: BlockOperator::diag(&h_minus, &h_plus),
        u: u.clone(),
        v_minus,
        v_plus,
        grid: *grid,
        scheme,
        h_minus,
        h_plus,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SusyCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    /// The operator vanishes block by block without probing.
    pub structurally_zero: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SusyAlgebraReport {
    pub superpotential: String,
    pub v_minus: String,
    pub v_plus: String,
    pub grid: GridSummary,
    pub scheme: Scheme,
    pub probe_mode: ProbeMode,
    pub k: Option<u32>,
    pub m: usize,
    pub probes: usize,
    pub seed: u64,
    pub checks: Vec<SusyCheck>,
    pub pass: bool,
}

const PROBE_STREAM: u64 = 3000;

fn probe_pairs(grid: &Grid, cfg: &CheckConfig) -> Vec<[ScalarField; 2]> {
    (0..cfg.probes)
        .into_par_iter()
        .map(|k| {
            let mut rng = random::rng(cfg.seed, PROBE_STREAM + k as u64);
            std::array::from_fn(|_| match cfg.mode {
                ProbeMode::BandLimited => ScalarField::random_band_limited(*grid, cfg.band, &mut rng),
                ProbeMode::Localized => ScalarField::random_localized(*grid, cfg.band, &mut rng),
            })
        })
        .collect()
}

fn pair_norm(f: &[ScalarField; 2]) -> f64 {
    f[0].norm().hypot(f[1].norm())
}

fn max_relative(lhs: &BlockOperator, rhs: &BlockOperator, scales: &[BlockOperator], probes: &[[ScalarField; 2]]) -> Result<f64> {
    let per: Vec<f64> = probes
        .par_iter()
        .map(|f| {
            let l = lhs.apply(f)?;
            let r = rhs.apply(f)?;
            let mut denom = pair_norm(&l).max(pair_norm(&r)).max(EPS);
            for s in scales {
                denom = denom.max(pair_norm(&s.apply(f)?));
            }
            let d = [l[0].sub(&r[0])?, l[1].sub(&r[1])?];
            Ok(pair_norm(&d) / denom)
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().fold(0.0, f64::max))
}

/// 1D analogue of the band-limit inequality, with `K` the bandwidth of `U'`.
fn check_protocol_1d(pair: &SusyPair, cfg: &CheckConfig) -> Result<Option<u32>> {
    let k = pair.u.differentiate(Var::X).trig_bandwidth(pair.grid.length()).map(|b| b[0]);
    if cfg.mode == ProbeMode::Localized {
        return Ok(k);
    }
    let Some(k) = k else {
        return Err(Error::ProtocolViolation(format!(
            "U' = `{}` is not a trigonometric polynomial periodic on a box of side {}",
            pair.u.differentiate(Var::X),
            pair.grid.length()
        )));
    };
    let needed = 3 * k as usize + cfg.band;
    if pair.grid.n() / 2 <= needed {
        return Err(Error::ProtocolViolation(format!(
            "N/2 = {} must exceed 3K + M = {needed}",
            pair.grid.n() as f64 / 2.0
        )));
    }
    Ok(Some(k))
}

/// Upper tolerance with localized probes, where the box edges contribute
/// only through the probe envelope.
pub const LOCALIZED_TOLERANCE_1D: f64 = 1e-10;

/// Checks `{Q,Q} = {Qbar,Qbar} = 0`, `{Qbar,Q} = 2H` and `[Q,H] = [Qbar,H] = 0`.
pub fn susy_algebra_check(pair: &SusyPair, cfg: &CheckConfig) -> Result<SusyAlgebraReport> {
    let k = check_protocol_1d(pair, cfg)?;
    let probes = probe_pairs(&pair.grid, cfg);
    let exact = cfg.mode == ProbeMode::BandLimited && cfg.scheme == Scheme::Spectral && pair.scheme == Scheme::Spectral;
    let default_tol = |t: f64| {
        cfg.tolerance.unwrap_or(if exact {
            t
        } else if cfg.mode == ProbeMode::Localized && pair.scheme == Scheme::Spectral {
            LOCALIZED_TOLERANCE_1D
        } else {
            APPROXIMATE_TOLERANCE
        })
    };
    let zero = BlockOperator::zero(pair.grid);
    let two = Scalar::new(2.0, 0.0);
    let mut checks = Vec::new();

    for (name, a) in [("q_squared_zero", &pair.q), ("qbar_squared_zero", &pair.qbar)] {
        let sq = a.mul(a);
        let residual = max_relative(&sq, &zero, &[], &probes)?;
        let tolerance = default_tol(1e-12);
        checks.push(SusyCheck {
            name: name.into(),
            residual,
            tolerance,
            structurally_zero: sq.is_zero(),
            pass: residual <= tolerance,
        });
    }
    let anti = pair.qbar.anticommutator(&pair.q);
    let residual = max_relative(&anti, &pair.h.scale(two), &[], &probes)?;
    let tolerance = default_tol(1e-12);
    checks.push(SusyCheck {
        name: "anticommutator_equals_2h".into(),
        residual,
        tolerance,
        structurally_zero: false,
        pass: residual <= tolerance,
    });
    for (name, a) in [("commutator_q_h", &pair.q), ("commutator_qbar_h", &pair.qbar)] {
        let comm = a.commutator(&pair.h);
        let scales = [a.mul(&pair.h), pair.h.mul(a)];
        let residual = max_relative(&comm, &zero, &scales, &probes)?;
        let tolerance = default_tol(1e-10);
        checks.push(SusyCheck {
            name: name.into(),
            residual,
            tolerance,
            structurally_zero: comm.is_zero(),
            pass: residual <= tolerance,
        });
    }
    Ok(SusyAlgebraReport {
        superpotential: pair.u.to_string(),
        v_minus: pair.v_minus.to_string(),
        v_plus: pair.v_plus.to_string(),
        grid: (&pair.grid).into(),
        scheme: pair.scheme,
        probe_mode: cfg.mode,
        k,
        m: cfg.band,
        probes: cfg.probes,
        seed: cfg.seed,
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

/// Image of the 2x2 matrix `[[a, b], [c, d]]`: `a u0* + d u0 - b u1* + c u1`.
pub fn pauli_image(m: [[Scalar; 2]; 2]) -> Octonion {
    let mut coeffs = [Scalar::new(0.0, 0.0); 8];
    coeffs[SplitUnit::U0c.index()] = m[0][0];
    coeffs[SplitUnit::U0.index()] = m[1][1];
    coeffs[SplitUnit::U1c.index()] = -m[0][1];
    coeffs[SplitUnit::U1.index()] = m[1][0];
    Octonion::new(coeffs, Basis::Split)
}

fn mat_mul(a: [[Scalar; 2]; 2], b: [[Scalar; 2]; 2]) -> [[Scalar; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|k| a[i][0] * b[0][k] + a[i][1] * b[1][k]))
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingCheck {
    pub relation: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PauliEmbeddingReport {
    /// `(matrix, image)` for the named matrices.
    pub images: Vec<(String, String)>,
    pub relations: Vec<EmbeddingCheck>,
    /// Products of all 16 ordered pairs of matrix units.
    pub unit_products_checked: usize,
    pub unit_product_failures: Vec<EmbeddingCheck>,
    pub pass: bool,
}

/// Verifies that `σ- -> u1`, `σ+ -> -u1*`, `σz -> u0* - u0` extends to an
/// algebra homomorphism from 2x2 matrices into the split octonions.
pub fn embed_pauli_to_split() -> PauliEmbeddingReport {
    let r = |x: f64| Scalar::new(x, 0.0);
    let to_c = |m: [[f64; 2]; 2]| m.map(|row| row.map(r));
    let sp = to_c(SIGMA_PLUS);
    let sm = to_c(SIGMA_MINUS);
    let sz = to_c([[1.0, 0.0], [0.0, -1.0]]);
    let id = to_c([[1.0, 0.0], [0.0, 1.0]]);
    let img = pauli_image;
    let u = Octonion::split_unit;
    let images = vec![
        ("sigma+".to_string(), img(sp).to_string()),
        ("sigma-".to_string(), img(sm).to_string()),
        ("sigma_z".to_string(), img(sz).to_string()),
        ("1".to_string(), img(id).to_string()),
    ];
    let check = |relation: &str, expected: Octonion, computed: Octonion| EmbeddingCheck {
        relation: relation.into(),
        expected: expected.to_string(),
        computed: computed.to_string(),
        pass: computed.distance(&expected) == 0.0,
    };
    let (p, m, z) = (img(sp), img(sm), img(sz));
    let relations = vec![
        check("sigma+ sigma- -> u0*", u(SplitUnit::U0c), p * m),
        check("sigma- sigma+ -> u0", u(SplitUnit::U0), m * p),
        check("{sigma-, sigma+} -> 1", Octonion::one(Basis::Split), m * p + p * m),
        check("[sigma+, sigma-] -> u0* - u0", u(SplitUnit::U0c) - u(SplitUnit::U0), p * m - m * p),
        check("sigma_z -> u0* - u0", u(SplitUnit::U0c) - u(SplitUnit::U0), z),
        check("sigma_z^2 -> 1", Octonion::one(Basis::Split), z * z),
        check("sigma- -> u1", u(SplitUnit::U1), m),
        check("sigma+ -> -u1*", -u(SplitUnit::U1c), p),
    ];
    let mut failures = Vec::new();
    let mut count = 0;
    let unit_mat = |i: usize, j: usize| {
        let mut e = [[r(0.0); 2]; 2];
        e[i][j] = r(1.0);
        e
    };
    for a in 0..4 {
        for b in 0..4 {
            let (ea, eb) = (unit_mat(a / 2, a % 2), unit_mat(b / 2, b % 2));
            let c = check(&format!("E{}{} E{}{}", a / 2 + 1, a % 2 + 1, b / 2 + 1, b % 2 + 1), img(mat_mul(ea, eb)), img(ea) * img(eb));
            count += 1;
            if !c.pass {
                failures.push(c);
            }
        }
    }
    PauliEmbeddingReport {
        pass: failures.is_empty() && relations.iter().all(|c| c.pass),
        images,
        relations,
        unit_products_checked: count,
        unit_product_failures: failures,
    }
}

/// Nonzero level of one sector and its nearest partner in the other.
#[derive(Debug, Clone, Serialize)]
pub struct LevelPair {
    pub sector: String,
    pub index: usize,
    pub energy: f64,
    pub partner: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairSpectra {
    pub superpotential: String,
    pub grid: GridSummary,
    pub k: usize,
    pub minus: SectorSpectrum,
    pub plus: SectorSpectrum,
    pub zero_modes_minus: usize,
    pub zero_modes_plus: usize,
    pub pairs: Vec<LevelPair>,
    pub max_pair_difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Allowed gap between a nonzero level and its partner.
pub const PAIR_TOL: f64 = 1e-6;

/// Eigenvalues below this count as zero modes and are left unpaired.
pub const ZERO_LEVEL_TOL: f64 = 1e-6;

/// Lowest `k` levels of `H-` and `H+` by dense eigensolve, with each nonzero
/// level matched to the nearest level of the partner's full spectrum.
pub fn pair_spectra(u: &ScalarExpr, grid: &Grid, k: usize) -> Result<PairSpectra> {
    let pair = build_susy_ops(u, grid)?;
    let (minus_full, plus_full) = rayon::join(|| dense_eigen(&pair.h_minus, 0), || dense_eigen(&pair.h_plus, 0));
    let (minus_full, plus_full) = (minus_full?.eigenvalues, plus_full?.eigenvalues);
    let minus = eigs_lowest(&pair.h_minus, k, Method::Dense, crate::DEFAULT_SEED)?;
    let plus = eigs_lowest(&pair.h_plus, k, Method::Dense, crate::DEFAULT_SEED)?;

    let nearest = |e: f64, other: &[f64]| other.iter().copied().min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()));
    let mut pairs = Vec::new();
    for (name, own, other) in [("minus", &minus, &plus_full), ("plus", &plus, &minus_full)] {
        for (index, &energy) in own.eigenvalues.iter().enumerate() {
            if energy.abs() <= ZERO_LEVEL_TOL {
                continue;
            }
            let partner = nearest(energy, other).unwrap_or(f64::NAN);
            pairs.push(LevelPair {
                sector: name.into(),
                index,
                energy,
                partner,
                difference: (energy - partner).abs(),
            });
        }
    }
    let max_diff = pairs.iter().map(|p| p.difference).fold(0.0, f64::max);
    Ok(PairSpectra {
        superpotential: u.to_string(),
        grid: grid.into(),
        k,
        zero_modes_minus: minus.eigenvalues.iter().filter(|e| e.abs() <= ZERO_LEVEL_TOL).count(),
        zero_modes_plus: plus.eigenvalues.iter().filter(|e| e.abs() <= ZERO_LEVEL_TOL).count(),
        max_pair_difference: max_diff,
        tolerance: PAIR_TOL,
        pass: max_diff <= PAIR_TOL,
        pairs,
        minus,
        plus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar_expr;
    use std::f64::consts::PI;

    fn expr(s: &str) -> ScalarExpr {
        parse_scalar_expr(s).unwrap()
    }

    fn at(e: &ScalarExpr, x: f64) -> f64 {
        e.eval([x, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn partner_potential_examples() {
        let (vm, vp) = partner_potentials(&expr("x^2"));
        for x in [-1.5, 0.0, 0.7, 3.0] {
            assert!((at(&vm, x) - (x * x / 2.0 + 0.5)).abs() < 1e-14);
            assert!((at(&vp, x) - (x * x / 2.0 - 0.5)).abs() < 1e-14);
        }
        let (vm, vp) = partner_potentials(&expr("3"));
        assert_eq!((vm.to_string(), vp.to_string()), ("0".into(), "0".into()));
        let (vm, vp) = partner_potentials(&expr("2*x"));
        assert_eq!((at(&vm, 1.3), at(&vp, -2.0)), (0.5, 0.5));
    }

    #[test]
    fn pauli_embedding_is_a_homomorphism() {
        let r = embed_pauli_to_split();
        assert_eq!(r.unit_products_checked, 16);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn block_squares_vanish_structurally() {
        let g = Grid::line(64, 2.0 * PI).unwrap();
        let pair = build_susy_ops(&expr("sin(x)"), &g).unwrap();
        assert!(pair.q.mul(&pair.q).is_zero());
        assert!(pair.qbar.mul(&pair.qbar).is_zero());
        assert!(!pair.q.is_zero());
    }

    #[test]
    fn band_limited_algebra_closes() {
        let g = Grid::line(64, 2.0 * PI).unwrap();
        let pair = build_susy_ops(&expr("sin(x) + 0.5*cos(2*x)"), &g).unwrap();
        let r = susy_algebra_check(&pair, &CheckConfig::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.k, Some(2));
    }

    #[test]
    fn protocol_violation_for_polynomial_superpotential() {
        let g = Grid::line(64, 20.0).unwrap();
        let pair = build_susy_ops(&expr("x^2"), &g).unwrap();
        assert!(matches!(
            susy_algebra_check(&pair, &CheckConfig::default()),
            Err(Error::ProtocolViolation(_))
        ));
    }

    #[test]
    fn three_dimensional_grid_rejected() {
        let g = Grid::cubic(8, 1.0).unwrap();
        assert!(build_susy_ops(&expr("x"), &g).is_err());
    }

    #[test]
    fn constant_superpotential_gives_identical_spectra() {
        let g = Grid::line(32, 2.0 * PI).unwrap();
        let s = pair_spectra(&expr("1"), &g, 5).unwrap();
        assert_eq!(s.minus.eigenvalues, s.plus.eigenvalues);
        assert!(s.max_pair_difference < 1e-12);
        assert_eq!(s.zero_modes_minus, 1);
    }

    #[test]
    fn shifted_oscillators() {
        let g = Grid::line(128, 20.0).unwrap();
        let s = pair_spectra(&expr("x^2"), &g, 4).unwrap();
        for n in 0..4 {
            assert!((s.plus.eigenvalues[n] - n as f64).abs() < 1e-8, "{:?}", s.plus.eigenvalues);
            assert!((s.minus.eigenvalues[n] - (n + 1) as f64).abs() < 1e-8, "{:?}", s.minus.eigenvalues);
        }
        assert_eq!(s.zero_modes_plus, 1);
        assert!(s.max_pair_difference < 1e-8);
    }
}

//! Spectra of the partner Hamiltonians, zero modes, and joint eigenpairs of
//! the octonionic Hamiltonian on representable wavefunctions.

mod dense;
mod iterative;

pub use dense::{dense_eigen, DenseEigen, DENSE_LIMIT};
pub use iterative::{krylov_lowest, KrylovEigen, KrylovOptions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::ScalarExpr;
use crate::grid::{Grid, ScalarField};
use crate::observability::{is_representable, Side, WaveFunction};
use crate::operator::{octop_apply, GridSummary, ScalarOperator, Scheme, Supercharges};
use crate::Scalar;

/// Eigenvalues closer than this are grouped into one level by default.
pub const LEVEL_TOL: f64 = 5e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Plus,
    Minus,
}

impl Sector {
    pub fn name(self) -> &'static str {
        match self {
            Sector::Plus => "plus",
            Sector::Minus => "minus",
        }
    }
}

/// Group of nearly equal eigenvalues.
#[derive(Debug, Clone, Serialize)]
pub struct Level {
    pub energy: f64,
    pub degeneracy: usize,
    /// False when the level may continue past the computed eigenvalues.
    pub complete: bool,
}

/// Groups ascending `values` into levels whose consecutive gaps are `<= tol`.
pub fn cluster_levels(values: &[f64], tol: f64) -> Vec<Level> {
    let mut levels: Vec<(f64, usize)> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for &v in values {
        match levels.last_mut() {
            Some((sum, count)) if v - prev <= tol => {
                *sum += v;
                *count += 1;
            }
            _ => levels.push((v, 1)),
        }
        prev = v;
    }
    levels
        .into_iter()
        .map(|(sum, count)| Level {
            energy: sum / count as f64,
            degeneracy: count,
            complete: true,
        })
        .collect()
}

/// Lowest eigenpairs of one Hermitian operator.
#[derive(Debug, Clone, Serialize)]
pub struct SectorSpectrum {
    pub method: Method,
    pub eigenvalues: Vec<f64>,
    /// `|A x - E x| / |x|` per pair.
    pub residuals: Vec<f64>,
    pub levels: Vec<Level>,
    pub max_residual: f64,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<Scalar>>,
}

fn residual(op: &ScalarOperator, x: &[Scalar], e: f64) -> f64 {
    let ax = op.apply_slice(x);
    let r: f64 = ax.iter().zip(x).map(|(a, b)| (a - e * b).norm_sqr()).sum();
    let n: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    (r / n).sqrt()
}

/// Lowest `k` eigenpairs of `op`, clustering levels with [`LEVEL_TOL`].
pub fn eigs_lowest(op: &ScalarOperator, k: usize, method: Method, seed: u64) -> Result<SectorSpectrum> {
    eigs_lowest_with(op, k, method, seed, LEVEL_TOL, &KrylovOptions::default())
}

pub fn eigs_lowest_with(
    op: &ScalarOperator,
    k: usize,
    method: Method,
    seed: u64,
    level_tol: f64,
    krylov: &KrylovOptions,
) -> Result<SectorSpectrum> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let (eigenvalues, vectors, levels) = match method {
        Method::Dense => {
            let d = dense_eigen(op, k)?;
            let k = k.min(d.eigenvalues.len());
            let all = cluster_levels(&d.eigenvalues, level_tol);
            let mut levels = Vec::new();
            let mut seen = 0;
            for lvl in all {
                if seen >= k {
                    break;
                }
                seen += lvl.degeneracy;
                levels.push(lvl);
            }
            (d.eigenvalues[..k].to_vec(), d.vectors, levels)
        }
        Method::Iterative => {
            let it = krylov_lowest(op, k, seed, krylov)?;
            let mut levels = cluster_levels(&it.eigenvalues, level_tol);
            if let Some(last) = levels.last_mut() {
                last.complete = false;
            }
            (it.eigenvalues, it.vectors, levels)
        }
    };
    let residuals: Vec<f64> = vectors.iter().zip(&eigenvalues).map(|(x, &e)| residual(op, x, e)).collect();
    Ok(SectorSpectrum {
        method,
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        eigenvalues,
        residuals,
        levels,
        eigenvectors: vectors,
    })
}

/// Spectra of both partner Hamiltonians.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    pub potential: String,
    pub grid: GridSummary,
    pub k: usize,
    pub method: Method,
    pub seed: u64,
    pub plus: SectorSpectrum,
    pub minus: SectorSpectrum,
}

impl SpectrumResult {
    pub fn sector(&self, s: Sector) -> &SectorSpectrum {
        match s {
            Sector::Plus => &self.plus,
            Sector::Minus => &self.minus,
        }
    }

    /// Eigenvalue table with columns `sector,index,eigenvalue,residual`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sector", "index", "eigenvalue", "residual"]).expect("in-memory write");
        for s in [Sector::Plus, Sector::Minus] {
            let sec = self.sector(s);
            for (i, (e, r)) in sec.eigenvalues.iter().zip(&sec.residuals).enumerate() {
                w.write_record([s.name().to_string(), i.to_string(), format!("{e:.15e}"), format!("{r:.6e}")])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

/// Lowest `k` eigenvalues of `H+` and `H-` for potential `v`.
pub fn hamiltonian_spectra(v: &ScalarExpr, grid: &Grid, k: usize, method: Method, seed: u64) -> Result<SpectrumResult> {
    let s = Supercharges::new(v, grid, Scheme::Spectral)?;
    let h = s.closed_form_hamiltonian();
    let (plus, minus) = rayon::join(
        || eigs_lowest(&h.h_plus, k, method, seed),
        || eigs_lowest(&h.h_minus, k, method, seed),
    );
    Ok(SpectrumResult {
        potential: v.to_string(),
        grid: grid.into(),
        k,
        method,
        seed,
        plus: plus?,
        minus: minus?,
    })
}

/// Residuals of the analytic zero modes `e^{-V}` (for `H-`) and `e^{+V}`
/// (for `H+`).
#[derive(Debug, Clone, Serialize)]
pub struct ZeroModeReport {
    pub potential: String,
    pub grid: GridSummary,
    /// `|H- e^{-V}| / |e^{-V}|`.
    pub residual_minus: f64,
    /// `|H+ e^{V}| / |e^{V}|`.
    pub residual_plus: f64,
    /// Largest value on the box faces over the largest value anywhere.
    pub tail_minus: f64,
    pub tail_plus: f64,
    pub normalizable_minus: bool,
    pub normalizable_plus: bool,
    pub tolerance: f64,
    /// Every normalizable zero mode has residual within `tolerance`.
    pub pass: bool,
}

/// Residual bound for a normalizable analytic zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-6;

/// Face-to-peak ratio below which a zero mode counts as normalizable.
pub const TAIL_TOL: f64 = 1e-6;
/// Largest potential range for which both exponentials stay representable
/// after shifting by the extremum.
const MAX_EXPONENT_RANGE: f64 = 700.0;

fn tail(grid: &Grid, f: &ScalarField) -> f64 {
    let peak = f.max_abs();
    let face = (0..grid.len())
        .filter(|&idx| grid.indices(idx).iter().take(grid.dim()).any(|&i| i == 0))
        .map(|idx| f.data()[idx].norm())
        .fold(0.0, f64::max);
    face / peak
}

pub fn zero_mode_check(v: &ScalarExpr, grid: &Grid) -> Result<ZeroModeReport> {
    let s = Supercharges::new(v, grid, Scheme::Spectral)?;
    let h = s.closed_form_hamiltonian();
    let vals: Vec<f64> = s.coeffs.v.data().iter().map(|c| c.re).collect();
    let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(hi - lo).is_finite() || hi - lo > MAX_EXPONENT_RANGE {
        return Err(Error::Overflow(format!(
            "V ranges over [{lo}, {hi}]; exp(+-V) is not representable on this grid"
        )));
    }
    // Shifting by the extremum rescales the mode, leaving the ratios unchanged.
    let minus = ScalarField::from_vec(*grid, vals.iter().map(|&x| Scalar::new((lo - x).exp(), 0.0)).collect());
    let plus = ScalarField::from_vec(*grid, vals.iter().map(|&x| Scalar::new((x - hi).exp(), 0.0)).collect());
    let r_minus = h.h_minus.apply(&minus)?.norm() / minus.norm();
    let r_plus = h.h_plus.apply(&plus)?.norm() / plus.norm();
    let (tm, tp) = (tail(grid, &minus), tail(grid, &plus));
    Ok(ZeroModeReport {
        potential: v.to_string(),
        grid: grid.into(),
        residual_minus: r_minus,
        residual_plus: r_plus,
        tail_minus: tm,
        tail_plus: tp,
        normalizable_minus: tm <= TAIL_TOL,
        normalizable_plus: tp <= TAIL_TOL,
        tolerance: ZERO_MODE_TOL,
        pass: (tm > TAIL_TOL || r_minus <= ZERO_MODE_TOL) && (tp > TAIL_TOL || r_plus <= ZERO_MODE_TOL),
    })
}

/// One eigenstate of the full Hamiltonian on representable wavefunctions.
#[derive(Debug, Clone, Serialize)]
pub struct JointState {
    pub energy: f64,
    pub sector: Sector,
    /// Wavefunction slot carrying the state: `psi1` or `psi2_x/y/z`.
    pub slot: String,
    pub sector_index: usize,
    /// `|H Psi - E Psi| / |Psi|` with `H` applied as an octonionic operator.
    pub residual: f64,
    pub representable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct JointSpectrum {
    pub states: Vec<JointState>,
    pub levels: Vec<Level>,
    pub max_residual: f64,
    pub sectors: SpectrumResult,
}

/// Lowest `k` eigenstates of `H Psi = E Psi` over wavefunctions
/// `Psi = (psi1, psi2)`.
///
/// `H` maps `psi1` by `H+` and each component of `psi2` by `H-`, so the joint
/// spectrum is that of `H+` merged with three copies of that of `H-`.
pub fn schrodinger_solve(v: &ScalarExpr, grid: &Grid, k: usize, method: Method, seed: u64) -> Result<JointSpectrum> {
    let s = Supercharges::new(v, grid, Scheme::Spectral)?;
    let h = s.closed_form_hamiltonian();
    // Residuals are taken against the factored form, which must agree on the
    // computed (interior) states.
    let factored = s.hamiltonian().h;
    let k_minus = k.div_ceil(3);
    let (plus, minus) = rayon::join(
        || eigs_lowest(&h.h_plus, k, method, seed),
        || eigs_lowest(&h.h_minus, k_minus, method, seed),
    );
    let sectors = SpectrumResult {
        potential: v.to_string(),
        grid: grid.into(),
        k,
        method,
        seed,
        plus: plus?,
        minus: minus?,
    };

    let mut candidates: Vec<(f64, Sector, usize, usize)> = Vec::new();
    for (i, &e) in sectors.plus.eigenvalues.iter().enumerate() {
        candidates.push((e, Sector::Plus, i, 0));
    }
    for (i, &e) in sectors.minus.eigenvalues.iter().enumerate() {
        for slot in 1..=3 {
            candidates.push((e, Sector::Minus, i, slot));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.3.cmp(&b.3)));
    candidates.truncate(k);

    const SLOTS: [&str; 4] = ["psi1", "psi2_x", "psi2_y", "psi2_z"];
    let mut states = Vec::with_capacity(candidates.len());
    for (e, sector, i, slot) in candidates {
        let vec = &sectors.sector(sector).eigenvectors[i];
        let field = ScalarField::from_vec(*grid, vec.clone());
        let mut w = WaveFunction::zeros(*grid);
        match slot {
            0 => w.psi1 = field,
            j => w.psi2[j - 1] = field,
        }
        let psi = w.to_oct_field(Side::Ket);
        let hpsi = octop_apply(&factored, &psi)?;
        let res = hpsi.sub(&psi.scale(Scalar::new(e, 0.0))).norm() / psi.norm();
        states.push(JointState {
            energy: e,
            sector,
            slot: SLOTS[slot].into(),
            sector_index: i,
            residual: res,
            representable: is_representable(&hpsi).representable,
        });
    }
    let energies: Vec<f64> = states.iter().map(|s| s.energy).collect();
    let mut levels = cluster_levels(&energies, LEVEL_TOL);
    if let Some(last) = levels.last_mut() {
        last.complete = false;
    }
    Ok(JointSpectrum {
        max_residual: states.iter().map(|s| s.residual).fold(0.0, f64::max),
        states,
        levels,
        sectors,
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

    #[test]
    fn clustering() {
        let l = cluster_levels(&[0.0, 1.0, 1.01, 1.02, 2.5], 0.05);
        let d: Vec<usize> = l.iter().map(|x| x.degeneracy).collect();
        assert_eq!(d, vec![1, 3, 1]);
        assert!((l[1].energy - 1.01).abs() < 1e-12);
    }

    #[test]
    fn free_spectrum() {
        let g = Grid::cubic(8, 2.0 * PI).unwrap();
        let r = hamiltonian_spectra(&expr("0"), &g, 7, Method::Dense, 1).unwrap();
        let expected = [0.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5];
        for (e, x) in r.plus.eigenvalues.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12, "{:?}", r.plus.eigenvalues);
        }
        assert_eq!(r.plus.levels[1].degeneracy, 6);
        assert!(r.plus.max_residual < 1e-10);
    }

    #[test]
    fn dense_and_iterative_agree() {
        let g = Grid::cubic(8, 2.0 * PI).unwrap();
        let v = expr("cos(x) + 0.5*cos(y) - 0.3*sin(z)");
        let s = Supercharges::new(&v, &g, Scheme::Spectral).unwrap();
        let h = s.hamiltonian();
        let d = eigs_lowest(&h.h_minus, 6, Method::Dense, 3).unwrap();
        let it = eigs_lowest(&h.h_minus, 6, Method::Iterative, 3).unwrap();
        for (a, b) in d.eigenvalues.iter().zip(&it.eigenvalues) {
            assert!((a - b).abs() < 1e-8, "{:?} vs {:?}", d.eigenvalues, it.eigenvalues);
        }
        assert!(it.max_residual < 1e-7);
        let again = eigs_lowest(&h.h_minus, 6, Method::Iterative, 3).unwrap();
        assert_eq!(again.eigenvalues, it.eigenvalues);
    }

    #[test]
    fn harmonic_sectors_are_shifted_ladders() {
        let g = Grid::cubic(12, 10.0).unwrap();
        let r = hamiltonian_spectra(&expr("0.5*(x^2+y^2+z^2)"), &g, 4, Method::Dense, 1).unwrap();
        for (e, x) in r.minus.eigenvalues.iter().zip([0.0, 1.0, 1.0, 1.0]) {
            assert!((e - x).abs() < 5e-2, "{:?}", r.minus.eigenvalues);
        }
        for (e, x) in r.plus.eigenvalues.iter().zip([3.0, 4.0, 4.0, 4.0]) {
            assert!((e - x).abs() < 5e-2, "{:?}", r.plus.eigenvalues);
        }
    }

    #[test]
    fn free_zero_mode_is_exact() {
        let g = Grid::cubic(8, 2.0 * PI).unwrap();
        let z = zero_mode_check(&expr("0"), &g).unwrap();
        assert_eq!(z.residual_minus, 0.0);
        assert!(!z.normalizable_minus);
    }

    #[test]
    fn inverted_oscillator_swaps_roles() {
        let g = Grid::cubic(16, 12.0).unwrap();
        let up = zero_mode_check(&expr("0.5*(x^2+y^2+z^2)"), &g).unwrap();
        let down = zero_mode_check(&expr("-0.5*(x^2+y^2+z^2)"), &g).unwrap();
        assert!(up.normalizable_minus && !up.normalizable_plus);
        assert!(down.normalizable_plus && !down.normalizable_minus);
        assert!((up.residual_minus - down.residual_plus).abs() < 1e-12);
    }

    #[test]
    fn overflow_is_reported() {
        let g = Grid::cubic(4, 100.0).unwrap();
        assert!(matches!(zero_mode_check(&expr("x^2"), &g), Err(Error::Overflow(_))));
    }

    #[test]
    fn csv_columns() {
        let g = Grid::cubic(4, 2.0 * PI).unwrap();
        let r = hamiltonian_spectra(&expr("0"), &g, 2, Method::Dense, 1).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "sector,index,eigenvalue,residual");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("minus,0,"));
    }
}

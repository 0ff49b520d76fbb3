//! Subcommand execution. Each command resolves its parameters, runs the
//! library and returns a JSON report with an overall pass flag.

use std::f64::consts::PI;

use octosusy::algebra;
use octosusy::expr::{parse_oct_expr_with, parse_scalar_expr, GroupingMode, ScalarExpr, Var};
use octosusy::grid::Grid;
use octosusy::observability::{classify_basis_actions, classify_octop, Verdict, Observability};
use octosusy::operator::{check_all, check_identity, octop_mul, CheckConfig, IdentityId, ProbeMode, Scheme, Supercharges};
use octosusy::spectral::{hamiltonian_spectra, zero_mode_check, Method, DENSE_LIMIT};
use octosusy::susy1d::{build_susy_ops_with, embed_pauli_to_split, pair_spectra, susy_algebra_check};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{AlgebraCommand, Command, FieldArgs, ObservabilityCommand, ProbeArgs};
use crate::config::{at_least, parse_enum, positive, FileConfig, RunConfig, UsageError};

pub enum Failure {
    Usage(UsageError),
    Core(octosusy::Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e)
    }
}

impl From<octosusy::Error> for Failure {
    fn from(e: octosusy::Error) -> Self {
        Failure::Core(e)
    }
}

pub struct Outcome {
    pub config: RunConfig,
    pub pass: bool,
    pub report: Value,
    /// Native tabular form, used instead of the flattened JSON for `--format csv`.
    pub csv: Option<String>,
    /// Replaces the generic text rendering.
    pub text: Option<String>,
    pub summary: String,
}

/// Spectral residual bound `|H psi - E psi|` for every reported pair.
pub const SPECTRUM_RESIDUAL_TOL: f64 = 1e-8;

const TRIG_POTENTIAL: &str = "cos(x) + cos(y) + cos(z)";
const HARMONIC_POTENTIAL: &str = "0.5*(x^2 + y^2 + z^2)";

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn expr(field: &str, text: &str) -> Result<ScalarExpr, UsageError> {
    parse_scalar_expr(text).map_err(|e| UsageError::new(field, e.to_string()))
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

struct Field {
    text: String,
    v: ScalarExpr,
    grid: Grid,
    scheme: Scheme,
}

fn resolve_field(
    a: FieldArgs,
    f: &FileConfig,
    defaults: (&str, usize, f64),
    cfg: &mut RunConfig,
) -> Result<Field, UsageError> {
    let text = pick(a.potential, f.potential.clone(), defaults.0.to_string());
    let v = expr("potential", &text)?;
    let n = at_least("grid", pick(a.grid, f.grid, defaults.1), 4)?;
    let l = positive("box", pick(a.box_len, f.box_len, defaults.2))?;
    let scheme_text = pick(a.scheme, f.scheme.clone(), "spectral".into());
    let scheme: Scheme = parse_enum("scheme", &scheme_text, "spectral, central2")?;
    let grid = Grid::cubic(n, l).map_err(|e| UsageError::new("grid", e.to_string()))?;
    cfg.potential = Some(text.clone());
    cfg.grid = Some(n);
    cfg.box_len = Some(l);
    cfg.scheme = Some(scheme_text);
    Ok(Field { text, v, grid, scheme })
}

fn resolve_probes(a: ProbeArgs, f: &FileConfig, default_mode: ProbeMode, cfg: &mut RunConfig) -> Result<CheckConfig, UsageError> {
    let defaults = CheckConfig::default();
    let probes = at_least("probes", pick(a.probes, f.probes, defaults.probes), 1)?;
    let band = at_least("band", pick(a.band, f.band, defaults.band), 1)?;
    let mode = match a.probe_mode.or(f.probe_mode.clone()) {
        Some(s) => parse_enum("probe_mode", &s, "band-limited, localized")?,
        None => default_mode,
    };
    let tolerance = match a.tolerance.or(f.tolerance) {
        Some(t) => Some(positive("tolerance", t)?),
        None => None,
    };
    cfg.probes = Some(probes);
    cfg.band = Some(band);
    cfg.probe_mode = Some(serde_json::to_value(mode).expect("enum").as_str().expect("string").to_string());
    cfg.tolerance = tolerance;
    Ok(CheckConfig {
        probes,
        seed: cfg.seed,
        band,
        mode,
        tolerance,
        ..defaults
    })
}

pub fn run(command: Command, file: &FileConfig, seed: u64) -> Result<Outcome, Failure> {
    let mut cfg = RunConfig {
        seed,
        ..RunConfig::default()
    };
    match command {
        Command::Algebra(AlgebraCommand::Selftest { samples }) => {
            cfg.command = "algebra selftest".into();
            let samples = at_least("samples", pick(samples, file.samples, 10_000), 1)?;
            cfg.samples = Some(samples);
            let r = algebra::selftest(seed, samples);
            let summary = format!(
                "split table {}/{}, real table {}/{}, {} of {} sampled laws within tolerance",
                r.split_table.matches,
                r.split_table.total,
                r.real_table.matches,
                r.real_table.total,
                r.checks.iter().filter(|c| c.pass).count(),
                r.checks.len()
            );
            Ok(Outcome {
                config: cfg,
                pass: r.pass,
                report: to_value(&r),
                csv: None,
                text: None,
                summary,
            })
        }
        Command::Algebra(AlgebraCommand::Eval { expression, lenient }) => {
            cfg.command = "algebra eval".into();
            let lenient = lenient || file.lenient.unwrap_or(false);
            cfg.expression = Some(expression.clone());
            cfg.lenient = Some(lenient);
            let mode = if lenient { GroupingMode::Lenient } else { GroupingMode::Strict };
            let parsed = parse_oct_expr_with(&expression, mode).map_err(|e| UsageError::new("expression", e.to_string()))?;
            let value = parsed.expr.eval();
            let real = value.to_real().to_string();
            Ok(Outcome {
                config: cfg,
                pass: true,
                report: json!({
                    "parsed": parsed.expr.to_string(),
                    "split": value.to_split().to_string(),
                    "real": real,
                    "warnings": parsed.warnings,
                }),
                csv: None,
                text: Some(format!("{real}\n(split basis: {})\n", value.to_split())),
                summary: real,
            })
        }
        Command::Observability(ObservabilityCommand::Classify { field }) => {
            cfg.command = "observability classify".into();
            let fd = resolve_field(field, file, (TRIG_POTENTIAL, 8, 2.0 * PI), &mut cfg)?;
            let elements = classify_basis_actions();
            const PRESERVING: [&str; 5] = ["1", "i*e7", "-i*e7", "u0", "u0*"];
            let element_rows: Vec<Value> = elements
                .elements
                .iter()
                .map(|e| {
                    let expected = if PRESERVING.contains(&e.element.as_str()) { Verdict::Preserves } else { Verdict::Violates };
                    json!({ "classification": to_value(e), "expected": to_value(&expected), "pass": e.verdict == expected })
                })
                .collect();
            let s = Supercharges::new(&fd.v, &fd.grid, fd.scheme)?;
            let h = s.hamiltonian();
            let ops = [
                ("Q", s.q.clone(), Observability::Unobservable),
                ("Qbar", s.qbar.clone(), Observability::Unobservable),
                ("Q*Qbar", octop_mul(&s.q, &s.qbar), Observability::Observable),
                ("Qbar*Q", octop_mul(&s.qbar, &s.q), Observability::Observable),
                ("H", h.h.clone(), Observability::Observable),
            ];
            let mut op_rows = Vec::new();
            for (name, op, expected) in ops {
                let c = classify_octop(&op, seed)?;
                op_rows.push(json!({
                    "name": name,
                    "classification": to_value(&c),
                    "expected": to_value(&expected),
                    "pass": c.verdict == expected,
                }));
            }
            let rows_pass = |rows: &[Value]| rows.iter().all(|r| r["pass"] == Value::Bool(true));
            let pass = rows_pass(&element_rows) && rows_pass(&op_rows);
            let preserving: Vec<&str> = elements
                .elements
                .iter()
                .filter(|e| e.verdict == Verdict::Preserves)
                .map(|e| e.element.as_str())
                .collect();
            Ok(Outcome {
                summary: format!("preserving elements {{{}}}; potential {}", preserving.join(", "), fd.text),
                config: cfg,
                pass,
                report: json!({ "elements": element_rows, "operators": op_rows }),
                csv: None,
                text: None,
            })
        }
        Command::Identities(a) => {
            cfg.command = "identities".into();
            let fd = resolve_field(a.field, file, (TRIG_POTENTIAL, 16, 2.0 * PI), &mut cfg)?;
            let mut check = resolve_probes(a.probe, file, ProbeMode::BandLimited, &mut cfg)?;
            check.scheme = fd.scheme;
            let which = pick(a.identity, file.identity.clone(), "all".into());
            cfg.identity = Some(which.clone());
            let reports = if which == "all" {
                check_all(&fd.v, &fd.grid, &check)?
            } else {
                let id = IdentityId::from_id(&which).ok_or_else(|| {
                    let ids: Vec<&str> = IdentityId::ALL.iter().map(|i| i.id()).collect();
                    UsageError::new("identity", format!("`{which}` is not `all` or one of {}", ids.join(", ")))
                })?;
                vec![check_identity(id, &fd.v, &fd.grid, &check)?]
            };
            let pass = reports.iter().all(|r| r.pass);
            let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
            Ok(Outcome {
                summary: format!(
                    "{} of {} identities pass{}",
                    reports.len() - failed.len(),
                    reports.len(),
                    if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
                ),
                config: cfg,
                pass,
                report: json!({ "identities": to_value(&reports) }),
                csv: None,
                text: None,
            })
        }
        Command::Susy1d(a) => {
            cfg.command = "susy1d".into();
            let text = pick(a.superpotential, file.superpotential_u.clone(), "x^2".into());
            let u = expr("superpotential_u", &text)?;
            let n = at_least("grid", pick(a.grid, file.grid, 256), 8)?;
            if n > DENSE_LIMIT {
                return Err(UsageError::new("grid", format!("{n} exceeds the dense limit {DENSE_LIMIT}")).into());
            }
            let l = positive("box", pick(a.box_len, file.box_len, 20.0))?;
            let k = at_least("k", pick(a.k, file.k, 4), 1)?;
            if k > n {
                return Err(UsageError::new("k", format!("{k} exceeds the {n} grid points")).into());
            }
            let grid = Grid::line(n, l).map_err(|e| UsageError::new("grid", e.to_string()))?;
            // Band-limited probes are exact only when U' is periodic on the box.
            let periodic = u.differentiate(Var::X).trig_bandwidth(l).is_some();
            let default_mode = if periodic { ProbeMode::BandLimited } else { ProbeMode::Localized };
            cfg.superpotential_u = Some(text);
            cfg.grid = Some(n);
            cfg.box_len = Some(l);
            cfg.k = Some(k);
            let check = resolve_probes(a.probe, file, default_mode, &mut cfg)?;
            let pair = build_susy_ops_with(&u, &grid, Scheme::Spectral)?;
            let algebra_report = susy_algebra_check(&pair, &check)?;
            let embedding = embed_pauli_to_split();
            let spectra = pair_spectra(&u, &grid, k)?;
            let pass = algebra_report.pass && embedding.pass && spectra.pass;
            Ok(Outcome {
                summary: format!(
                    "algebra {}, embedding {}, pairing max gap {:.3e}; H+ {:?}; H- {:?}",
                    verdict(algebra_report.pass),
                    verdict(embedding.pass),
                    spectra.max_pair_difference,
                    spectra.plus.eigenvalues,
                    spectra.minus.eigenvalues
                ),
                config: cfg,
                pass,
                report: json!({ "algebra": to_value(&algebra_report), "embedding": to_value(&embedding), "spectra": to_value(&spectra) }),
                csv: None,
                text: None,
            })
        }
        Command::Spectrum(a) => {
            cfg.command = "spectrum".into();
            let fd = resolve_field(a.field, file, (HARMONIC_POTENTIAL, 16, 12.0), &mut cfg)?;
            if fd.scheme != Scheme::Spectral {
                return Err(UsageError::new("scheme", "spectra are computed with the spectral scheme only").into());
            }
            let k = at_least("k", pick(a.k, file.k, 10), 1)?;
            let method_text = pick(a.method, file.method.clone(), "dense".into());
            let method: Method = parse_enum("method", &method_text, "dense, iterative")?;
            if method == Method::Dense && fd.grid.len() > DENSE_LIMIT {
                return Err(UsageError::new(
                    "grid",
                    format!("N^3 = {} exceeds the dense limit {DENSE_LIMIT}; use --method iterative", fd.grid.len()),
                )
                .into());
            }
            if k >= fd.grid.len() {
                return Err(UsageError::new("k", format!("{k} must be below N^3 = {}", fd.grid.len())).into());
            }
            let zero_modes = a.zero_modes || file.zero_modes.unwrap_or(false);
            cfg.k = Some(k);
            cfg.method = Some(method_text);
            cfg.zero_modes = Some(zero_modes);
            let r = hamiltonian_spectra(&fd.v, &fd.grid, k, method, seed)?;
            let residual_pass = r.plus.max_residual <= SPECTRUM_RESIDUAL_TOL && r.minus.max_residual <= SPECTRUM_RESIDUAL_TOL;
            let zm = if zero_modes { Some(zero_mode_check(&fd.v, &fd.grid)?) } else { None };
            let pass = residual_pass && zm.as_ref().is_none_or(|z| z.pass);
            let mut report = json!({
                "spectrum": to_value(&r),
                "residual_tolerance": SPECTRUM_RESIDUAL_TOL,
                "residual_pass": residual_pass,
            });
            if let Some(z) = &zm {
                report["zero_modes"] = to_value(z);
            }
            Ok(Outcome {
                summary: format!("H+ {:?}; H- {:?}", r.plus.eigenvalues, r.minus.eigenvalues),
                csv: Some(r.to_csv()),
                text: None,
                config: cfg,
                pass,
                report,
            })
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

//! Command-line surface. Every tunable is optional here so that values from
//! `--config` can fill the gaps; defaults are applied during resolution.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "octosusy", version, about = "Split-octonion supersymmetry verification suites")]
pub struct Cli {
    /// JSON file mirroring the flags; explicit flags win on conflict.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Report format: json, csv or text.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for every random draw (decimal or 0x-prefixed hex).
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Omit the metadata block (timestamp, version) so reports compare byte for byte.
    #[arg(long, global = true)]
    pub no_metadata: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiplication tables and sampled algebra laws.
    #[command(subcommand)]
    Algebra(AlgebraCommand),
    /// Representability of basis elements and supercharge operators.
    #[command(subcommand)]
    Observability(ObservabilityCommand),
    /// Probe-based checks of the octonionic operator identities.
    Identities(IdentitiesArgs),
    /// One-dimensional 2x2 supersymmetric quantum mechanics.
    Susy1d(Susy1dArgs),
    /// Lowest eigenvalues of the partner Hamiltonians on a 3D grid.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Subcommand)]
pub enum AlgebraCommand {
    /// Exhaustive table checks plus sampled composition, alternativity and
    /// Zorn homomorphism laws.
    Selftest {
        /// Random pairs per sampled law.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Evaluate an octonion expression with the grouping as written.
    Eval {
        expression: String,
        /// Left-associate unparenthesized chains instead of rejecting them.
        #[arg(long)]
        lenient: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum ObservabilityCommand {
    /// Classify the named basis elements and the operators built from a potential.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
    },
}

/// Potential and 3D grid.
#[derive(Debug, Args)]
pub struct FieldArgs {
    #[arg(long)]
    pub potential: Option<String>,
    /// Points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Box side length.
    #[arg(long = "box")]
    pub box_len: Option<f64>,
    /// Derivative scheme: spectral or central2.
    #[arg(long)]
    pub scheme: Option<String>,
}

/// Probe settings shared by the identity and 1D algebra checks.
#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub probes: Option<usize>,
    /// Per-axis probe bandwidth M.
    #[arg(long)]
    pub band: Option<usize>,
    /// band-limited or localized.
    #[arg(long)]
    pub probe_mode: Option<String>,
    /// Overrides every upper tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct IdentitiesArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub probe: ProbeArgs,
    /// Identity id, or `all`.
    #[arg(long)]
    pub identity: Option<String>,
}

#[derive(Debug, Args)]
pub struct Susy1dArgs {
    /// Superpotential U(x).
    #[arg(long = "superpotential-U", alias = "superpotential-u")]
    pub superpotential: Option<String>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long = "box")]
    pub box_len: Option<f64>,
    /// Number of levels per sector.
    #[arg(short = 'k', long = "levels")]
    pub k: Option<usize>,
    #[command(flatten)]
    pub probe: ProbeArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Number of eigenvalues per sector.
    #[arg(short = 'k', long = "levels")]
    pub k: Option<usize>,
    /// dense or iterative.
    #[arg(long)]
    pub method: Option<String>,
    /// Also evaluate the analytic zero modes exp(-V) and exp(+V).
    #[arg(long)]
    pub zero_modes: bool,
}

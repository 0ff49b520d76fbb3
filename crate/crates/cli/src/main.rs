//! `octosusy` command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (the report is
//! still written), 2 for usage and configuration errors.

mod args;
mod commands;
mod config;
mod render;

use std::io::Write;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::{json, Value};

use args::{AlgebraCommand, Cli, Command};
use commands::{Failure, Outcome};
use config::{parse_format, parse_seed, seed_from_file, FileConfig, Format, UsageError};

/// Version of the report layout.
const SCHEMA: u32 = 1;

fn configure_threads() -> Result<(), UsageError> {
    let Ok(raw) = std::env::var("OCTOSUSY_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError::new("OCTOSUSY_THREADS", format!("`{raw}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError::new("OCTOSUSY_THREADS", e.to_string()))
}

fn document(outcome: &Outcome, metadata: bool) -> Value {
    let mut doc = json!({
        "schema": SCHEMA,
        "command": outcome.config.command,
        "config": outcome.config,
        "pass": outcome.pass,
        "report": outcome.report,
    });
    if metadata {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        doc["metadata"] = json!({ "timestamp_unix": secs, "version": env!("CARGO_PKG_VERSION") });
    }
    doc
}

fn render(doc: &Value, outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Text => outcome.text.clone().unwrap_or_else(|| render::to_text(doc)),
        Format::Csv => outcome.csv.clone().unwrap_or_else(|| render::to_csv(doc)),
    }
}

fn execute(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let seed = match (&cli.seed, &file.seed) {
        (Some(s), _) => parse_seed(s)?,
        (None, Some(v)) => seed_from_file(v)?,
        (None, None) => octosusy::DEFAULT_SEED,
    };
    let default_format = match cli.command {
        Command::Algebra(AlgebraCommand::Eval { .. }) => "text",
        _ => "json",
    };
    let format = parse_format(cli.format.as_deref().or(file.format.as_deref()).unwrap_or(default_format))?;
    let out = cli.out.clone().or(file.out.clone());
    let metadata = !(cli.no_metadata || file.no_metadata.unwrap_or(false));

    let outcome = commands::run(cli.command, &file, seed)?;
    let doc = document(&outcome, metadata);
    let text = render(&doc, &outcome, format);
    match out {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| UsageError::new("out", format!("{}: {e}", path.display())))?;
            println!("{}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.summary);
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not an error worth reporting.
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    Ok(if outcome.pass { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                octosusy::Error::ConvergenceFailure { .. } | octosusy::Error::GridMismatch(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

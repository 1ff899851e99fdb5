//! `twistcode`: batch runner for derivations, invariant suites and Monte
//! Carlo experiments.
//!
//! Exit codes: 0 success, 1 configuration error, 2 invariant failure.

mod config;
mod experiments;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use config::{config_hash, resolve, BackendChoice, ConfigError, ExperimentConfig, Format, Kind, ReadoutChoice, Resolved};
use experiments::Outcome;

/// Report layout version; bump on incompatible changes.
const SCHEMA: u32 = 1;
const WORKERS_VAR: &str = "TWISTCODE_WORKERS";

#[derive(Parser)]
#[command(name = "twistcode", version, about = "Twist defects in the planar surface code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jordan-Wigner report: plaquette images, unpaired modes, parity operators.
    Derive(Common),
    /// Run the invariant suite.
    Verify(Common),
    /// Trace one measurement-based braid cycle on an oracle backend.
    Mbb(Common),
    /// Parity-flip statistics after repeated braids.
    Stats(Common),
    /// Cross-check the stabilizer simulator against dense state vectors.
    OracleCheck(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment description.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum)]
    backend: Option<BackendChoice>,
    #[arg(long, value_enum)]
    readout: Option<ReadoutChoice>,
    /// Braid counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n_braids: Option<Vec<usize>>,
    #[arg(long)]
    sequence_length: Option<usize>,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    kind: &'static str,
    config_hash: &'a str,
    config: &'a Resolved,
    passed: bool,
    failures: &'a [String],
    results: &'a Value,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Output(String),
}

fn configure_workers() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| ConfigError::Invalid(format!("{WORKERS_VAR}={v} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError::Invalid(format!("{WORKERS_VAR}: {e}")))
}

fn render(r: &Resolved, outcome: &Outcome, hash: &str) -> Result<String, CliError> {
    let passed = outcome.failures.is_empty();
    match r.format {
        Format::Json => {
            let rep = Report {
                schema: SCHEMA,
                tool: "twistcode",
                version: twistcode::VERSION,
                kind: r.kind.name(),
                config_hash: hash,
                config: r,
                passed,
                failures: &outcome.failures,
                results: &outcome.results,
            };
            let mut s = serde_json::to_string_pretty(&rep).map_err(|e| CliError::Output(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<&str> = vec!["schema", "version", "config_hash"];
            header.extend(&outcome.table.header);
            w.write_record(&header).map_err(|e| CliError::Output(e.to_string()))?;
            for row in &outcome.table.rows {
                let mut rec = vec![SCHEMA.to_string(), twistcode::VERSION.to_string(), hash.to_string()];
                rec.extend(row.iter().cloned());
                w.write_record(&rec).map_err(|e| CliError::Output(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Text => {
            let body = outcome.text.clone().unwrap_or_default();
            let status = if passed { "passed".to_string() } else { format!("FAILED: {}", outcome.failures.join("; ")) };
            Ok(format!("twistcode {} schema {SCHEMA} config {hash}\n{body}\n{status}\n", twistcode::VERSION))
        }
    }
}

fn emit(r: &Resolved, body: &str) -> Result<(), CliError> {
    match &r.out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Output(e.to_string())),
    }
}

fn run(kind: Kind, c: Common) -> Result<bool, CliError> {
    let file = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let flags = ExperimentConfig {
        kind: None,
        seed: c.seed,
        shots: c.shots,
        n_braids: c.n_braids,
        backend: c.backend,
        readout: c.readout,
        sequence_length: c.sequence_length,
        lattice: None,
        out: c.out,
        format: c.format,
    };
    let r = resolve(kind, file.merge(flags))?;
    configure_workers()?;
    let hash = config_hash(&r);
    let outcome = match kind {
        Kind::Derive => experiments::derive(&r),
        Kind::Verify => experiments::verify(&r),
        Kind::Mbb => experiments::mbb(&r),
        Kind::Stats => experiments::stats(&r),
        Kind::OracleCheck => experiments::oracle(&r),
    };
    // A library error mid-run is reported as a failed invariant.
    let outcome = outcome.unwrap_or_else(|e| Outcome {
        results: Value::Null,
        failures: vec![format!("run completed without error: {e}")],
        table: Default::default(),
        text: None,
    });
    emit(&r, &render(&r, &outcome, &hash)?)?;
    for f in &outcome.failures {
        eprintln!("invariant violated: {f}");
    }
    Ok(outcome.failures.is_empty())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (kind, common) = match cli.command {
        Command::Derive(c) => (Kind::Derive, c),
        Command::Verify(c) => (Kind::Verify, c),
        Command::Mbb(c) => (Kind::Mbb, c),
        Command::Stats(c) => (Kind::Stats, c),
        Command::OracleCheck(c) => (Kind::OracleCheck, c),
    };
    match run(kind, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(CliError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

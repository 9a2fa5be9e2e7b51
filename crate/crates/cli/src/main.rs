//! `rabi-regimes`: spectra, regime boundaries, observables and survival
//! traces of the quantum Rabi model as plot-ready CSV or JSON.
//!
//! Energies are in units of omega, couplings are `g0/omega` and times are
//! `omega t`. Exit status is 0 on success, 1 when a computation failed and
//! 2 for usage errors.

mod commands;
mod output;
mod state_spec;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::{Format, Table};

pub const THREADS_ENV: &str = "RABI_REGIMES_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "rabi-regimes",
    version,
    about = "Coupling-regime analysis of the quantum Rabi model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact and approximate energies over a coupling grid.
    Spectrum(commands::SpectrumArgs),
    /// Degeneracy crossings, the boundary fit and both boundary curves.
    Boundaries(commands::BoundariesArgs),
    /// Regime label of a coupling and a state or mean energy.
    Classify(commands::ClassifyArgs),
    /// Excitations, Fano-Mandel parameter and entropy of eigenstates.
    Observables(commands::ObservablesArgs),
    /// Survival probability and parity leakage of an initial state.
    Dynamics(commands::DynamicsArgs),
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Qubit splitting Omega/omega.
    #[arg(long, default_value_t = 1.0)]
    pub omega_q: f64,
    /// Output format (csv by default; classify defaults to json).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<std::path::PathBuf>,
    /// Fixed photon cutoff instead of automatic convergence.
    #[arg(long)]
    pub nmax: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl From<rabi_core::Error> for CliError {
    fn from(e: rabi_core::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

/// Result of a subcommand: the table plus whether any row failed.
pub struct Outcome {
    pub table: Table,
    pub failed: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Compute(e.to_string()))
}

fn emit(outcome: &Outcome, format: Format, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Compute(format!("writing output: {e}"));
    match out {
        Some(path) => {
            let mut buf = Vec::new();
            outcome.table.write(format, &mut buf).map_err(io)?;
            std::fs::write(path, buf).map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            outcome.table.write(format, &mut lock).map_err(io)?;
            lock.flush().map_err(io)
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let (outcome, common, default_format) = match cli.command {
        Command::Spectrum(a) => (commands::spectrum(&a)?, a.common, Format::Csv),
        Command::Boundaries(a) => (commands::boundaries(&a)?, a.common, Format::Csv),
        Command::Classify(a) => (commands::classify(&a)?, a.common, Format::Json),
        Command::Observables(a) => (commands::observables(&a)?, a.common, Format::Csv),
        Command::Dynamics(a) => (commands::dynamics(&a)?, a.common, Format::Csv),
    };
    emit(&outcome, common.format.unwrap_or(default_format), common.out.as_deref())?;
    Ok(!outcome.failed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

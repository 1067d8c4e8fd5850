//! Command-line front end: figure-grade data files and machine-readable QFI
//! reports for Gaussian, photon-subtracted and photon-added states.
//!
//! Exit codes: 0 success, 2 argument error, 3 numerical-domain error,
//! 4 conformance-residual failure (`qfi --method all`).

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qfi",
    version,
    about = "Quantum Fisher information for Gaussian states and their \
             photon-subtracted/-added variants"
)]
struct Cli {
    /// JSON file mirroring the subcommand flags; explicit flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wigner function on a phase-space grid (CSV: x,p,w)
    Wigner(commands::WignerArgs),
    /// QFI of one parametrized state by one or all methods (JSON report)
    Qfi(commands::QfiArgs),
    /// Shift-only subtracted QFI surface over (xbar, gamma) (CSV)
    Sweep(commands::SweepArgs),
    /// Single-photon heralding probability over (r, delta) (CSV)
    Herald(commands::HeraldArgs),
    /// Preparation-rate-aware effective QFI (JSON report)
    Effective(commands::EffectiveArgs),
}

/// Error category determining the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, malformed ranges, unreadable config: exit 2.
    Usage(String),
    /// Domain errors from the numerics (vacuum subtraction etc.): exit 3.
    Domain(String),
    /// Cross-method residual above the documented tolerance: exit 4.
    Conformance(String),
    /// I/O failure writing output: exit 1.
    Io(String),
}

impl From<qfi_core::Error> for CliError {
    fn from(e: qfi_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let result = match cli.command {
        Command::Wigner(args) => commands::run_wigner(args, &config),
        Command::Qfi(args) => commands::run_qfi(args, &config),
        Command::Sweep(args) => commands::run_sweep(args, &config),
        Command::Herald(args) => commands::run_herald(args, &config),
        Command::Effective(args) => commands::run_effective(args, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    let (code, label, msg) = match e {
        CliError::Io(m) => (1, "io error", m),
        CliError::Usage(m) => (2, "argument error", m),
        CliError::Domain(m) => (3, "domain error", m),
        CliError::Conformance(m) => (4, "conformance failure", m),
    };
    eprintln!("qfi: {label}: {msg}");
    ExitCode::from(code)
}

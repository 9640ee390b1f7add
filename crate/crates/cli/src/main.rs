mod commands;
mod config;
mod output;
mod verify;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Flags, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "bergman", version, about = "Bergman-bundle curvature checks on the complex unit ball")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Verb {
    /// Exact and Monte Carlo ball moments.
    Moments,
    /// Bergman kernel: closed form against the truncated series.
    Kernel,
    /// Model curvature per basis vector, with sandwich bounds and brute-force residuals.
    Curvature,
    /// Runs the verification suites; exit status 1 on any failure.
    Verify,
    /// Curvature corrections at the osculation point for a metric jet.
    Perturb,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files (exit 2).
    Usage(String),
    /// Unexpected failure while computing or writing (exit 2).
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<bergman_core::Error> for CliError {
    fn from(e: bergman_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Whether every check in a verb passed.
pub type Verdict = bool;

fn run(cli: Cli) -> Result<Verdict, CliError> {
    let cfg = RunConfig::resolve(cli.flags)?;
    match cli.verb {
        Verb::Moments => commands::moments(&cfg),
        Verb::Kernel => commands::kernel(&cfg),
        Verb::Curvature => commands::curvature(&cfg),
        Verb::Verify => verify::run(&cfg),
        Verb::Perturb => commands::perturb(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

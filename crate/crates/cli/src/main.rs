//! `prequant` command-line front end.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 configuration
//! error, 3 numerical failure, 4 a verification check failed (the report is
//! still written).

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "prequant", version, about = "Hamiltonian flows, prequantum lifts and their invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
pub struct Common {
    /// Scenario file (JSON)
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the scenario's seed
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    /// Tolerance override, repeatable
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
}

#[derive(Args)]
pub struct QuantumArgs {
    /// Quantum spec file (JSON)
    #[arg(long, visible_alias = "spec")]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BracketArgs {
    #[command(flatten)]
    pub common: Common,
    /// First observable
    #[arg(long)]
    pub f: String,
    /// Second observable
    #[arg(long)]
    pub g: String,
    /// Number of seeded sample points
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate Hamilton's equations and write the trajectory
    Simulate(TrajectoryArgs),
    /// Integrate the lifted flow and write trajectory plus phase
    Lift(TrajectoryArgs),
    /// Run every invariant suite and write a JSON report
    Verify(ReportArgs),
    /// Check the prequantum operator conditions and write a JSON report
    Opcheck(ReportArgs),
    /// Propagate a finite-dimensional quantum state
    Quantum(QuantumArgs),
    /// Print both Poisson bracket conventions of two observables
    Brackets(BracketArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Lift(args) => commands::lift(args),
        Command::Verify(args) => commands::verify(args),
        Command::Opcheck(args) => commands::opcheck(args),
        Command::Quantum(args) => commands::quantum(args),
        Command::Brackets(args) => commands::brackets(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

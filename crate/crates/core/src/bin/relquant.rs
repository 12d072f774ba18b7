use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use relquant::harness::{run, RunOptions, Subcommand};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Leapfrog evolution of the configured packet
    Evolve,
    /// Free stationary spectrum and the mass shell
    Stationary,
    /// Phase-space transform positivity and momentum correspondence
    Transform,
    /// Madelung residuals, slow-packet limit, antiparticle density
    Madelung,
    /// Guidance-equation paths
    Trajectories,
    /// Self-consistent weak-field metric
    Gravity,
    /// Every acceptance check
    VerifyAll,
    /// Refinement study of the residuals
    Converge,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Evolve => Subcommand::Evolve,
            Command::Stationary => Subcommand::Stationary,
            Command::Transform => Subcommand::Transform,
            Command::Madelung => Subcommand::Madelung,
            Command::Trajectories => Subcommand::Trajectories,
            Command::Gravity => Subcommand::Gravity,
            Command::VerifyAll => Subcommand::VerifyAll,
            Command::Converge => Subcommand::Converge,
        }
    }
}

/// Relativistic density-function experiments. Exit status: 0 all checks
/// pass, 1 a check fails, 2 configuration error.
#[derive(Debug, Parser)]
#[command(name = "relquant", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run file (defaults to the built-in configuration)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for data files, plots and the report
    #[arg(long)]
    out: Option<PathBuf>,
    /// Refinement levels for convergence studies
    #[arg(long)]
    levels: Option<usize>,
    /// Seed for randomised checks
    #[arg(long)]
    seed: Option<u64>,
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
    let opts = RunOptions { subcommand: cli.command.into(), config: cli.config, out: cli.out, levels: cli.levels, seed: cli.seed };
    ExitCode::from(run(&opts) as u8)
}

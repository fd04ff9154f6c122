//! `steklov`: drives the solver from a JSON configuration.
//!
//! Exit codes: 0 success, 1 configuration or i/o error, 2 non-convergence,
//! 3 a checked invariant failed.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "steklov", version, about = "Optimal design of Orlicz-growth Steklov eigenvalues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized checks; overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sampled checks of the growth-law axioms.
    YoungCheck,
    /// One state solve at a fixed density.
    Solve,
    /// Alternating minimization over densities of volume `c`.
    Optimize,
    /// Hole problem for `α → ∞`, with an optional volume grid.
    Limit,
    /// Warm-started sweep over the configured `alpha` list.
    Sweep,
    /// Cap symmetrization of a field or of the optimal state on the disk.
    Symmetry,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut config = RunConfig::load(path)?;
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Command::YoungCheck = cli.command {
        config.laws()?;
        let out = commands::Output::new(config.output_dir.clone(), cli.quiet)?;
        return commands::young_check(&config, &out);
    }
    let resolved = config.resolve()?;
    let out = commands::Output::new(resolved.config.output_dir.clone(), cli.quiet)?;
    match cli.command {
        Command::YoungCheck => unreachable!(),
        Command::Solve => commands::solve(&resolved, &out),
        Command::Optimize => commands::optimize(&resolved, &out),
        Command::Limit => commands::limit(&resolved, &out),
        Command::Sweep => commands::sweep(&resolved, &out),
        Command::Symmetry => commands::symmetry(&resolved, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("steklov: {e}");
            e.exit_code()
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use turnpike_cli::commands::{cmd_gamma_probe, cmd_optimize, cmd_solve, cmd_sweep};
use turnpike_cli::RunArgs;

/// Shape optimization of the heat equation and its long-horizon limit.
///
/// Exit status: 0 on success, 2 for usage or configuration errors, 3 for
/// numerical failures. Set TURNPIKE_LOG (e.g. `info`) for progress logs.
#[derive(Parser)]
#[command(name = "turnpike", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Poisson or heat equation on a mask.
    Solve(Common),
    /// Optimize the domain for the stationary or one finite-horizon cost.
    Optimize(Common),
    /// Sweep horizons, comparing finite-horizon and stationary optima.
    Sweep(Common),
    /// Shrink a hole toward a base mask and track the Poisson solutions.
    GammaProbe(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration or a previous run's manifest.json.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Run seed (overrides the configuration).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Write into a non-empty output directory.
    #[arg(long)]
    force: bool,
}

impl From<Common> for RunArgs {
    fn from(c: Common) -> Self {
        RunArgs {
            config: c.config,
            out: c.out,
            seed: c.seed,
            jobs: c.jobs,
            force: c.force,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TURNPIKE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(c) => cmd_solve(&c.into()),
        Command::Optimize(c) => cmd_optimize(&c.into()),
        Command::Sweep(c) => cmd_sweep(&c.into()),
        Command::GammaProbe(c) => cmd_gamma_probe(&c.into()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `hypermin`: minimal helicoids and catenoids in hyperbolic space.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use hypermin::stability::StabilityError;

use config::{Common, RunConfig};

#[derive(Parser)]
#[command(name = "hypermin", version, about = "Minimal helicoids and catenoids in hyperbolic 3-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a surface on a (u, v) grid and write a mesh (OBJ) or points (CSV).
    Sample,
    /// Run the geometric self-checks; exits 1 if any fails.
    Check,
    /// Lowest Jacobi eigenvalue on one domain.
    Lambda1,
    /// Lowest eigenvalue of the helicoid over pitches and nested squares.
    Sweep,
    /// Bisect for the critical pitch.
    Critical,
    /// Compare stability of a helicoid and its conjugate ball catenoid.
    Conjugacy,
    /// Tabulate a catenoid generating curve.
    Profile,
}

fn configure_threads() -> Result<()> {
    if let Ok(n) = std::env::var("HYPERMIN_THREADS") {
        let n: usize = n.parse().map_err(|e| anyhow::anyhow!("HYPERMIN_THREADS={n:?}: {e}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let cfg = RunConfig::resolve(cli.common)?;
    match cli.command {
        Command::Sample => commands::sample::run(&cfg)?,
        Command::Check => return commands::check::run(&cfg),
        Command::Lambda1 => commands::spectral::lambda1(&cfg)?,
        Command::Sweep => commands::spectral::sweep(&cfg)?,
        Command::Critical => commands::spectral::critical(&cfg)?,
        Command::Conjugacy => commands::spectral::conjugacy(&cfg)?,
        Command::Profile => commands::profile::run(&cfg)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let stalled = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<StabilityError>(), Some(StabilityError::NoConvergence { .. })));
            ExitCode::from(if stalled { 3 } else { 2 })
        }
    }
}

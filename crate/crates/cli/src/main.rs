//! Command-line runner for loop anholonomy computations: `run` evaluates a
//! configured parameter loop, `verify` executes named invariant suites, and
//! `sweep` tracks convergence under resolution doubling.

mod config;
mod fail;
mod report;
mod run;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::fail::Failure;
use crate::run::OutputOptions;

#[derive(Parser)]
#[command(
    name = "anholonomy",
    version,
    about = "Geometric phases for deformed oscillator loops"
)]
struct Cli {
    /// Directory that receives the CSV and JSON outputs.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Override the Fock-space dimension from the config.
    #[arg(long, global = true)]
    dim: Option<usize>,

    /// Override the number of loop segments from the config.
    #[arg(long, global = true)]
    segments: Option<usize>,

    /// Also write the per-segment overlap arguments to integrand.csv.
    #[arg(long, global = true)]
    emit_integrand: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the loop described by a JSON config and write phase tables.
    Run { config: PathBuf },
    /// Run a named suite of invariant checks at pinned settings.
    Verify { suite: verify::Suite },
    /// Re-evaluate a loop while doubling resolution and dimension.
    Sweep {
        config: PathBuf,
        /// Number of simultaneous (dim, segments) doublings to apply.
        #[arg(long, default_value_t = 2)]
        doublings: u32,
    },
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let opts = OutputOptions {
        out_dir: cli.out_dir,
        dim: cli.dim,
        segments: cli.segments,
        emit_integrand: cli.emit_integrand,
    };
    match cli.command {
        Command::Run { config } => run::run(&config, &opts),
        Command::Verify { suite } => verify::verify(suite),
        Command::Sweep { config, doublings } => sweep::sweep(&config, doublings, &opts),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

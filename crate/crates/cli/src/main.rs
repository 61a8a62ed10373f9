//! `eqopt`: generate instances, run solvers, benchmark, certify rates and
//! plot convergence for equality-constrained strongly convex problems.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eqopt_cli::commands;
use eqopt_core::Error;

#[derive(Parser)]
#[command(name = "eqopt")]
#[command(about = "Solver benchmark and rate-certificate toolkit for min f(x) s.t. Ex = q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the instance seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the instance and write its regenerable descriptor.
    Generate(CommonArgs),
    /// Run the single configured algorithm; write trace CSV + run record.
    Solve(CommonArgs),
    /// Run all configured cells (default: GDA, PAPC, IGM l=0.5/1/2).
    Bench(CommonArgs),
    /// Check the design conditions and rate formulas; write certificate.
    Certify(CommonArgs),
    /// Rebuild the convergence SVG from traces on disk.
    Plot(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => commands::cmd_generate(&a.config, &a.out, a.seed),
        Command::Solve(a) => commands::cmd_solve(&a.config, &a.out, a.seed),
        Command::Bench(a) => commands::cmd_bench(&a.config, &a.out, a.seed),
        Command::Certify(a) => commands::cmd_certify(&a.config, &a.out, a.seed),
        Command::Plot(a) => commands::cmd_plot(&a.config, &a.out, a.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err @ Error::InvalidParams(_)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

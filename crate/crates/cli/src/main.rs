//! `cirminus` batch frontend: calibration, Gram-Charlier and Monte Carlo
//! pricing, CMS rates, Bermudan swaptions and raw path dumps.
//!
//! Exit codes: 0 success, 2 bad input, 3 numerical failure or a calibration
//! that hit its budget (its result is still written).

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::RunArgs;

#[derive(Parser)]
#[command(name = "cirminus", version, about = "Difference-of-two-CIR short-rate model toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the model to a slice of the swaption surface.
    Calibrate(RunArgs),
    /// Gram-Charlier (and optionally Monte Carlo) European swaption prices.
    Price(RunArgs),
    /// Par CMS rates by Monte Carlo.
    Cms(RunArgs),
    /// Bermudan swaptions by least-squares Monte Carlo.
    Bermudan(RunArgs),
    /// Simulate and dump factor paths and discounts.
    Simulate(RunArgs),
}

/// How a command finished when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotConverged,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<cirminus::Error>(),
            Some(cirminus::Error::Singularity(_) | cirminus::Error::ExpansionUndefined { .. })
        )
    });
    if numerical {
        3
    } else {
        2
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let (command, args): (fn(&RunArgs) -> anyhow::Result<Status>, RunArgs) = match cli.command {
        Command::Calibrate(a) => (commands::calibrate, a),
        Command::Price(a) => (commands::price, a),
        Command::Cms(a) => (commands::cms, a),
        Command::Bermudan(a) => (commands::bermudan, a),
        Command::Simulate(a) => (commands::simulate, a),
    };
    let args = args.resolve()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        pool = pool.num_threads(n);
    }
    pool.build()?.install(|| command(&args))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => {
            log::warn!("calibration did not converge; results were written anyway");
            ExitCode::from(3)
        }
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! `flevy`: simulate, verify and export fractional Lévy-driven processes.

mod config;
mod csv;
mod error;
mod pipeline;
mod plotdata;
mod simulate;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::simulate::SimKind;
use crate::verify::Suite;

#[derive(Parser)]
#[command(name = "flevy", version, about = "Fractional Lévy-driven OU processes: simulation and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and write it as `t,value` CSV.
    Simulate {
        kind: SimKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `ensemble.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a verification suite and print one line per check.
    Verify {
        suite: Suite,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Merge `t,value` files into one `series,t,value` file.
    Plotdata {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(config: Option<&Path>, seed: Option<u64>) -> CliResult<RunConfig> {
    let mut cfg = match config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        cfg.set("ensemble.seed", s);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { kind, config, out, seed } => {
            let cfg = load(Some(&config), seed)?;
            let path = simulate::simulate(kind, &cfg)?;
            csv::write_file(&out, &csv::path_to_csv(&path))
        }
        Command::Verify { suite, config, seed } => {
            let cfg = load(config.as_deref(), seed)?;
            let checks = verify::run_suite(suite, &cfg)?;
            print!("{}", verify::render(&checks));
            let failed = checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                Err(CliError::VerificationFailed(failed))
            } else {
                Ok(())
            }
        }
        Command::Plotdata { inputs, out } => csv::write_file(&out, &plotdata::plotdata(&inputs)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("flevy: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `rcip run <config-file> [--out <path>] [--threads N]`
//!
//! Exit status: 0 when every row succeeded, 2 when some rows failed (their
//! cells are left blank), 1 when the configuration or output is unusable.

mod config;
mod run;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "rcip", version, about = "Runs compressed integral-equation experiments and writes CSV tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output file; defaults to the config's `out` key, then standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for independent rows.
        #[arg(long, env = "RCIP_THREADS")]
        threads: Option<usize>,
    },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let Command::Run { config, out, threads } = Cli::parse().command;
    let cfg = match ExperimentConfig::from_file(&config) {
        Ok(c) => c,
        Err(e) => return fail(format!("{}: {e}", config.display())),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let outcome = run::run(&cfg, &pool);
    let csv = outcome.table.to_csv();
    match out.or(cfg.out) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                return fail(format!("{}: {e}", path.display()));
            }
        }
        None => print!("{csv}"),
    }
    for f in &outcome.failures {
        eprintln!("row failed: {f}");
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

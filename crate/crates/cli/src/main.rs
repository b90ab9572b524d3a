mod args;
mod commands;
mod config;
mod output;
mod reproduce;
mod setup;
mod svg;
mod units;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command};
use output::Outputs;

/// Sweep points that did not integrate.
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.is::<NumericalFailure>() {
        return 3;
    }
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<holopt::Error>() {
            return match err {
                holopt::Error::Integrator { .. } | holopt::Error::InvalidState(_) => 3,
                holopt::Error::Io(_) => 1,
                _ => 2,
            };
        }
        if cause.is::<std::io::Error>() {
            return 1;
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        holopt::parallel::set_worker_limit(n);
    }
    if let Command::Show(a) = &cli.command {
        return commands::show(a);
    }
    let mut out = Outputs::new(&cli.out_dir, cli.svg)?;
    let (name, config, seeds) = match &cli.command {
        Command::Simulate(a) => {
            commands::simulate(a, &mut out)?;
            ("simulate", serde_json::to_value(a)?, vec![])
        }
        Command::Sweep(a) => {
            commands::sweep(a, &mut out)?;
            ("sweep", serde_json::to_value(a)?, vec![])
        }
        Command::Optimize(a) => {
            commands::optimize(a, &mut out)?;
            ("optimize", serde_json::to_value(a)?, vec![a.seed])
        }
        Command::Reproduce(a) => {
            let seeds = reproduce::run(a, &mut out)?;
            ("reproduce", serde_json::to_value(a)?, seeds)
        }
        Command::Show(_) => unreachable!(),
    };
    let path = out.finish(name, config, seeds, cli.workers)?;
    log::info!("manifest written to {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(config::MergeError::Clap(e)) => e.exit(),
        Err(config::MergeError::Other(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! Command-line driver: kernel sweeps, scattering tables, composition checks,
//! trace runs, trace predictions and the acceptance suite.

mod commands;
mod config;
mod output;

use clap::Parser;
use commands::Outcome;
use config::{Cli, Command, FileConfig, Settings};
use std::process::ExitCode;

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let s = Settings::merge(cli, &file);
    match &cli.command {
        Command::Kernel(a) => commands::kernel(a, &file.kernel, &s),
        Command::Scatter(a) => commands::scatter(a, &file.scatter, &s),
        Command::Compose(a) => commands::compose(a, &file, &s),
        Command::Trace(a) => commands::trace(a, &file.trace, &s),
        Command::Predict(a) => commands::predict(a, &file.predict, &s),
        Command::Verify(a) => commands::verify(a, &file.verify, &s),
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
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

mod args;
mod commands;
mod error;
mod output;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Validation(format!("--jobs: {e}")))?;
    }
    match &cli.command {
        Command::Price(a) => commands::price::run(&cli.global, a),
        Command::Iv(a) => commands::iv::run(&cli.global, a),
        Command::Vix(a) => commands::vix::run(&cli.global, a),
        Command::Calibrate(a) => commands::calibrate::run(&cli.global, a),
        Command::Simulate(a) => commands::simulate::run(&cli.global, a),
        Command::Report(a) => commands::report::run(&cli.global, a),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

mod args;
mod commands;
mod error;
mod input;

use std::process::ExitCode;

use args::Command;
use error::CliError;

fn main() -> ExitCode {
    let result = args::parse(std::env::args().collect()).and_then(|cli| match cli.command {
        Command::Estimate(a) => commands::estimate(&a),
        Command::Generate(a) => commands::generate(&a),
        Command::Truth(a) => commands::truth(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Rates(a) => commands::rates(&a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("qfest: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

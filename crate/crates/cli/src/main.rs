mod args;
mod error;
mod input;
mod pool;
mod posterior;
mod records;
mod simulate;
mod table;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::TruncationTable(a) => table::run(a),
        Command::Observe(a) => posterior::observe(a),
        Command::Posterior(a) => posterior::posterior(a),
        Command::Verify(a) => verify::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("levyd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

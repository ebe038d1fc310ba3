mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::TransformCheck(a) => commands::transform_check(a),
        Command::Residual(a) => commands::residual(a),
        Command::Compare(a) => commands::compare(a),
        Command::MlEval(a) => commands::ml_eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

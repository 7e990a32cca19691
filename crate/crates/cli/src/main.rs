mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::{CliError, RunSpec};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let spec = match RunSpec::try_parse_from(&argv) {
        Ok(s) => s,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&spec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) => 2,
        CliError::Capacity(_) => 3,
        CliError::VerifyFailed(_) => 4,
        CliError::Io(_) => 1,
    }
}

mod args;
mod commands;
mod json;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::commands::Failure;

fn emit(value: &serde_json::Value) {
    let text = json::to_string(value).expect("JSON values serialize");
    let _ = writeln!(io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let failure = Failure::Validation(e.kind().to_string());
            eprintln!("{}", json::to_string(&failure.to_json()).expect("JSON values serialize"));
            eprint!("{e}");
            return ExitCode::from(failure.exit_code() as u8);
        }
    };
    match commands::run(&cli) {
        Ok(value) => {
            emit(&value);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(report) = failure.report() {
                emit(report);
            }
            eprintln!("{}", json::to_string(&failure.to_json()).expect("JSON values serialize"));
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}

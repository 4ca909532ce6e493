//! The `wsrel` command-line tool: validation, absorption solving,
//! closed-form conversions, composition aggregation, log analysis, and the
//! Monte Carlo cross-checks, over the file formats defined in `wsrel-core`.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

pub mod args;
pub mod report;

mod commands;

pub const EXIT_OK: u8 = 0;
/// A model parsed but broke a structural rule.
pub const EXIT_VALIDATION: u8 = 1;
/// I/O or parse failure.
pub const EXIT_INPUT: u8 = 2;
/// The solver refused or failed.
pub const EXIT_SOLVER: u8 = 3;
/// Bad flags or out-of-domain arguments.
pub const EXIT_USAGE: u8 = 4;

/// A command failure: the exit code plus an optional stderr line. Commands
/// that already wrote their report (e.g. a violation listing) carry no
/// message.
pub(crate) struct Failure {
    code: u8,
    message: Option<String>,
}

pub fn run_from_env() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(failure) => {
            if let Some(message) = failure.message {
                eprintln!("error: {message}");
            }
            ExitCode::from(failure.code)
        }
    }
}

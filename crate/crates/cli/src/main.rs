//! `geomkit` command-line front end.

mod args;
mod commands;
mod output;
mod presets;

use std::ffi::OsString;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

use args::Cli;
use output::Summary;

/// Failure classes mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or inputs; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed or did not converge; exit code 1.
    #[error("{0}")]
    Numerical(String),
}

impl From<geomkit::Error> for CliError {
    fn from(e: geomkit::Error) -> Self {
        use geomkit::Error as E;
        match e {
            E::DimensionMismatch { .. } | E::InvalidArgument(_) | E::Parse(_) => {
                CliError::Usage(e.to_string())
            }
            E::Io(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run(argv: Vec<OsString>) -> u8 {
    let argv = match presets::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let name = cli.command.name();
    let start = Instant::now();
    match commands::dispatch(cli.command) {
        Ok(mut summary) => {
            summary.finish(start.elapsed().as_secs_f64());
            println!("{}", summary.line());
            summary.exit_code()
        }
        Err(e) => {
            let mut summary = Summary::failure(name, &e);
            summary.finish(start.elapsed().as_secs_f64());
            println!("{}", summary.line());
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        let usage: CliError = geomkit::Error::Parse("x".into()).into();
        let numerical: CliError = geomkit::Error::NotPositiveDefinite.into();
        assert_eq!(usage.exit_code(), 2);
        assert_eq!(numerical.exit_code(), 1);
    }
}

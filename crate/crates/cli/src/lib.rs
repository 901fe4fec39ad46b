//! Benchmark harness around the `ucurve` library: single runs, comparison
//! tables and a self-test, each reachable from the `ucurve` binary.
//!
//! [`main_with_args`] is the whole program minus process exit, so it can be
//! driven in-process.

use std::ffi::OsString;
use std::io::{self, Write};

use thiserror::Error;

pub mod args;
mod commands;
pub mod problem;
pub mod report;

pub use commands::{cmd_compare, cmd_run, cmd_selftest, SelftestReport, SuiteResult};

use args::Command;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error(transparent)]
    Data(#[from] ucurve::data::DataError),
    #[error(transparent)]
    Cost(#[from] ucurve::cost::CostError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Clap(e) if !e.use_stderr() => EXIT_OK,
            Self::Usage(_) | Self::Clap(_) => EXIT_USAGE,
            Self::Data(_) | Self::Cost(_) | Self::Io(_) => EXIT_DATA,
        }
    }
}

/// Parses `args` (program name first), runs the command, writes its output to
/// `out` and diagnostics to `err`, and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match execute(args) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(CliError::Clap(e)) if !e.use_stderr() => {
            let _ = write!(out, "{}", e.render());
            EXIT_OK
        }
        Err(CliError::Clap(e)) => {
            let _ = write!(err, "{}", e.render());
            EXIT_USAGE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute<I, T>(args: I) -> Result<(String, i32), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = args::parse_args(args)?;
    Ok(match &cli.command {
        Command::Run(a) => (report::render_runs(&cmd_run(a)?, a.search.out), EXIT_OK),
        Command::Compare(a) => (report::render_compare(&cmd_compare(a)?, a.search.out), EXIT_OK),
        Command::Selftest(a) => {
            let r = cmd_selftest(a)?;
            let code = if r.passed() { EXIT_OK } else { EXIT_SELFTEST };
            (r.render(), code)
        }
    })
}

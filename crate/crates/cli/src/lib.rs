//! The `qfrac` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a run fails, 2 for usage, parse and
//! parameter errors.

pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::commands::{execute, Cli};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "QFRAC_THREADS";

#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(anyhow::anyhow!(msg.into()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<qfrac_core::Error> for Failure {
    fn from(e: qfrac_core::Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

pub fn parse_threads(value: Option<&str>) -> Result<Option<usize>, Failure> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Parses `args`, runs the command, writes the report to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, threads_env: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };

    let result = parse_threads(threads_env).and_then(|threads| execute(&cli.command, threads));
    let record = match result {
        Ok(r) => r,
        Err(f) => {
            let _ = match &f {
                Failure::Usage(e) => writeln!(err, "error: {e}"),
                Failure::Runtime(e) => writeln!(err, "error: run failed: {e}"),
            };
            return f.exit_code();
        }
    };

    match report::write_record(&record, cli.command.format(), out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: writing report: {e}");
            EXIT_RUNTIME
        }
    }
}

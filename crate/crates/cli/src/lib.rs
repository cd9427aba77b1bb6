//! `ncps` command-line front end.
//!
//! Exit codes: [`EXIT_PASS`] when every check passes, [`EXIT_FAIL`] when a
//! check fails or the initial-data map is singular, [`EXIT_INVALID`] for
//! invalid input of any kind.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use ncps_core::NcError;

pub mod commands;
pub mod config;
pub mod report;

use commands::{Common, Output};
use config::{Cli, Command};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

pub fn exit_code(e: &NcError) -> i32 {
    match e {
        NcError::SingularMap(_) => EXIT_FAIL,
        _ => EXIT_INVALID,
    }
}

/// Merges the config file into the flags and runs the subcommand.
pub fn execute(cli: Cli) -> Result<Output, NcError> {
    let (file_common, file_command) = match &cli.common.config {
        Some(path) => config::split_file(config::load_file(path)?),
        None => Default::default(),
    };
    let common = Common::resolve(config::merge(file_common, &cli.common)?)?;
    match cli.command {
        Command::Verify(a) => commands::verify::run(&common, config::merge(file_command, &a)?),
        Command::Repr(a) => commands::repr::run(&common, config::merge(file_command, &a)?),
        Command::Com(a) => commands::com::run(&common, config::merge(file_command, &a)?),
        Command::Simulate(a) => commands::simulate::run(&common, config::merge(file_command, &a)?),
    }
    .and_then(|out| write_output(&common, &out).map(|_| out))
}

fn write_output(common: &Common, out: &Output) -> Result<(), NcError> {
    let write = |path: &std::path::Path, body: &str| {
        std::fs::write(path, body)
            .map_err(|e| NcError::Config(format!("cannot write {}: {e}", path.display())))
    };
    for (path, body) in &out.extra {
        write(path, body)?;
    }
    match &common.output {
        Some(path) => write(path, &out.body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| NcError::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
        }
    };
    match execute(cli) {
        Ok(out) if out.overall => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(e) => {
            eprintln!("{e}");
            exit_code(&e)
        }
    }
}

//! Subcommand implementations. Each takes the resolved common options and
//! its merged arguments, and returns what to write plus the verdict.

use std::path::PathBuf;

use ncps_core::report::Check;
use ncps_core::{NcError, DEFAULT_TOL};
use serde::Serialize;

use crate::config::{CommonArgs, Format};

pub mod com;
pub mod repr;
pub mod simulate;
pub mod verify;

type Result<T> = std::result::Result<T, NcError>;

/// Common options with defaults applied.
#[derive(Debug, Clone, Serialize)]
pub struct Common {
    pub hbar: f64,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Common {
    pub fn resolve(args: CommonArgs) -> Result<Self> {
        let hbar = args.hbar.unwrap_or(1.0);
        let tol = args.tol.unwrap_or(DEFAULT_TOL);
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(NcError::Domain(format!("hbar must be positive (got {hbar})")));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(NcError::Config(format!("tol must be positive (got {tol})")));
        }
        Ok(Common { hbar, tol, output: args.output, format: args.format })
    }
}

/// Resolved config as it appears in reports: common keys next to the
/// command's own.
#[derive(Serialize)]
pub struct Resolved<'a, T: Serialize> {
    #[serde(flatten)]
    pub common: &'a Common,
    #[serde(flatten)]
    pub command: T,
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Output {
    /// Written to `--output`, or stdout.
    pub body: String,
    pub overall: bool,
    /// Additional files to write.
    pub extra: Vec<(PathBuf, String)>,
}

fn pair(a: Option<f64>, b: Option<f64>, names: (&str, &str)) -> Result<(f64, f64)> {
    match (a, b) {
        (Some(a), Some(b)) => {
            finite(names.0, a)?;
            finite(names.1, b)?;
            Ok((a, b))
        }
        _ => Err(NcError::Config(format!("{} and {} must be given together", names.0, names.1))),
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NcError::Config(format!("{name} must be finite (got {v})")))
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(NcError::Domain(format!("{name} must be positive (got {v})")))
    }
}

fn flag(pass: bool) -> f64 {
    if pass {
        1.0
    } else {
        0.0
    }
}

/// A boolean property recorded as a check (`1` holds, `0` does not).
fn holds(name: impl Into<String>, expected: bool, measured: bool) -> Check {
    Check::within(name, flag(expected), flag(measured), 0.0)
}

fn prefixed(prefix: &str, checks: Vec<Check>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{prefix}.{}", c.name);
            c
        })
        .collect()
}

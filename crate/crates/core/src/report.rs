//! Check records shared by every verification report.

use serde::{Deserialize, Serialize};

/// One named comparison of a measured value against an expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub measured: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `|measured - expected| <= tol`.
    pub fn within(name: impl Into<String>, expected: f64, measured: f64, tol: f64) -> Self {
        let pass = (measured - expected).abs() <= tol;
        Check { name: name.into(), expected, measured, tol, pass }
    }

    /// Passes when `measured <= bound`; `expected` records the bound.
    pub fn at_most(name: impl Into<String>, bound: f64, measured: f64) -> Self {
        Check { name: name.into(), expected: bound, measured, tol: 0.0, pass: measured <= bound }
    }

    /// Passes when `measured >= bound`.
    pub fn at_least(name: impl Into<String>, bound: f64, measured: f64) -> Self {
        Check { name: name.into(), expected: bound, measured, tol: 0.0, pass: measured >= bound }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

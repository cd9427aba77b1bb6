//! Machine-readable reports.

use ncps_core::report::{all_pass, Check};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL_NAME: &str = "ncps";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Default for Tool {
    fn default() -> Self {
        Tool { name: TOOL_NAME.into(), version: TOOL_VERSION.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: Tool,
    pub command: String,
    /// Fully resolved configuration, defaults included.
    pub config: Value,
    /// Sorted by name.
    pub checks: Vec<Check>,
    pub overall: bool,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Report {
    /// Sorts the checks; `overall` is true iff every check passes.
    ///
    /// JSON has no infinities, so a non-finite measurement is stored as
    /// `±f64::MAX` and its check fails.
    pub fn new(command: &str, config: impl Serialize, mut checks: Vec<Check>, details: Value) -> Self {
        for c in &mut checks {
            if !c.measured.is_finite() {
                c.measured = if c.measured < 0.0 { -f64::MAX } else { f64::MAX };
                c.pass = false;
            }
        }
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let overall = all_pass(&checks);
        Report {
            tool: Tool::default(),
            command: command.into(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            checks,
            overall,
            details,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per check: `name,expected,measured,tol,pass`.
    pub fn checks_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "expected", "measured", "tol", "pass"]).expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                num(c.expected),
                num(c.measured),
                num(c.tol),
                c.pass.to_string(),
            ])
            .expect("in-memory write");
        }
        csv_string(w)
    }
}

/// Shortest text that parses back to the same double.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn csv_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

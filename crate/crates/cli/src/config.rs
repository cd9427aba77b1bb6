//! Command-line flags, JSON config files and their merge.
//!
//! Every flag is optional at parse time. A `--config` file supplies values
//! under the same names (snake_case) and flags given on the command line
//! replace file values key by key. Defaults are applied afterwards, by each
//! command, so the resolved config in a report shows what was actually run.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncps_core::{Branch, Family, NcError};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Parser)]
#[command(
    name = "ncps",
    version,
    about = "Noncommutative phase-space representations: verification, center-of-mass reduction and classical trajectories"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommonArgs {
    /// Reduced Planck constant [default: 1]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    /// Absolute tolerance of every check [default: 1e-12]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// JSON file with default values; flags take priority
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

const COMMON_KEYS: [&str; 4] = ["hbar", "tol", "output", "format"];

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check commutator tables, parameter maps and mass conditions
    Verify(VerifyArgs),
    /// Print a representation's coefficient table
    Repr(ReprArgs),
    /// Compare the direct and algebraic center-of-mass representations
    Com(ComArgs),
    /// Integrate a trajectory, or compare two masses in WEP mode
    Simulate(SimulateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Repr(_) => "repr",
            Command::Com(_) => "com",
            Command::Simulate(_) => "simulate",
        }
    }
}

pub fn parse_family(s: &str) -> Result<Family, String> {
    serde_json::from_value(Value::String(s.replace('-', "_")))
        .map_err(|_| format!("unknown family '{s}' (expected branch, simple or epsilon_general)"))
}

pub fn parse_branch(s: &str) -> Result<Branch, String> {
    serde_json::from_value(Value::String(s.to_string()))
        .map_err(|_| format!("unknown branch '{s}' (expected minus or plus)"))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    /// branch, simple or epsilon_general [default: branch]
    #[arg(long, value_parser = parse_family)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    /// minus or plus [default: minus]
    #[arg(long, value_parser = parse_branch)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    /// Build the epsilon representation from primed parameters
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_prime: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_prime: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect_theta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect_eta: Option<f64>,
    /// Expected [Xi,Pi] in units of iħ [default: 1, or 1+θη/4 for simple]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect_diag: Option<f64>,
    /// Also check the minus/plus branch transform
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<bool>,
    /// Shared condition θ·m = γ
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Shared condition η/m = α
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Masses for the conditioned checks [default: 1,2,5]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    /// Decreasing scales s applied to (θ, η) for the commutative limit
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_scales: Option<Vec<f64>>,
    /// Bound on the distance at the smallest scale [default: 1e-6]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_final: Option<f64>,
    /// Size of the seeded random batch (seed from NCPS_SEED)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_trials: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct ReprArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[arg(long, value_parser = parse_family)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[arg(long, value_parser = parse_branch)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_prime: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_prime: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct ComArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Per-particle θ_a, instead of shared conditions
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_branch)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Free,
    Gravity,
    Harmonic,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    /// [default: free, gravity in WEP mode]
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    /// Gravitational acceleration [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Oscillator frequency [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long, value_parser = parse_family)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[arg(long, value_parser = parse_branch)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    /// Canonical initial state [default: 0]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x2: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2: Option<f64>,
    /// Initial X1,X2,dX1/dt,dX2/dt instead of a canonical state
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_nc: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Release two masses and report the separation of their paths
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wep: Option<bool>,
    /// The two WEP masses [default: 1,2]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    /// Bound on the WEP deviation under conditions [default: 1e-9]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wep_tol: Option<f64>,
    /// Bound on the relative energy drift [default: 1e-10]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_tol: Option<f64>,
    /// Also write the JSON report here (trajectory output stays CSV)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

/// Reads a config file as a JSON object.
pub fn load_file(path: &Path) -> Result<Map<String, Value>, NcError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| NcError::Config(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(NcError::Config(format!("config {} is not a JSON object", path.display()))),
        Err(e) => Err(NcError::Config(format!("config {} is not valid JSON: {e}", path.display()))),
    }
}

/// Splits a file into its common part and its command part.
pub fn split_file(file: Map<String, Value>) -> (Map<String, Value>, Map<String, Value>) {
    file.into_iter().partition(|(k, _)| COMMON_KEYS.contains(&k.as_str()))
}

/// Overlays the flags on the file values.
pub fn merge<T: Serialize + DeserializeOwned>(file: Map<String, Value>, flags: &T) -> Result<T, NcError> {
    let mut merged = file;
    match serde_json::to_value(flags) {
        Ok(Value::Object(given)) => merged.extend(given),
        _ => return Err(NcError::Config("flags do not serialize to an object".into())),
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| NcError::Config(format!("config: {e}")))
}

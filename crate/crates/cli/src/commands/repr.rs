use std::fmt::Write as _;

use ncps_core::representation::{build_epsilon_rep, build_rep, verify_nc_algebra, OPERATOR_NAMES};
use ncps_core::{Branch, CanonicalVar, Family, NCParams, NcError, Representation, VarKind};
use serde::Serialize;
use serde_json::json;

use super::{pair, positive, Common, Output, Resolved, Result};
use crate::config::{Format, ReprArgs};
use crate::report::{csv_string, Report};

#[derive(Debug, Serialize)]
struct ReprConfig {
    theta: Option<f64>,
    eta: Option<f64>,
    mass: f64,
    family: Family,
    branch: Branch,
    theta_prime: Option<f64>,
    eta_prime: Option<f64>,
}

/// One operator's coefficients over `x1, x2, p1, p2` and its constant.
#[derive(Debug, Serialize)]
struct Row {
    operator: &'static str,
    x1: f64,
    x2: f64,
    p1: f64,
    p2: f64,
    constant: f64,
}

fn rows(rep: &Representation) -> Vec<Row> {
    OPERATOR_NAMES
        .iter()
        .zip(rep.forms())
        .map(|(name, f)| {
            let c = |k| f.coeff(CanonicalVar::new(0, k));
            Row {
                operator: name,
                x1: c(VarKind::X1),
                x2: c(VarKind::X2),
                p1: c(VarKind::P1),
                p2: c(VarKind::P2),
                constant: f.constant(),
            }
        })
        .collect()
}

pub fn run(common: &Common, a: ReprArgs) -> Result<Output> {
    let has_primes = a.theta_prime.is_some() || a.eta_prime.is_some();
    let family = a.family.unwrap_or(if has_primes { Family::EpsilonGeneral } else { Family::Branch });
    let branch = a.branch.unwrap_or_default();
    let mass = positive("mass", a.mass.unwrap_or(1.0))?;
    let base = NCParams::new(0.0, 0.0).with_mass(mass).with_hbar(common.hbar);

    let rep = if has_primes {
        if a.theta.is_some() || a.eta.is_some() {
            return Err(NcError::Config("give theta/eta or theta_prime/eta_prime, not both".into()));
        }
        if family != Family::EpsilonGeneral {
            return Err(NcError::Config("theta_prime/eta_prime build the epsilon_general family".into()));
        }
        let (tp, ep) = pair(a.theta_prime, a.eta_prime, ("theta_prime", "eta_prime"))?;
        build_epsilon_rep(&base, tp, ep, 0)?
    } else {
        let (theta, eta) = pair(a.theta, a.eta, ("theta", "eta"))?;
        build_rep(&NCParams { theta, eta, ..base }, family, branch, 0)?
    };
    let cfg = ReprConfig {
        theta: a.theta,
        eta: a.eta,
        mass,
        family,
        branch,
        theta_prime: a.theta_prime,
        eta_prime: a.eta_prime,
    };

    let p = rep.params;
    let diag = if family == Family::Simple { 1.0 + p.product() / 4.0 } else { 1.0 };
    let checks = verify_nc_algebra(&rep, p.theta, p.eta, diag, common.tol).checks;
    let table = rows(&rep);
    let body = match common.format {
        Some(Format::Json) => {
            let details = json!({"realized": {"theta": p.theta, "eta": p.eta}, "rows": table});
            Report::new("repr", Resolved { common, command: cfg }, checks.clone(), details).to_json()
        }
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &table {
                w.serialize(r).map_err(|e| NcError::Config(e.to_string()))?;
            }
            csv_string(w)
        }
        None => text_table(&rep, &table),
    };
    Ok(Output { body, overall: checks.iter().all(|c| c.pass), extra: Vec::new() })
}

fn text_table(rep: &Representation, table: &[Row]) -> String {
    let p = rep.params;
    let mut s = String::new();
    let branch = rep.branch.map_or("-", Branch::as_str);
    let _ = writeln!(
        s,
        "family={} branch={branch} theta={} eta={} hbar={} mass={}",
        rep.family.as_str(),
        p.theta,
        p.eta,
        p.hbar,
        p.mass
    );
    let _ = writeln!(s, "{:<4}{:>24}{:>24}{:>24}{:>24}{:>24}", "op", "x1", "x2", "p1", "p2", "const");
    for r in table {
        let _ = writeln!(
            s,
            "{:<4}{:>24}{:>24}{:>24}{:>24}{:>24}",
            r.operator, r.x1, r.x2, r.p1, r.p2, r.constant
        );
    }
    s
}

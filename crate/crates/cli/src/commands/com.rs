use ncps_core::composite::{compare_com_reps, compare_com_simple, effective_params, CompositeSystem};
use ncps_core::report::Check;
use ncps_core::{Branch, MassConditions, NcError};
use serde::Serialize;
use serde_json::json;

use super::{finite, holds, Common, Output, Resolved, Result};
use crate::config::{ComArgs, Format};
use crate::report::Report;

#[derive(Debug, Serialize)]
struct ComConfig {
    masses: Vec<f64>,
    gamma: Option<f64>,
    alpha: Option<f64>,
    thetas: Option<Vec<f64>>,
    etas: Option<Vec<f64>>,
    branch: Branch,
}

pub fn run(common: &Common, a: ComArgs) -> Result<Output> {
    let masses = a.masses.clone().unwrap_or_default();
    if masses.is_empty() {
        return Err(NcError::Config("particle list is empty: give masses".into()));
    }
    let branch = a.branch.unwrap_or_default();
    let with_conditions = a.gamma.is_some() || a.alpha.is_some();
    let with_params = a.thetas.is_some() || a.etas.is_some();

    let (sys, conditions) = match (with_conditions, with_params) {
        (true, false) => {
            let (Some(gamma), Some(alpha)) = (a.gamma, a.alpha) else {
                return Err(NcError::Config("gamma and alpha must be given together".into()));
            };
            let c = MassConditions::new(finite("gamma", gamma)?, finite("alpha", alpha)?);
            (CompositeSystem::from_conditions(&c, &masses)?, Some(c))
        }
        (false, true) => {
            let (Some(thetas), Some(etas)) = (&a.thetas, &a.etas) else {
                return Err(NcError::Config("thetas and etas must be given together".into()));
            };
            (CompositeSystem::from_params(&masses, thetas, etas)?, None)
        }
        (true, true) => {
            return Err(NcError::Config("give gamma/alpha or thetas/etas, not both".into()));
        }
        (false, false) => {
            return Err(NcError::Config("give shared gamma/alpha or per-particle thetas/etas".into()));
        }
    };

    let (theta_tilde, eta_tilde) = effective_params(&sys);
    let total = sys.total_mass();
    let branch_report = compare_com_reps(&sys, branch, common.tol)?;
    let simple_report = compare_com_simple(&sys, common.tol)?;
    let shared = branch_report.conditions.is_some();

    let mut checks = vec![
        holds("branch.routes_equal_iff_conditions", shared, branch_report.equal),
        holds("simple.routes_equal_iff_conditions", shared, simple_report.equal),
    ];
    if let Some(c) = conditions {
        checks.push(Check::within("effective.theta_tilde", c.gamma / total, theta_tilde, common.tol));
        checks.push(Check::within("effective.eta_tilde", c.alpha * total, eta_tilde, common.tol));
    }

    let cfg = ComConfig { masses, gamma: a.gamma, alpha: a.alpha, thetas: a.thetas, etas: a.etas, branch };
    let details = json!({
        "theta_tilde": theta_tilde,
        "eta_tilde": eta_tilde,
        "total_mass": total,
        "conditions_shared": shared,
        "routes_equal": {"branch": branch_report.equal, "simple": simple_report.equal},
        "branch": branch_report,
        "simple": simple_report,
    });
    let report = Report::new("com", Resolved { common, command: cfg }, checks, details);
    let body = match common.format {
        Some(Format::Csv) => report.checks_csv(),
        _ => report.to_json(),
    };
    Ok(Output { body, overall: report.overall, extra: Vec::new() })
}

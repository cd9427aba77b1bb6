use ncps_core::report::Check;
use ncps_core::representation::{
    build_epsilon_rep, build_rep, check_branch_transform, check_commutative_limit, mass_invariance_for,
    params_from_conditions, verify_nc_algebra,
};
use ncps_core::sweep::{self, Execution, SignMode};
use ncps_core::{Branch, Family, MassConditions, NCParams, NcError};
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::{holds, pair, positive, prefixed, Common, Output, Resolved, Result};
use crate::config::{Format, VerifyArgs};
use crate::report::Report;

const DEFAULT_MASSES: [f64; 3] = [1.0, 2.0, 5.0];
const DEFAULT_LIMIT_FINAL: f64 = 1e-6;
/// Allowed gap between the observed convergence orders of the two branches.
const ORDER_TOL: f64 = 1e-2;

#[derive(Debug, Serialize)]
struct VerifyConfig {
    theta: Option<f64>,
    eta: Option<f64>,
    mass: f64,
    family: Family,
    branch: Branch,
    theta_prime: Option<f64>,
    eta_prime: Option<f64>,
    expect_theta: Option<f64>,
    expect_eta: Option<f64>,
    expect_diag: Option<f64>,
    transform: bool,
    gamma: Option<f64>,
    alpha: Option<f64>,
    masses: Option<Vec<f64>>,
    limit_scales: Option<Vec<f64>>,
    limit_final: f64,
    random_trials: Option<usize>,
    seed: Option<u64>,
}

pub fn run(common: &Common, a: VerifyArgs) -> Result<Output> {
    let has_pair = a.theta.is_some() || a.eta.is_some();
    let has_primes = a.theta_prime.is_some() || a.eta_prime.is_some();
    let has_conditions = a.gamma.is_some() || a.alpha.is_some();
    if has_pair && has_primes {
        return Err(NcError::Config("give theta/eta or theta_prime/eta_prime, not both".into()));
    }
    if !(has_pair || has_primes || has_conditions || a.random_trials.is_some()) {
        return Err(NcError::Config(
            "nothing to verify: give theta and eta, theta_prime and eta_prime, gamma and alpha, or random_trials".into(),
        ));
    }
    let family = a.family.unwrap_or(if has_primes { Family::EpsilonGeneral } else { Family::Branch });
    let branch = a.branch.unwrap_or_default();
    let mass = positive("mass", a.mass.unwrap_or(1.0))?;
    let base_params = NCParams::new(0.0, 0.0).with_mass(mass).with_hbar(common.hbar);

    let mut checks: Vec<Check> = Vec::new();
    let mut details = Map::new();
    let mut cfg = VerifyConfig {
        theta: a.theta,
        eta: a.eta,
        mass,
        family,
        branch,
        theta_prime: a.theta_prime,
        eta_prime: a.eta_prime,
        expect_theta: None,
        expect_eta: None,
        expect_diag: None,
        transform: a.transform.unwrap_or(false),
        gamma: a.gamma,
        alpha: a.alpha,
        masses: None,
        limit_scales: a.limit_scales.clone(),
        limit_final: a.limit_final.unwrap_or(DEFAULT_LIMIT_FINAL),
        random_trials: a.random_trials,
        seed: None,
    };

    let base = if has_primes {
        let (tp, ep) = pair(a.theta_prime, a.eta_prime, ("theta_prime", "eta_prime"))?;
        if family != Family::EpsilonGeneral {
            return Err(NcError::Config("theta_prime/eta_prime build the epsilon_general family".into()));
        }
        Some(build_epsilon_rep(&base_params, tp, ep, 0)?)
    } else if has_pair {
        let (theta, eta) = pair(a.theta, a.eta, ("theta", "eta"))?;
        Some(build_rep(&NCParams { theta, eta, ..base_params }, family, branch, 0)?)
    } else {
        None
    };

    if let Some(rep) = &base {
        let p = rep.params;
        let diag_default = if family == Family::Simple { 1.0 + p.product() / 4.0 } else { 1.0 };
        let (et, ee, ed) = (
            a.expect_theta.unwrap_or(p.theta),
            a.expect_eta.unwrap_or(p.eta),
            a.expect_diag.unwrap_or(diag_default),
        );
        (cfg.expect_theta, cfg.expect_eta, cfg.expect_diag) = (Some(et), Some(ee), Some(ed));
        checks.extend(prefixed("algebra", verify_nc_algebra(rep, et, ee, ed, common.tol).checks));
        details.insert("representation".into(), json!(rep));
    }

    if cfg.transform || cfg.limit_scales.is_some() {
        let Some(p) = base.as_ref().filter(|_| has_pair).map(|r| r.params) else {
            return Err(NcError::Config("transform and limit checks need theta and eta".into()));
        };
        if cfg.transform {
            let report = check_branch_transform(&p, common.tol)?;
            checks.extend(prefixed("transform", report.checks));
        }
        if let Some(scales) = &cfg.limit_scales {
            let schedule = vec![f64::MAX; scales.len()];
            let report = check_commutative_limit(scales, &p, &schedule)?;
            let last = report.points.last().expect("scales are non-empty");
            checks.push(holds("limit.minus.monotone", true, report.minus_monotone));
            checks.push(Check::at_most(
                "limit.minus.final_distance",
                cfg.limit_final,
                last.minus_distance.unwrap_or(f64::INFINITY),
            ));
            if p.theta / p.eta > 0.0 {
                checks.push(holds("limit.plus.monotone", true, report.plus_monotone));
                checks.push(Check::at_most(
                    "limit.plus.final_distance",
                    cfg.limit_final,
                    last.plus_distance.unwrap_or(f64::INFINITY),
                ));
                checks.push(Check::within(
                    "limit.plus.order",
                    report.minus_order.unwrap_or(0.0),
                    report.plus_order.unwrap_or(f64::INFINITY),
                    ORDER_TOL,
                ));
            }
            details.insert("limit".into(), json!(report));
        }
    }

    if has_conditions {
        let (gamma, alpha) = pair(a.gamma, a.alpha, ("gamma", "alpha"))?;
        let c = MassConditions::new(gamma, alpha);
        let masses = a.masses.clone().unwrap_or_else(|| DEFAULT_MASSES.to_vec());
        if masses.is_empty() {
            return Err(NcError::Config("masses must not be empty".into()));
        }
        let params = masses
            .iter()
            .map(|&m| params_from_conditions(&c, m).map(|p| p.with_hbar(common.hbar)))
            .collect::<Result<Vec<_>>>()?;
        let diag = if family == Family::Simple { 1.0 + c.product() / 4.0 } else { 1.0 };
        for p in &params {
            let rep = build_rep(p, family, branch, 0)?;
            let report = verify_nc_algebra(&rep, p.theta, p.eta, diag, common.tol);
            checks.extend(prefixed(&format!("conditions[m={}]", p.mass), report.checks));
        }
        if params.len() >= 2 {
            let report = mass_invariance_for(&params, family, Some(branch), common.tol)?;
            checks.extend(prefixed("invariance", report.checks));
        }
        details.insert("conditioned_params".into(), json!(params));
        cfg.masses = Some(masses);
    } else if a.masses.is_some() {
        return Err(NcError::Config("masses need gamma and alpha".into()));
    }

    if let Some(n) = a.random_trials {
        if n == 0 {
            return Err(NcError::Config("random_trials must be positive".into()));
        }
        let seed = sweep::seed_from_env();
        cfg.seed = Some(seed);
        let params = sweep::random_params(seed, n, (-5.0, 1.0), SignMode::Any);
        let positive = sweep::random_params(seed.wrapping_add(1), n, (-5.0, 1.0), SignMode::Positive);
        let closure = sweep::closure_sweep(&params, Execution::Parallel, common.tol);
        let round_trip = sweep::round_trip_sweep(&params, Execution::Parallel, common.tol);
        let transform = sweep::transform_sweep(&positive, Execution::Parallel, common.tol);
        checks.push(Check::at_most("random.closure.max_error", common.tol, closure.max_error));
        checks.push(Check::at_most("random.round_trip.max_rel_error", common.tol, round_trip.max_error));
        checks.push(Check::at_most("random.transform.max_residual", common.tol, transform.max_error));
        details.insert(
            "random".into(),
            json!({"seed": seed, "closure": closure, "round_trip": round_trip, "transform": transform}),
        );
    }

    let report = Report::new("verify", Resolved { common, command: cfg }, checks, Value::Object(details));
    let body = match common.format {
        Some(Format::Csv) => report.checks_csv(),
        _ => report.to_json(),
    };
    Ok(Output { body, overall: report.overall, extra: Vec::new() })
}

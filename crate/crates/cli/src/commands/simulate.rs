use std::path::PathBuf;

use ncps_core::dynamics::{
    build_hamiltonian, canonical_from_nc, evolve, wep_deviation, HamiltonianKind, ParamSource, WepOutcome,
    WepScenario,
};
use ncps_core::report::Check;
use ncps_core::representation::{build_rep, params_from_conditions};
use ncps_core::{Branch, Family, MassConditions, NCParams, NcError};
use serde::Serialize;
use serde_json::json;

use super::{finite, pair, positive, Common, Output, Resolved, Result};
use crate::config::{Format, Kind, SimulateArgs};
use crate::report::{csv_string, num, Report};

/// Trajectory CSV header.
pub const COLUMNS: [&str; 9] = ["t", "x1", "x2", "p1", "p2", "X1", "X2", "P1", "P2"];

const DEFAULT_WEP_TOL: f64 = 1e-9;
const DEFAULT_ENERGY_TOL: f64 = 1e-10;
const DEFAULT_WEP_INITIAL: [f64; 4] = [0.0, 0.0, 1.0, 0.5];

#[derive(Debug, Serialize)]
struct SimulateConfig {
    kind: Kind,
    g: f64,
    omega: f64,
    theta: f64,
    eta: f64,
    mass: f64,
    gamma: Option<f64>,
    alpha: Option<f64>,
    family: Option<Family>,
    branch: Branch,
    x1: f64,
    x2: f64,
    p1: f64,
    p2: f64,
    initial_nc: Option<[f64; 4]>,
    t_end: f64,
    dt: f64,
    wep: bool,
    masses: Option<Vec<f64>>,
    wep_tol: f64,
    energy_tol: f64,
    report: Option<PathBuf>,
}

fn hamiltonian_kind(cfg: &SimulateConfig) -> HamiltonianKind {
    match cfg.kind {
        Kind::Free => HamiltonianKind::Free,
        Kind::Gravity => HamiltonianKind::UniformGravity { g: cfg.g },
        Kind::Harmonic => HamiltonianKind::Harmonic { omega: cfg.omega },
    }
}

fn initial_nc(v: Option<Vec<f64>>) -> Result<Option<[f64; 4]>> {
    match v {
        None => Ok(None),
        Some(v) => {
            let arr: [f64; 4] = v.as_slice().try_into().map_err(|_| {
                NcError::Config(format!("initial_nc needs 4 values X1,X2,dX1/dt,dX2/dt (got {})", v.len()))
            })?;
            for x in arr {
                finite("initial_nc", x)?;
            }
            Ok(Some(arr))
        }
    }
}

pub fn run(common: &Common, a: SimulateArgs) -> Result<Output> {
    let wep = a.wep.unwrap_or(false);
    let conditions = match (a.gamma, a.alpha) {
        (None, None) => None,
        (g, al) => {
            let (gamma, alpha) = pair(g, al, ("gamma", "alpha"))?;
            Some(MassConditions::new(gamma, alpha))
        }
    };
    if conditions.is_some() && (a.theta.is_some() || a.eta.is_some()) {
        return Err(NcError::Config("give theta/eta or gamma/alpha, not both".into()));
    }
    let cfg = SimulateConfig {
        kind: a.kind.unwrap_or(if wep { Kind::Gravity } else { Kind::Free }),
        g: finite("g", a.g.unwrap_or(1.0))?,
        omega: finite("omega", a.omega.unwrap_or(1.0))?,
        theta: finite("theta", a.theta.unwrap_or(0.0))?,
        eta: finite("eta", a.eta.unwrap_or(0.0))?,
        mass: positive("mass", a.mass.unwrap_or(1.0))?,
        gamma: a.gamma,
        alpha: a.alpha,
        family: a.family,
        branch: a.branch.unwrap_or_default(),
        x1: finite("x1", a.x1.unwrap_or(0.0))?,
        x2: finite("x2", a.x2.unwrap_or(0.0))?,
        p1: finite("p1", a.p1.unwrap_or(0.0))?,
        p2: finite("p2", a.p2.unwrap_or(0.0))?,
        initial_nc: initial_nc(a.initial_nc)?,
        t_end: a.t_end.unwrap_or(10.0),
        dt: a.dt.unwrap_or(0.01),
        wep,
        masses: a.masses,
        wep_tol: a.wep_tol.unwrap_or(DEFAULT_WEP_TOL),
        energy_tol: a.energy_tol.unwrap_or(DEFAULT_ENERGY_TOL),
        report: a.report,
    };
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(NcError::Step(format!("dt must be positive (got {})", cfg.dt)));
    }
    if !(cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
        return Err(NcError::Step(format!("t_end must be non-negative (got {})", cfg.t_end)));
    }
    if wep {
        run_wep(common, cfg, conditions)
    } else {
        run_single(common, cfg, conditions)
    }
}

fn run_single(common: &Common, cfg: SimulateConfig, conditions: Option<MassConditions>) -> Result<Output> {
    if cfg.masses.is_some() {
        return Err(NcError::Config("masses are only used in WEP mode; use mass".into()));
    }
    let params = match conditions {
        Some(c) => params_from_conditions(&c, cfg.mass)?,
        None => NCParams::new(cfg.theta, cfg.eta).with_mass(cfg.mass),
    }
    .with_hbar(common.hbar);
    let rep = build_rep(&params, cfg.family.unwrap_or_default(), cfg.branch, 0)?;
    let h = build_hamiltonian(hamiltonian_kind(&cfg), &rep);
    let z0 = match cfg.initial_nc {
        Some(nc) => canonical_from_nc(&h, nc)?,
        None => vec![cfg.x1, cfg.x2, cfg.p1, cfg.p2],
    };
    let traj = evolve(&h, &z0, cfg.t_end, cfg.dt)?;
    let drift = traj.max_energy_drift(&h);
    let checks = vec![Check::at_most("energy.relative_drift", cfg.energy_tol, drift)];

    let rows: Vec<Vec<f64>> = traj
        .times
        .iter()
        .zip(traj.states.iter().zip(&traj.observables))
        .map(|(t, (s, o))| std::iter::once(*t).chain(s.iter().copied()).chain(o.iter().copied()).collect())
        .collect();
    let summary =
        json!({"steps": rows.len() - 1, "energy_drift": drift, "params": params, "initial_state": z0});
    let report_path = cfg.report.clone();

    let (body, report) = match common.format {
        Some(Format::Json) => {
            let mut details = summary;
            details["columns"] = json!(COLUMNS);
            details["rows"] = json!(rows);
            let report = Report::new("simulate", Resolved { common, command: cfg }, checks, details);
            (report.to_json(), report)
        }
        _ => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS).map_err(|e| NcError::Config(e.to_string()))?;
            for row in &rows {
                w.write_record(row.iter().map(|v| num(*v))).map_err(|e| NcError::Config(e.to_string()))?;
            }
            let report = Report::new("simulate", Resolved { common, command: cfg }, checks, summary);
            (csv_string(w), report)
        }
    };
    let extra = report_path.map(|p| (p, report.to_json())).into_iter().collect();
    Ok(Output { body, overall: report.overall, extra })
}

#[derive(Debug, Serialize)]
struct FamilyOutcome {
    family: Family,
    #[serde(flatten)]
    outcome: WepOutcome,
}

fn run_wep(common: &Common, mut cfg: SimulateConfig, conditions: Option<MassConditions>) -> Result<Output> {
    let masses = cfg.masses.clone().unwrap_or_else(|| vec![1.0, 2.0]);
    let [m1, m2] = masses[..] else {
        return Err(NcError::Config(format!("WEP mode needs exactly two masses (got {})", masses.len())));
    };
    positive("masses", m1)?;
    positive("masses", m2)?;
    cfg.masses = Some(masses);
    let source = match conditions {
        Some(c) => ParamSource::Conditions(c),
        None => ParamSource::Fixed { theta: cfg.theta, eta: cfg.eta },
    };
    let families = match cfg.family {
        Some(f) => vec![f],
        None => vec![Family::Branch, Family::Simple],
    };
    let initial = cfg.initial_nc.unwrap_or(DEFAULT_WEP_INITIAL);
    cfg.initial_nc = Some(initial);

    let mut checks = Vec::new();
    let mut outcomes = Vec::new();
    for family in families {
        let scenario = WepScenario {
            source,
            masses: (m1, m2),
            family,
            branch: cfg.branch,
            kind: hamiltonian_kind(&cfg),
            initial_nc: initial,
            t_end: cfg.t_end,
            dt: cfg.dt,
        };
        let outcome = wep_deviation(&scenario)?;
        let name = family.as_str();
        checks.push(Check::at_most(
            format!("{name}.energy.relative_drift"),
            cfg.energy_tol,
            outcome.energy_drift,
        ));
        if outcome.conditions_used {
            checks.push(Check::at_most(
                format!("{name}.wep.deviation_max"),
                cfg.wep_tol,
                outcome.deviation_max,
            ));
        }
        outcomes.push(FamilyOutcome { family, outcome });
    }

    let deviation_max = outcomes.iter().map(|o| o.outcome.deviation_max).fold(0.0, f64::max);
    let details = json!({
        "deviation_max": deviation_max,
        "conditions_used": conditions.is_some(),
        "masses": [m1, m2],
        "families": outcomes,
    });
    let report_path = cfg.report.clone();
    let report = Report::new("simulate", Resolved { common, command: cfg }, checks, details);
    let body = match common.format {
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "family",
                "deviation_max",
                "conditions_used",
                "mass_a",
                "mass_b",
                "energy_drift",
            ])
            .map_err(|e| NcError::Config(e.to_string()))?;
            for o in &outcomes {
                w.write_record([
                    o.family.as_str().to_string(),
                    num(o.outcome.deviation_max),
                    o.outcome.conditions_used.to_string(),
                    num(m1),
                    num(m2),
                    num(o.outcome.energy_drift),
                ])
                .map_err(|e| NcError::Config(e.to_string()))?;
            }
            csv_string(w)
        }
        _ => report.to_json(),
    };
    let extra = report_path.map(|p| (p, report.to_json())).into_iter().collect();
    Ok(Output { body, overall: report.overall, extra })
}

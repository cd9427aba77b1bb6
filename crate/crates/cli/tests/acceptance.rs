//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p ncps-cli --test acceptance`. Random batches are
//! seeded from `NCPS_SEED` (default seed otherwise).

use std::process::Command;
use std::time::{Duration, Instant};

use ncps_cli::report::Report;
use ncps_core::composite::{compare_com_reps, compare_com_simple, effective_params, CompositeSystem};
use ncps_core::dynamics::{wep_deviation, ParamSource, WepScenario};
use ncps_core::representation::{
    build_simple_rep, check_commutative_limit, mass_invariance_report, params_from_conditions,
};
use ncps_core::sweep::{self, Execution, SignMode};
use ncps_core::{commutator, Branch, Family, MassConditions, NCParams};

const TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn closure(seed: u64) -> Outcome {
    let start = Instant::now();
    let params = sweep::random_params(seed, 1000, (-5.0, 1.0), SignMode::Any);
    let s = sweep::closure_sweep(&params, Execution::Parallel, TOL);
    let elapsed = start.elapsed();
    outcome(
        s.failures == 0 && elapsed < Duration::from_secs(1),
        format!(
            "{} reps over {} params, max error {:.2e}, {:.0?}",
            s.evaluated, s.trials, s.max_error, elapsed
        ),
    )
}

fn round_trip(seed: u64) -> Outcome {
    let params = sweep::random_params(seed, 1000, (-5.0, 1.0), SignMode::Any);
    let s = sweep::round_trip_sweep(&params, Execution::Parallel, TOL);
    outcome(s.failures == 0, format!("{} round trips, max relative error {:.2e}", s.evaluated, s.max_error))
}

fn branch_transform(seed: u64) -> Outcome {
    let params = sweep::random_params(seed.wrapping_add(1), 200, (0.0, 1.0), SignMode::Positive);
    let s = sweep::transform_sweep(&params, Execution::Parallel, TOL);
    outcome(s.failures == 0, format!("{} pairs, max residual {:.2e}", s.trials, s.max_error))
}

fn commutative_limit() -> Outcome {
    let scales = [1e-2, 1e-4, 1e-6];
    let mut pass = true;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    // order-one base points: the distance at scale s is about max(θ, η)·s/2
    for (theta, eta) in [(1.0, 1.0), (0.5, 1.0), (1.0, 0.25)] {
        let Ok(r) = check_commutative_limit(&scales, &NCParams::new(theta, eta), &[f64::MAX; 3]) else {
            return outcome(false, format!("limit sweep failed at ({theta}, {eta})"));
        };
        let last = r.points.last().unwrap();
        let (dm, dp) =
            (last.minus_distance.unwrap_or(f64::INFINITY), last.plus_distance.unwrap_or(f64::INFINITY));
        let gap = match (r.minus_order, r.plus_order) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        };
        pass &= r.minus_monotone && r.plus_monotone && dm < 1e-6 && dp < 1e-6 && gap < 1e-2;
        worst = (worst.0.max(dm), worst.1.max(dp), worst.2.max(gap));
    }
    outcome(
        pass,
        format!("final distances minus {:.2e}, plus {:.2e}; order gap {:.1e}", worst.0, worst.1, worst.2),
    )
}

fn effective_planck(seed: u64) -> Outcome {
    let exact =
        sweep::random_params(seed.wrapping_add(2), 1000, (-5.0, 1.0), SignMode::Any).iter().all(|p| {
            let rep = build_simple_rep(p, 0);
            let target = 1.0 + p.theta * p.eta / 4.0;
            commutator(&rep.x1, &rep.p1, 1.0).scalar == target
                && commutator(&rep.x2, &rep.p2, 1.0).scalar == target
        });
    let c = MassConditions::new(0.3, 0.2);
    let mut max_err = 0.0f64;
    for m in [0.5, 1.0, 2.0, 10.0] {
        let p = params_from_conditions(&c, m).unwrap();
        let rep = build_simple_rep(&p, 0);
        for (x, q) in [(&rep.x1, &rep.p1), (&rep.x2, &rep.p2)] {
            max_err = max_err.max((commutator(x, q, 1.0).scalar - 1.015).abs());
        }
    }
    outcome(
        exact && max_err <= TOL,
        format!("closed form exact: {exact}; conditioned |h - 1.015| max {max_err:.2e}"),
    )
}

fn kinematic_invariance() -> Outcome {
    let c = MassConditions::new(0.3, 0.2);
    let masses = [1.0, 2.0, 5.0];
    let mut pass = true;
    let mut worst = 0.0f64;
    for (family, branch) in [
        (Family::Branch, Some(Branch::Minus)),
        (Family::Branch, Some(Branch::Plus)),
        (Family::Simple, None),
        (Family::EpsilonGeneral, Some(Branch::Minus)),
    ] {
        match mass_invariance_report(&c, &masses, family, branch, TOL) {
            Ok(r) => {
                pass &= r.pass;
                worst = r.checks.iter().map(|ch| ch.measured).fold(worst, f64::max);
            }
            Err(_) => pass = false,
        }
    }
    outcome(pass, format!("4 families over masses {masses:?}, max spread {worst:.2e}"))
}

fn composite_params(seed: u64) -> Outcome {
    let c = MassConditions::new(0.3, 0.2);
    let sys = CompositeSystem::from_conditions(&c, &[1.0, 2.0]).unwrap();
    let (t, e) = effective_params(&sys);
    let m = sys.total_mass();
    let fixed = [
        sweep::ulp_distance(t, 0.1),
        sweep::ulp_distance(t, c.gamma / m),
        sweep::ulp_distance(e, 0.6),
        sweep::ulp_distance(e, c.alpha * m),
    ];
    let partitions = sweep::random_partitions(seed.wrapping_add(3), 100);
    let (ut, ue) = sweep::effective_params_ulp_sweep(&c, &partitions, Execution::Parallel);
    outcome(
        fixed.iter().all(|u| *u <= 1) && ut <= 1 && ue <= 1,
        format!("theta~={t}, eta~={e}; 100 partitions max ulp (theta {ut}, eta {ue})"),
    )
}

fn com_dichotomy() -> Outcome {
    let c = MassConditions::new(0.3, 0.2);
    let mut agree = 0.0f64;
    let mut pass = true;
    for masses in [vec![1.0, 2.0], vec![0.5, 3.0, 7.25], vec![0.1, 1.3, 2.2, 9.9, 4.0]] {
        let sys = CompositeSystem::from_conditions(&c, &masses).unwrap();
        for r in [compare_com_reps(&sys, Branch::Minus, TOL), compare_com_simple(&sys, TOL)] {
            let r = r.unwrap();
            pass &= r.equal;
            agree = agree.max(r.max_distance);
        }
    }
    // θ of the second particle off by 1%
    let mut params: Vec<NCParams> =
        [1.0, 2.0, 4.5].iter().map(|&m| params_from_conditions(&c, m).unwrap()).collect();
    params[1].theta *= 1.01;
    let sys = CompositeSystem::from_params(
        &params.iter().map(|p| p.mass).collect::<Vec<_>>(),
        &params.iter().map(|p| p.theta).collect::<Vec<_>>(),
        &params.iter().map(|p| p.eta).collect::<Vec<_>>(),
    )
    .unwrap();
    let branch = compare_com_reps(&sys, Branch::Minus, TOL).unwrap();
    let simple = compare_com_simple(&sys, TOL).unwrap();
    pass &= branch.max_distance > 1e-6 && simple.max_distance > 1e-6;
    outcome(
        pass,
        format!(
            "conditioned max distance {agree:.2e}; counterexample branch {:.2e}, simple {:.2e}",
            branch.max_distance, simple.max_distance
        ),
    )
}

fn wep() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let (mut conditioned, mut fixed, mut drift) = (0.0f64, f64::INFINITY, 0.0f64);
    for family in [Family::Branch, Family::Simple] {
        for masses in [(1.0, 2.0), (1.0, 3.7)] {
            let mut s =
                WepScenario::gravity(ParamSource::Conditions(MassConditions::new(0.01, 0.01)), family);
            s.masses = masses;
            let o = wep_deviation(&s).unwrap();
            conditioned = conditioned.max(o.deviation_max);
            drift = drift.max(o.energy_drift);
        }
        let o = wep_deviation(&WepScenario::gravity(ParamSource::Fixed { theta: 0.01, eta: 0.01 }, family))
            .unwrap();
        fixed = fixed.min(o.deviation_max);
        drift = drift.max(o.energy_drift);
    }
    let elapsed = start.elapsed();
    pass &= conditioned <= 1e-9 && fixed >= 1e-3 && drift <= 1e-10 && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!("conditioned {conditioned:.2e}, fixed {fixed:.3}, energy drift {drift:.1e}, {elapsed:.0?}"),
    )
}

struct Invocation {
    args: &'static [&'static str],
    exit: i32,
    /// Stdout must be a JSON report.
    json: bool,
}

fn cli_contract() -> Outcome {
    let cases = [
        Invocation {
            args: &["verify", "--theta", "0.5", "--eta", "0.5", "--branch", "minus"],
            exit: 0,
            json: true,
        },
        Invocation { args: &["verify", "--theta", "1.5", "--eta", "1.0"], exit: 2, json: false },
        Invocation {
            args: &["verify", "--family", "simple", "--theta", "0.5", "--eta", "0.5", "--expect-diag", "1.0"],
            exit: 1,
            json: true,
        },
        Invocation {
            args: &["com", "--masses", "1,2", "--gamma", "0.3", "--alpha", "0.2"],
            exit: 0,
            json: true,
        },
        Invocation {
            args: &["com", "--masses", "1,2,4.5", "--thetas", "0.3,0.1515,0.0667", "--etas", "0.2,0.4,0.9"],
            exit: 0,
            json: true,
        },
        Invocation { args: &["com", "--gamma", "0.3", "--alpha", "0.2"], exit: 2, json: false },
        Invocation { args: &["simulate", "--p1", "1", "--t-end", "1", "--dt", "0.1"], exit: 0, json: false },
        Invocation {
            args: &["simulate", "--wep", "--gamma", "0.01", "--alpha", "0.01"],
            exit: 0,
            json: true,
        },
        Invocation { args: &["simulate", "--dt", "0"], exit: 2, json: false },
    ];
    let mut failures = Vec::new();
    for case in &cases {
        let out = Command::new(env!("CARGO_BIN_EXE_ncps")).args(case.args).output().expect("binary runs");
        let code = out.status.code().unwrap_or(-1);
        let stdout = String::from_utf8_lossy(&out.stdout);
        let stderr = String::from_utf8_lossy(&out.stderr);
        let mut ok = code == case.exit;
        if case.json {
            ok &= schema_valid(&stdout, case.args[0]);
        } else if case.exit == 2 {
            ok &= stderr.contains("Error: ");
        }
        match case.args {
            ["verify", "--theta", "1.5", ..] => ok &= stderr.contains("DomainError: theta*eta >= 1"),
            ["simulate", "--p1", ..] => {
                let lines: Vec<&str> = stdout.lines().collect();
                ok &= lines.first() == Some(&"t,x1,x2,p1,p2,X1,X2,P1,P2") && lines.len() == 12;
            }
            _ => {}
        }
        if !ok {
            failures.push(format!("{:?} -> {code}", case.args));
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() { format!("{} invocations", cases.len()) } else { failures.join("; ") },
    )
}

fn schema_valid(text: &str, command: &str) -> bool {
    let Ok(report) = serde_json::from_str::<Report>(text) else {
        return false;
    };
    let sorted = report.checks.windows(2).all(|w| w[0].name <= w[1].name);
    report.command == command
        && report.tool.version == env!("CARGO_PKG_VERSION")
        && report.config.is_object()
        && !report.checks.is_empty()
        && sorted
        && report.to_json() == text
}

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn main() {
    let start = Instant::now();
    let seed = sweep::seed_from_env();
    println!("acceptance (seed {seed})");
    let criteria: [Criterion; 10] = [
        ("algebra closure", Box::new(move || closure(seed))),
        ("parameter round trip", Box::new(move || round_trip(seed))),
        ("branch transform", Box::new(move || branch_transform(seed))),
        ("commutative limit", Box::new(commutative_limit)),
        ("effective Planck constant", Box::new(move || effective_planck(seed))),
        ("kinematic-variable invariance", Box::new(kinematic_invariance)),
        ("composite effective parameters", Box::new(move || composite_params(seed))),
        ("COM representation dichotomy", Box::new(com_dichotomy)),
        ("WEP dynamics", Box::new(wep)),
        ("CLI contract", Box::new(cli_contract)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("{:>2}. {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let total = start.elapsed();
    let in_time = total < Duration::from_secs(30);
    println!("suite time {total:.2?} ({})", if in_time { "under 30 s" } else { "over 30 s" });
    if failed > 0 || !in_time {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

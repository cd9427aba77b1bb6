use proptest::prelude::*;

use ncps_core::composite::{
    com_rep_direct, compare_com_reps, compare_com_simple, effective_params, CompositeSystem,
};
use ncps_core::representation::{
    build_branch_rep, build_epsilon_rep, build_simple_rep, effective_planck, params_from_conditions,
    primed_params, unprimed_params, verify_nc_algebra, Branch, MassConditions, NCParams,
};
use ncps_core::{commutator, CanonicalVar, LinearForm, VarKind};

const TOL: f64 = 1e-12;

fn var() -> impl Strategy<Value = CanonicalVar> {
    (0usize..3, prop::sample::select(VarKind::ALL.to_vec())).prop_map(|(p, k)| CanonicalVar::new(p, k))
}

fn form() -> impl Strategy<Value = LinearForm> {
    (prop::collection::vec((var(), -10.0f64..10.0), 0..8), -10.0f64..10.0)
        .prop_map(|(terms, c)| LinearForm::from_terms(terms, c))
}

/// `(θ, η)` with `θη ∈ (−5, 1)` away from zero and a ratio in `[1e-2, 1e2]`.
fn nc_params() -> impl Strategy<Value = NCParams> {
    (-5.0f64..1.0, -2.0f64..2.0, any::<bool>())
        .prop_filter("nonzero product", |(q, _, _)| q.abs() > 1e-9)
        .prop_map(|(q, log_ratio, flip)| {
            let theta = (q.abs() * 10f64.powf(log_ratio)).sqrt() * if flip { -1.0 } else { 1.0 };
            NCParams::new(theta, q / theta)
        })
}

fn branches(p: &NCParams) -> Vec<Branch> {
    if p.product() > 0.0 {
        vec![Branch::Minus, Branch::Plus]
    } else {
        vec![Branch::Minus]
    }
}

proptest! {
    #[test]
    fn commutator_is_antisymmetric(a in form(), b in form()) {
        prop_assert_eq!(commutator(&a, &b, 1.0).scalar, -commutator(&b, &a, 1.0).scalar);
    }

    #[test]
    fn commutator_is_bilinear(alpha in -10.0f64..10.0, a in form(), b in form(), c in form()) {
        let combined = alpha * &a + b.clone();
        let lhs = commutator(&combined, &c, 1.0).scalar;
        let rhs = alpha * commutator(&a, &c, 1.0).scalar + commutator(&b, &c, 1.0).scalar;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(100.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn constants_are_central(a in form(), k in -10.0f64..10.0) {
        prop_assert_eq!(commutator(&a, &LinearForm::constant_form(k), 1.0).scalar, 0.0);
    }

    #[test]
    fn arithmetic_keeps_sparse_form(a in form(), b in form(), k in -3.0f64..3.0) {
        let sum = &a + &(k * &b);
        prop_assert!(sum.terms().all(|(_, c)| c != 0.0));
        prop_assert!((&a - &a).is_empty());
    }

    #[test]
    fn branch_reps_close_the_algebra(p in nc_params()) {
        for b in branches(&p) {
            let rep = build_branch_rep(&p, b, 0).unwrap();
            let report = verify_nc_algebra(&rep, p.theta, p.eta, 1.0, TOL);
            prop_assert!(report.pass, "{:?} {:?}", p, report);
        }
    }

    #[test]
    fn branch_matches_epsilon_family(p in nc_params()) {
        for b in branches(&p) {
            let (tp, ep) = primed_params(&p, b).unwrap();
            let via_eps = build_epsilon_rep(&p, tp, ep, 0).unwrap();
            let direct = build_branch_rep(&p, b, 0).unwrap();
            let scale = direct.forms().iter().flat_map(|f| f.terms().map(|(_, c)| c.abs())).fold(1.0, f64::max);
            prop_assert!(via_eps.distance(&direct) <= TOL * scale);
        }
    }

    #[test]
    fn primed_params_round_trip(p in nc_params()) {
        for b in branches(&p) {
            let (tp, ep) = primed_params(&p, b).unwrap();
            let (t, e) = unprimed_params(tp, ep);
            prop_assert!(((t - p.theta) / p.theta).abs() <= TOL);
            prop_assert!(((e - p.eta) / p.eta).abs() <= TOL);
        }
    }

    #[test]
    fn simple_family_diagonal_is_exact(theta in -3.0f64..3.0, eta in -3.0f64..3.0) {
        let p = NCParams::new(theta, eta);
        let rep = build_simple_rep(&p, 0);
        prop_assert_eq!(commutator(&rep.x1, &rep.p1, 1.0).scalar, effective_planck(&p));
        prop_assert_eq!(commutator(&rep.x2, &rep.p2, 1.0).scalar, effective_planck(&p));
        prop_assert!((commutator(&rep.x1, &rep.x2, 1.0).scalar - theta).abs() <= 1e-15 * theta.abs().max(1.0));
    }

    #[test]
    fn conditioned_product_is_mass_independent(gamma in 0.01f64..2.0, alpha in 0.01f64..0.45, m in 0.05f64..50.0) {
        let c = MassConditions::new(gamma, alpha);
        let p = params_from_conditions(&c, m).unwrap();
        let product = p.product();
        prop_assert!((product - c.product()).abs() <= 2.0 * f64::EPSILON * c.product());
    }

    #[test]
    fn direct_route_realizes_effective_params(
        masses in prop::collection::vec(0.1f64..10.0, 2..=5),
        seed_params in prop::collection::vec(nc_params(), 5),
    ) {
        let n = masses.len();
        let thetas: Vec<f64> = seed_params[..n].iter().map(|p| p.theta).collect();
        let etas: Vec<f64> = seed_params[..n].iter().map(|p| p.eta).collect();
        let sys = CompositeSystem::from_params(&masses, &thetas, &etas).unwrap();
        let (t, e) = effective_params(&sys);
        let rep = com_rep_direct(&sys, Branch::Minus).unwrap();
        prop_assert!(verify_nc_algebra(&rep, t, e, 1.0, TOL).pass);
    }

    #[test]
    fn conditioned_effective_params_depend_only_on_total(
        gamma in 0.01f64..1.0, alpha in 0.01f64..0.9,
        masses in prop::collection::vec(0.1f64..10.0, 1..=5),
    ) {
        let c = MassConditions::new(gamma, alpha);
        let sys = CompositeSystem::from_conditions(&c, &masses).unwrap();
        let (t, e) = effective_params(&sys);
        let m = sys.total_mass();
        prop_assert!((t * m - gamma).abs() <= 4.0 * f64::EPSILON * gamma);
        prop_assert!((e / m - alpha).abs() <= 4.0 * f64::EPSILON * alpha);
    }

    #[test]
    fn routes_agree_under_conditions(
        gamma in 0.01f64..1.0, alpha in 0.01f64..0.9,
        masses in prop::collection::vec(0.1f64..10.0, 1..=5),
    ) {
        let sys = CompositeSystem::from_conditions(&MassConditions::new(gamma, alpha), &masses).unwrap();
        prop_assert!(compare_com_reps(&sys, Branch::Minus, TOL).unwrap().equal);
        prop_assert!(compare_com_reps(&sys, Branch::Plus, 1e-10).unwrap().equal);
        prop_assert!(compare_com_simple(&sys, TOL).unwrap().equal);
    }
}

#[test]
fn routes_disagree_when_conditions_are_perturbed() {
    let c = MassConditions::new(0.3, 0.2);
    let mut sys_params: Vec<NCParams> =
        [1.0, 2.0, 4.5].iter().map(|&m| params_from_conditions(&c, m).unwrap()).collect();
    sys_params[1].theta *= 1.01;
    let masses: Vec<f64> = sys_params.iter().map(|p| p.mass).collect();
    let thetas: Vec<f64> = sys_params.iter().map(|p| p.theta).collect();
    let etas: Vec<f64> = sys_params.iter().map(|p| p.eta).collect();
    let sys = CompositeSystem::from_params(&masses, &thetas, &etas).unwrap();
    let report = compare_com_reps(&sys, Branch::Minus, TOL).unwrap();
    assert!(!report.equal && report.max_distance > 1e-6, "{report:?}");
    assert!(report.conditions.is_none());
    assert!(!compare_com_simple(&sys, TOL).unwrap().equal);
}

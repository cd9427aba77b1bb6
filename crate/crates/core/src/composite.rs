//! Center-of-mass variables of multi-particle systems.
//!
//! `X̃ = Σ m_a X⁽ᵃ⁾ / M` and `P̃ = Σ P⁽ᵃ⁾` satisfy the noncommutative algebra
//! with effective parameters `θ̃ = Σ m_a²θ_a / M²` and `η̃ = Σ η_a`. Two
//! routes give a representation for them:
//!
//! * algebraic: a single-particle representation with `(θ̃, η̃)` written over
//!   the canonical center-of-mass pair `x̃ = Σ m_a x⁽ᵃ⁾/M`, `p̃ = Σ p⁽ᵃ⁾`,
//! * direct: the mass-weighted sum of the per-particle representations.
//!
//! Both are compared in the per-particle canonical basis.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{form_distance, CanonicalVar, LinearForm, VarKind};
use crate::error::{NcError, Result};
use crate::numeric::{div_dd, square_dd, Accumulator};
use crate::representation::{
    build_branch_rep, build_rep, build_simple_rep, params_from_conditions, Branch, Family, MassConditions,
    NCParams, Representation, OPERATOR_NAMES,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub id: usize,
    pub mass: f64,
    pub params: NCParams,
}

impl Particle {
    /// Mass is taken from `params.mass`.
    pub fn new(id: usize, params: NCParams) -> Self {
        Particle { id, mass: params.mass, params }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeSystem {
    particles: Vec<Particle>,
    total_mass: f64,
}

impl CompositeSystem {
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        if particles.is_empty() {
            return Err(NcError::Config("particle list is empty".into()));
        }
        let mut ids = BTreeSet::new();
        let mut total = Accumulator::default();
        for p in &particles {
            p.params.validate()?;
            if p.mass != p.params.mass {
                return Err(NcError::Config(format!(
                    "particle {} mass {} differs from its parameter mass {}",
                    p.id, p.mass, p.params.mass
                )));
            }
            if !ids.insert(p.id) {
                return Err(NcError::Config(format!("duplicate particle id {}", p.id)));
            }
            total.add(p.mass);
        }
        Ok(CompositeSystem { particles, total_mass: total.value() })
    }

    /// Particles `0..n` with `θ_a = γ/m_a`, `η_a = αm_a`.
    pub fn from_conditions(c: &MassConditions, masses: &[f64]) -> Result<Self> {
        let particles = masses
            .iter()
            .enumerate()
            .map(|(id, &m)| params_from_conditions(c, m).map(|p| Particle::new(id, p)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(particles)
    }

    /// Particles `0..n` with explicit per-particle parameters.
    pub fn from_params(masses: &[f64], thetas: &[f64], etas: &[f64]) -> Result<Self> {
        if masses.len() != thetas.len() || masses.len() != etas.len() {
            return Err(NcError::Config(format!(
                "{} masses, {} thetas and {} etas must have equal length",
                masses.len(),
                thetas.len(),
                etas.len()
            )));
        }
        let particles = masses
            .iter()
            .zip(thetas.iter().zip(etas))
            .enumerate()
            .map(|(id, (&m, (&t, &e)))| Particle::new(id, NCParams::new(t, e).with_mass(m)))
            .collect();
        Self::new(particles)
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn hbar(&self) -> f64 {
        self.particles[0].params.hbar
    }

    /// The shared `(γ, α)` if every particle has `θ_a m_a` and `η_a / m_a`
    /// equal to relative tolerance `rel_tol`.
    pub fn shared_conditions(&self, rel_tol: f64) -> Option<MassConditions> {
        let gammas: Vec<f64> = self.particles.iter().map(|p| p.params.theta * p.mass).collect();
        let alphas: Vec<f64> = self.particles.iter().map(|p| p.params.eta / p.mass).collect();
        let agree = |xs: &[f64]| {
            let scale = xs.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
            xs.iter().all(|x| (x - xs[0]).abs() <= rel_tol * scale)
        };
        (agree(&gammas) && agree(&alphas)).then(|| MassConditions::new(gammas[0], alphas[0]))
    }

    /// Same particles with every mass multiplied by `factor`, keeping the
    /// per-particle `(θ_a, η_a)`.
    pub fn scaled_masses(&self, factor: f64) -> Result<Self> {
        let particles =
            self.particles.iter().map(|p| Particle::new(p.id, p.params.with_mass(p.mass * factor))).collect();
        Self::new(particles)
    }
}

/// Mass-weighted coordinates and summed momenta `(x̃1, x̃2, p̃1, p̃2)`.
pub fn com_canonical(sys: &CompositeSystem) -> [LinearForm; 4] {
    let m = sys.total_mass();
    let mut out: [LinearForm; 4] = Default::default();
    for p in sys.particles() {
        let w = p.mass / m;
        out[0].add_term(CanonicalVar::x1(p.id), w);
        out[1].add_term(CanonicalVar::x2(p.id), w);
        out[2].add_term(CanonicalVar::p1(p.id), 1.0);
        out[3].add_term(CanonicalVar::p2(p.id), 1.0);
    }
    out
}

/// `(θ̃, η̃) = (Σ m_a²θ_a / M², Σ η_a)`, accumulated in double-double so that
/// mass-conditioned systems land within an ulp of `(γ/M, αM)`.
pub fn effective_params(sys: &CompositeSystem) -> (f64, f64) {
    let mut numerator = Accumulator::default();
    let mut mass = Accumulator::default();
    let mut eta = Accumulator::default();
    for p in sys.particles() {
        // m²θ = (m·m)·θ with the low part of m·m carried
        let (sq, sq_err) = crate::numeric::two_prod(p.mass, p.mass);
        numerator.add_product(sq, p.params.theta);
        numerator.add(sq_err * p.params.theta);
        mass.add(p.mass);
        eta.add(p.params.eta);
    }
    let theta = div_dd(numerator.parts(), square_dd(mass.parts()));
    (theta, eta.value())
}

/// Effective parameters as an [`NCParams`] of a particle with mass `M`.
pub fn effective_ncparams(sys: &CompositeSystem) -> NCParams {
    let (theta, eta) = effective_params(sys);
    NCParams { theta, eta, hbar: sys.hbar(), mass: sys.total_mass() }
}

const PLACEHOLDER: usize = usize::MAX;

/// Writes a single-particle representation over the center-of-mass pair.
fn over_com(rep: Representation, sys: &CompositeSystem) -> Representation {
    let com = com_canonical(sys);
    let image = |v: CanonicalVar| match v.kind {
        VarKind::X1 => com[0].clone(),
        VarKind::X2 => com[1].clone(),
        VarKind::P1 => com[2].clone(),
        VarKind::P2 => com[3].clone(),
    };
    Representation {
        x1: rep.x1.substitute(image),
        x2: rep.x2.substitute(image),
        p1: rep.p1.substitute(image),
        p2: rep.p2.substitute(image),
        support: sys.particles().iter().map(|p| p.id).collect(),
        ..rep
    }
}

/// Branch representation with `(θ̃, η̃)` over `(x̃, p̃)`, expanded into the
/// per-particle basis.
pub fn com_rep_algebraic(sys: &CompositeSystem, b: Branch) -> Result<Representation> {
    let rep = build_branch_rep(&effective_ncparams(sys), b, PLACEHOLDER)?;
    Ok(over_com(rep, sys))
}

/// `ε = 1` representation with `(θ̃, η̃)` over `(x̃, p̃)`.
pub fn com_simple_algebraic(sys: &CompositeSystem) -> Representation {
    over_com(build_simple_rep(&effective_ncparams(sys), PLACEHOLDER), sys)
}

/// Mass-weighted sum of per-particle representations of one family.
///
/// `reps` must be in the order of `sys.particles()`. Mixed families or
/// branches are rejected.
pub fn combine_com(sys: &CompositeSystem, reps: &[Representation]) -> Result<Representation> {
    if reps.len() != sys.particles().len() {
        return Err(NcError::Config(format!(
            "{} representations for {} particles",
            reps.len(),
            sys.particles().len()
        )));
    }
    let first = &reps[0];
    if reps.iter().any(|r| r.family != first.family) {
        return Err(NcError::Config("particles use different representation families".into()));
    }
    if reps.iter().any(|r| r.branch != first.branch) {
        return Err(NcError::Config("particles use different branches".into()));
    }
    let m = sys.total_mass();
    let mut out = Representation {
        x1: LinearForm::zero(),
        x2: LinearForm::zero(),
        p1: LinearForm::zero(),
        p2: LinearForm::zero(),
        family: first.family,
        branch: first.branch,
        params: effective_ncparams(sys),
        support: sys.particles().iter().map(|p| p.id).collect(),
    };
    for (p, r) in sys.particles().iter().zip(reps) {
        if r.particle_id() != Some(p.id) {
            return Err(NcError::Config(format!("representation does not act on particle {}", p.id)));
        }
        let w = p.mass / m;
        out.x1.add_scaled(&r.x1, w);
        out.x2.add_scaled(&r.x2, w);
        out.p1.add_scaled(&r.p1, 1.0);
        out.p2.add_scaled(&r.p2, 1.0);
    }
    Ok(out)
}

fn per_particle(sys: &CompositeSystem, family: Family, b: Branch) -> Result<Vec<Representation>> {
    sys.particles().iter().map(|p| build_rep(&p.params, family, b, p.id)).collect()
}

/// Center-of-mass representation from the per-particle branch
/// representations (one branch for all particles).
pub fn com_rep_direct(sys: &CompositeSystem, b: Branch) -> Result<Representation> {
    combine_com(sys, &per_particle(sys, Family::Branch, b)?)
}

/// Center-of-mass representation from per-particle `ε = 1` representations.
pub fn com_simple_direct(sys: &CompositeSystem) -> Result<Representation> {
    combine_com(sys, &per_particle(sys, Family::Simple, Branch::Minus)?)
}

/// If `form`'s coefficients on `kind` are `c·m_a/M` for every particle, i.e.
/// the form depends on those variables only through the center-of-mass
/// coordinate, returns `c`.
pub fn com_coordinate_coefficient(
    form: &LinearForm,
    sys: &CompositeSystem,
    kind: VarKind,
    rel_tol: f64,
) -> Option<f64> {
    debug_assert!(kind.is_position());
    let m = sys.total_mass();
    let ratios: Vec<f64> =
        sys.particles().iter().map(|p| form.coeff(CanonicalVar::new(p.id, kind)) * m / p.mass).collect();
    let scale = ratios.iter().fold(f64::MIN_POSITIVE, |acc, r| acc.max(r.abs()));
    ratios
        .iter()
        .all(|r| (r - ratios[0]).abs() <= rel_tol * scale)
        .then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
}

/// How the total momentum depends on the center-of-mass coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumScaling {
    /// Coefficient of `x̃2` in `P̃1`, when `P̃1` depends on coordinates only
    /// through `x̃2`.
    pub x_tilde_coefficient: Option<f64>,
    /// That coefficient divided by the total mass.
    pub per_unit_mass: Option<f64>,
}

fn momentum_scaling(rep: &Representation, sys: &CompositeSystem, rel_tol: f64) -> MomentumScaling {
    let c = com_coordinate_coefficient(&rep.p1, sys, VarKind::X2, rel_tol);
    MomentumScaling { x_tilde_coefficient: c, per_unit_mass: c.map(|c| c / sys.total_mass()) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormDistance {
    pub form: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub family: Family,
    pub branch: Option<Branch>,
    pub theta_tilde: f64,
    pub eta_tilde: f64,
    pub total_mass: f64,
    pub distances: Vec<FormDistance>,
    pub max_distance: f64,
    pub equal: bool,
    pub tol: f64,
    /// Shared `(γ, α)` detected among the particles, if any.
    pub conditions: Option<MassConditions>,
    pub direct_momentum: MomentumScaling,
    pub algebraic_momentum: MomentumScaling,
}

/// Relative tolerance for detecting shared mass conditions and
/// center-of-mass dependence.
const STRUCTURE_REL_TOL: f64 = 1e-12;

fn compare(
    sys: &CompositeSystem,
    direct: Representation,
    algebraic: Representation,
    tol: f64,
) -> ComparisonReport {
    let distances: Vec<FormDistance> = OPERATOR_NAMES
        .iter()
        .zip(direct.forms().iter().zip(algebraic.forms()))
        .map(|(name, (d, a))| FormDistance { form: (*name).to_string(), distance: form_distance(d, a) })
        .collect();
    let max_distance = distances.iter().map(|d| d.distance).fold(0.0, f64::max);
    ComparisonReport {
        family: algebraic.family,
        branch: algebraic.branch,
        theta_tilde: algebraic.params.theta,
        eta_tilde: algebraic.params.eta,
        total_mass: sys.total_mass(),
        distances,
        max_distance,
        equal: max_distance <= tol,
        tol,
        conditions: sys.shared_conditions(STRUCTURE_REL_TOL),
        direct_momentum: momentum_scaling(&direct, sys, STRUCTURE_REL_TOL),
        algebraic_momentum: momentum_scaling(&algebraic, sys, STRUCTURE_REL_TOL),
    }
}

/// Direct versus algebraic center-of-mass branch representation.
pub fn compare_com_reps(sys: &CompositeSystem, b: Branch, tol: f64) -> Result<ComparisonReport> {
    let direct = com_rep_direct(sys, b)?;
    let algebraic = com_rep_algebraic(sys, b)?;
    Ok(compare(sys, direct, algebraic, tol))
}

/// Direct versus algebraic center-of-mass `ε = 1` representation.
pub fn compare_com_simple(sys: &CompositeSystem, tol: f64) -> Result<ComparisonReport> {
    let direct = com_simple_direct(sys)?;
    let algebraic = com_simple_algebraic(sys);
    Ok(compare(sys, direct, algebraic, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::commutator;
    use crate::representation::verify_nc_algebra;

    const TOL: f64 = 1e-12;

    fn conditioned(masses: &[f64]) -> CompositeSystem {
        CompositeSystem::from_conditions(&MassConditions::new(0.3, 0.2), masses).unwrap()
    }

    #[test]
    fn rejects_bad_systems() {
        assert!(matches!(CompositeSystem::new(vec![]), Err(NcError::Config(_))));
        let p = NCParams::new(0.1, 0.1);
        assert!(CompositeSystem::new(vec![Particle::new(0, p), Particle::new(0, p)]).is_err());
        assert!(CompositeSystem::from_params(&[1.0], &[0.1, 0.2], &[0.1]).is_err());
        assert!(CompositeSystem::from_params(&[-1.0], &[0.1], &[0.1]).is_err());
    }

    #[test]
    fn com_canonical_forms() {
        let one = conditioned(&[2.0]);
        let [x1, _, p1, _] = com_canonical(&one);
        assert_eq!(x1, LinearForm::var(CanonicalVar::x1(0)));
        assert_eq!(p1, LinearForm::var(CanonicalVar::p1(0)));

        let pair = conditioned(&[1.0, 1.0]);
        let [x1, ..] = com_canonical(&pair);
        assert_eq!(x1.coeff(CanonicalVar::x1(0)), 0.5);
        assert_eq!(x1.coeff(CanonicalVar::x1(1)), 0.5);

        let uneven = conditioned(&[1.0, 2.0]);
        let [x1, x2, p1, p2] = com_canonical(&uneven);
        assert_eq!(commutator(&x1, &p1, 1.0).scalar, 1.0);
        assert_eq!(commutator(&x2, &p2, 1.0).scalar, 1.0);
        assert_eq!(commutator(&x1, &p2, 1.0).scalar, 0.0);
    }

    #[test]
    fn effective_params_examples() {
        let (t, e) = effective_params(&conditioned(&[1.0, 2.0]));
        assert_eq!(t, 0.3 / 3.0);
        assert_eq!(e, 0.2 * 3.0);
        assert!((t - 0.1).abs() < 1e-16 && (e - 0.6).abs() < 1e-15);

        let single = CompositeSystem::from_params(&[3.0], &[0.7], &[0.4]).unwrap();
        assert_eq!(effective_params(&single), (0.7, 0.4));
    }

    #[test]
    fn single_particle_routes_coincide() {
        let sys = CompositeSystem::from_params(&[3.0], &[0.7], &[0.4]).unwrap();
        let single = build_branch_rep(&sys.particles()[0].params, Branch::Minus, 0).unwrap();
        let algebraic = com_rep_algebraic(&sys, Branch::Minus).unwrap();
        let direct = com_rep_direct(&sys, Branch::Minus).unwrap();
        assert_eq!(algebraic.forms(), single.forms());
        assert_eq!(direct.forms(), single.forms());
        assert!(compare_com_reps(&sys, Branch::Minus, TOL).unwrap().equal);
        assert!(compare_com_simple(&sys, TOL).unwrap().equal);
    }

    #[test]
    fn equal_masses_halve_coefficients() {
        let sys = CompositeSystem::from_params(&[1.5, 1.5], &[0.4, 0.4], &[0.3, 0.3]).unwrap();
        let single = build_branch_rep(&sys.particles()[0].params, Branch::Minus, 0).unwrap();
        let direct = com_rep_direct(&sys, Branch::Minus).unwrap();
        for id in 0..2 {
            assert_eq!(direct.x1.coeff(CanonicalVar::x1(id)), 0.5 * single.x1.coeff(CanonicalVar::x1(0)));
        }
    }

    #[test]
    fn algebraic_route_realizes_effective_params() {
        let sys = conditioned(&[1.0, 2.0]);
        let rep = com_rep_algebraic(&sys, Branch::Minus).unwrap();
        assert!((rep.params.theta - 0.1).abs() < 1e-16);
        assert!(verify_nc_algebra(&rep, rep.params.theta, rep.params.eta, 1.0, TOL).pass);

        let big = CompositeSystem::from_params(&[1.0, 1.0], &[2.0, 2.0], &[1.0, 1.0]).unwrap();
        assert!(matches!(com_rep_algebraic(&big, Branch::Minus), Err(NcError::Domain(_))));
    }

    #[test]
    fn direct_route_algebra_without_conditions() {
        let sys =
            CompositeSystem::from_params(&[1.0, 2.5, 0.7], &[0.3, -0.2, 0.9], &[0.2, 0.5, 0.6]).unwrap();
        let rep = com_rep_direct(&sys, Branch::Minus).unwrap();
        let (t, e) = effective_params(&sys);
        assert!(verify_nc_algebra(&rep, t, e, 1.0, TOL).pass);
    }

    #[test]
    fn dichotomy_branch_family() {
        let report = compare_com_reps(&conditioned(&[1.0, 2.0]), Branch::Minus, TOL).unwrap();
        assert!(report.equal, "{report:?}");
        assert!(report.conditions.is_some());

        let violated = CompositeSystem::from_params(&[1.0, 2.0], &[0.3, 0.3], &[0.2, 0.2]).unwrap();
        let report = compare_com_reps(&violated, Branch::Minus, TOL).unwrap();
        assert!(!report.equal);
        assert!(report.max_distance > 1e-6);
        assert!(report.conditions.is_none());
        assert!(report.direct_momentum.x_tilde_coefficient.is_none());
    }

    #[test]
    fn dichotomy_simple_family() {
        let report = compare_com_simple(&conditioned(&[1.0, 2.0]), TOL).unwrap();
        assert!(report.equal);
        let algebraic = com_simple_algebraic(&conditioned(&[1.0, 2.0]));
        for id in 0..2 {
            assert!((algebraic.x1.coeff(CanonicalVar::p2(id)) + 0.05).abs() < 1e-16);
        }
        let violated = CompositeSystem::from_params(&[1.0, 2.0], &[0.3, 0.3], &[0.2, 0.2]).unwrap();
        let report = compare_com_simple(&violated, TOL).unwrap();
        assert!(!report.equal);
        let p_part = report.distances.iter().find(|d| d.form == "X1").unwrap().distance;
        assert!(p_part > 1e-6);
    }

    #[test]
    fn total_momentum_scales_with_mass() {
        let sys = conditioned(&[1.0, 2.0]);
        let doubled = conditioned(&[2.0, 4.0]);
        let a = compare_com_reps(&sys, Branch::Minus, TOL).unwrap();
        let b = compare_com_reps(&doubled, Branch::Minus, TOL).unwrap();
        let ca = a.direct_momentum.x_tilde_coefficient.unwrap();
        let cb = b.direct_momentum.x_tilde_coefficient.unwrap();
        assert!((cb - 2.0 * ca).abs() < 1e-12);
        assert!(
            (a.direct_momentum.per_unit_mass.unwrap() - b.direct_momentum.per_unit_mass.unwrap()).abs()
                < 1e-12
        );
        assert!(
            (a.algebraic_momentum.per_unit_mass.unwrap() - a.direct_momentum.per_unit_mass.unwrap()).abs()
                < 1e-12
        );
    }

    #[test]
    fn mixed_families_are_rejected() {
        let sys = CompositeSystem::from_params(&[1.0, 2.0], &[0.3, 0.3], &[0.2, 0.2]).unwrap();
        let a = build_branch_rep(&sys.particles()[0].params, Branch::Minus, 0).unwrap();
        let b = build_simple_rep(&sys.particles()[1].params, 1);
        assert!(matches!(combine_com(&sys, &[a.clone(), b]), Err(NcError::Config(_))));
        let c = build_branch_rep(&sys.particles()[1].params, Branch::Plus, 1).unwrap();
        assert!(matches!(combine_com(&sys, &[a, c]), Err(NcError::Config(_))));
    }
}

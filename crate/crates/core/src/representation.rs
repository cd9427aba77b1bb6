//! Single-particle representations of the noncommutative algebra.
//!
//! Three families are built, all of the form
//!
//! ```text
//! X1 = ε(x1 − ½θ′p2)    X2 = ε(x2 + ½θ′p1)
//! P1 = ε(p1 + ½η′x2)    P2 = ε(p2 − ½η′x1)
//! ```
//!
//! * `epsilon_general`: free `(θ′, η′)` with `ε = 1/√(1 + θ′η′/4)`,
//! * `branch`: `(θ′, η′)` solved from the target `(θ, η)`, two signs,
//! * `simple`: `ε = 1`, `θ′ = θ`, `η′ = η`, which shifts the diagonal
//!   commutator to `ħ(1 + θη/4)`.
//!
//! With `s = √(1 − θη)` the branch solutions are evaluated in rationalized
//! form. For the minus branch `½θ′ = θ/(1 + s)`, `½η′ = η/(1 + s)` and
//! `ε = √((1 + s)/2)`, which stay finite and cancellation-free down to
//! `θη = 0` and for negative `θη`. For the plus branch `½θ′ = (1 + s)/η`,
//! `½η′ = (1 + s)/θ` and `ε = √(θη/(2(1 + s)))`.

use serde::{Deserialize, Serialize};

use crate::algebra::{commutator, form_distance, CanonicalVar, LinearForm, VarKind};
use crate::error::{NcError, Result};
use crate::report::{all_pass, Check};

/// Noncommutativity parameters of one particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NCParams {
    pub theta: f64,
    pub eta: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl NCParams {
    /// `ħ = 1`, `m = 1`.
    pub fn new(theta: f64, eta: f64) -> Self {
        NCParams { theta, eta, hbar: 1.0, mass: 1.0 }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn product(&self) -> f64 {
        self.theta * self.eta
    }

    /// Checks finiteness, `m > 0` and `ħ > 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.theta.is_finite() && self.eta.is_finite()) {
            return Err(NcError::Domain("theta and eta must be finite".into()));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(NcError::Domain(format!("mass must be positive (got {})", self.mass)));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(NcError::Domain(format!("hbar must be positive (got {})", self.hbar)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    /// The branch that reduces to `X = x`, `P = p` when `θ, η → 0`.
    #[default]
    Minus,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    EpsilonGeneral,
    #[default]
    Branch,
    Simple,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::EpsilonGeneral => "epsilon_general",
            Family::Branch => "branch",
            Family::Simple => "simple",
        }
    }
}

/// Noncommutative `(X1, X2, P1, P2)` written over canonical variables.
///
/// `support` lists the particles whose canonical variables the forms use:
/// one entry for a single particle, several for center-of-mass
/// representations. `params` holds the parameters the representation
/// realizes (effective ones for a composite system, whose mass is the total
/// mass).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub x1: LinearForm,
    pub x2: LinearForm,
    pub p1: LinearForm,
    pub p2: LinearForm,
    pub family: Family,
    pub branch: Option<Branch>,
    pub params: NCParams,
    pub support: Vec<usize>,
}

/// Names of the four operators, in `forms()` order.
pub const OPERATOR_NAMES: [&str; 4] = ["X1", "X2", "P1", "P2"];

impl Representation {
    pub fn forms(&self) -> [&LinearForm; 4] {
        [&self.x1, &self.x2, &self.p1, &self.p2]
    }

    /// The single particle this representation acts on, if any.
    pub fn particle_id(&self) -> Option<usize> {
        match self.support.as_slice() {
            [id] => Some(*id),
            _ => None,
        }
    }

    /// Canonical `X = x`, `P = p`.
    pub fn identity(particle: usize, params: NCParams) -> Self {
        Representation {
            x1: LinearForm::var(CanonicalVar::x1(particle)),
            x2: LinearForm::var(CanonicalVar::x2(particle)),
            p1: LinearForm::var(CanonicalVar::p1(particle)),
            p2: LinearForm::var(CanonicalVar::p2(particle)),
            family: Family::EpsilonGeneral,
            branch: None,
            params,
            support: vec![particle],
        }
    }

    /// Largest coefficient distance between corresponding forms.
    pub fn distance(&self, other: &Representation) -> f64 {
        self.forms().iter().zip(other.forms()).map(|(a, b)| form_distance(a, b)).fold(0.0, f64::max)
    }
}

/// `θ·m = γ` and `η/m = α` for every particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassConditions {
    pub gamma: f64,
    pub alpha: f64,
}

impl MassConditions {
    pub fn new(gamma: f64, alpha: f64) -> Self {
        MassConditions { gamma, alpha }
    }

    /// `αγ`, the mass-independent value of `θη`.
    pub fn product(&self) -> f64 {
        self.alpha * self.gamma
    }
}

/// `ε = 1/√(1 + θ′η′/4)`.
pub fn epsilon_factor(theta_prime: f64, eta_prime: f64) -> Result<f64> {
    let radicand = 1.0 + theta_prime * eta_prime / 4.0;
    if !(radicand > 0.0) {
        return Err(NcError::Domain(format!("1 + theta'*eta'/4 must be positive (got {radicand})")));
    }
    Ok(1.0 / radicand.sqrt())
}

/// Prefactor and half-shifts of a branch representation.
#[derive(Debug, Clone, Copy)]
struct BranchCoefficients {
    prefactor: f64,
    /// `½θ′`, coefficient of the momentum inside `X`.
    x_shift: f64,
    /// `½η′`, coefficient of the coordinate inside `P`.
    p_shift: f64,
}

fn branch_coefficients(p: &NCParams, b: Branch) -> Result<BranchCoefficients> {
    p.validate()?;
    let product = p.product();
    if product > 1.0 {
        return Err(NcError::Domain(format!("theta*eta >= 1 (got {product})")));
    }
    let s = (1.0 - product).sqrt();
    match b {
        Branch::Minus => Ok(BranchCoefficients {
            prefactor: ((1.0 + s) / 2.0).sqrt(),
            x_shift: p.theta / (1.0 + s),
            p_shift: p.eta / (1.0 + s),
        }),
        Branch::Plus => {
            if p.theta == 0.0 || p.eta == 0.0 {
                return Err(NcError::Degenerate("plus branch diverges when theta or eta is zero".into()));
            }
            if product < 0.0 {
                return Err(NcError::Domain(format!(
                    "plus branch needs theta*eta > 0 for a real prefactor (got {product})"
                )));
            }
            Ok(BranchCoefficients {
                prefactor: (product / (2.0 * (1.0 + s))).sqrt(),
                x_shift: (1.0 + s) / p.eta,
                p_shift: (1.0 + s) / p.theta,
            })
        }
    }
}

/// Solves `θ = θ′/(1 + θ′η′/4)`, `η = η′/(1 + θ′η′/4)` for `(θ′, η′)`.
pub fn primed_params(p: &NCParams, b: Branch) -> Result<(f64, f64)> {
    let c = branch_coefficients(p, b)?;
    Ok((2.0 * c.x_shift, 2.0 * c.p_shift))
}

/// Inverse of [`primed_params`]: `(θ′, η′) -> (θ, η)`.
pub fn unprimed_params(theta_prime: f64, eta_prime: f64) -> (f64, f64) {
    let d = 1.0 + theta_prime * eta_prime / 4.0;
    (theta_prime / d, eta_prime / d)
}

fn assemble(
    particle: usize,
    prefactor: f64,
    x_shift: f64,
    p_shift: f64,
    family: Family,
    branch: Option<Branch>,
    params: NCParams,
) -> Representation {
    let x1 = CanonicalVar::x1(particle);
    let x2 = CanonicalVar::x2(particle);
    let p1 = CanonicalVar::p1(particle);
    let p2 = CanonicalVar::p2(particle);
    let shifted = prefactor * x_shift;
    let boosted = prefactor * p_shift;
    Representation {
        x1: LinearForm::from_terms([(x1, prefactor), (p2, -shifted)], 0.0),
        x2: LinearForm::from_terms([(x2, prefactor), (p1, shifted)], 0.0),
        p1: LinearForm::from_terms([(p1, prefactor), (x2, boosted)], 0.0),
        p2: LinearForm::from_terms([(p2, prefactor), (x1, -boosted)], 0.0),
        family,
        branch,
        params,
        support: vec![particle],
    }
}

/// General `ε` representation for given primed parameters. The realized
/// `(θ, η)` are stored in `params` alongside the caller's `ħ` and mass.
pub fn build_epsilon_rep(
    p: &NCParams,
    theta_prime: f64,
    eta_prime: f64,
    particle: usize,
) -> Result<Representation> {
    let eps = epsilon_factor(theta_prime, eta_prime)?;
    let (theta, eta) = unprimed_params(theta_prime, eta_prime);
    let params = NCParams { theta, eta, ..*p };
    Ok(assemble(particle, eps, theta_prime / 2.0, eta_prime / 2.0, Family::EpsilonGeneral, None, params))
}

/// Branch representation realizing `[X1,X2] = iħθ`, `[P1,P2] = iħη`,
/// `[Xi,Pj] = iħδij`.
pub fn build_branch_rep(p: &NCParams, b: Branch, particle: usize) -> Result<Representation> {
    let c = branch_coefficients(p, b)?;
    Ok(assemble(particle, c.prefactor, c.x_shift, c.p_shift, Family::Branch, Some(b), *p))
}

/// `ε = 1` representation (`X1 = x1 − ½θp2`, ...). Defined for every `θ, η`.
pub fn build_simple_rep(p: &NCParams, particle: usize) -> Representation {
    assemble(particle, 1.0, p.theta / 2.0, p.eta / 2.0, Family::Simple, None, *p)
}

/// Builds the representation of `family`; `branch` selects the primed
/// parameters for the two `θ′`-solved families.
pub fn build_rep(p: &NCParams, family: Family, branch: Branch, particle: usize) -> Result<Representation> {
    match family {
        Family::Branch => build_branch_rep(p, branch, particle),
        Family::Simple => {
            p.validate()?;
            Ok(build_simple_rep(p, particle))
        }
        Family::EpsilonGeneral => {
            let (tp, ep) = primed_params(p, branch)?;
            build_epsilon_rep(p, tp, ep, particle)
        }
    }
}

/// `ħ(1 + θη/4)`.
pub fn effective_planck(p: &NCParams) -> f64 {
    p.hbar * (1.0 + p.theta * p.eta / 4.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Measures the six independent commutators (in units of `iħ`) against
/// `(θ, η, diag, diag, 0, 0)`.
pub fn verify_nc_algebra(
    r: &Representation,
    expect_theta: f64,
    expect_eta: f64,
    expect_diag: f64,
    tol: f64,
) -> VerificationReport {
    let hbar = r.params.hbar;
    let table: [(&str, &LinearForm, &LinearForm, f64); 6] = [
        ("[X1,X2]", &r.x1, &r.x2, expect_theta),
        ("[P1,P2]", &r.p1, &r.p2, expect_eta),
        ("[X1,P1]", &r.x1, &r.p1, expect_diag),
        ("[X2,P2]", &r.x2, &r.p2, expect_diag),
        ("[X1,P2]", &r.x1, &r.p2, 0.0),
        ("[X2,P1]", &r.x2, &r.p1, 0.0),
    ];
    let checks: Vec<Check> = table
        .iter()
        .map(|(name, a, b, expected)| Check::within(*name, *expected, commutator(a, b, hbar).scalar, tol))
        .collect();
    let pass = all_pass(&checks);
    VerificationReport { checks, pass }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub checks: Vec<Check>,
    pub max_residual: f64,
    pub pass: bool,
}

impl TransformReport {
    pub fn holds(&self) -> bool {
        self.pass
    }
}

/// Compares the minus branch with the canonically transformed plus branch:
/// `X1⁻ = −√(θ/η)P2⁺`, `X2⁻ = √(θ/η)P1⁺`, `P1⁻ = √(η/θ)X2⁺`,
/// `P2⁻ = −√(η/θ)X1⁺`.
///
/// Only defined for `θ/η > 0`. For two negative parameters the residual is
/// reported as measured; the identities then hold with the opposite overall
/// sign.
pub fn check_branch_transform(p: &NCParams, tol: f64) -> Result<TransformReport> {
    if !(p.theta / p.eta > 0.0) {
        return Err(NcError::Domain(format!(
            "branch transform is only defined for theta/eta > 0 (got theta={}, eta={})",
            p.theta, p.eta
        )));
    }
    let minus = build_branch_rep(p, Branch::Minus, 0)?;
    let plus = build_branch_rep(p, Branch::Plus, 0)?;
    let r = (p.theta / p.eta).sqrt();
    let pairs = [
        ("X1- = -sqrt(theta/eta) P2+", &minus.x1, plus.p2.scaled(-r)),
        ("X2- = sqrt(theta/eta) P1+", &minus.x2, plus.p1.scaled(r)),
        ("P1- = sqrt(eta/theta) X2+", &minus.p1, plus.x2.scaled(1.0 / r)),
        ("P2- = -sqrt(eta/theta) X1+", &minus.p2, plus.x1.scaled(-1.0 / r)),
    ];
    let checks: Vec<Check> = pairs
        .iter()
        .map(|(name, lhs, rhs)| Check::within(*name, 0.0, form_distance(lhs, rhs), tol))
        .collect();
    let max_residual = checks.iter().map(|c| c.measured).fold(0.0, f64::max);
    let pass = all_pass(&checks);
    Ok(TransformReport { checks, max_residual, pass })
}

/// One scale of a commutative-limit sweep. Errors are recorded, not raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub scale: f64,
    pub tol: f64,
    pub minus_distance: Option<f64>,
    pub plus_distance: Option<f64>,
    pub minus_error: Option<String>,
    pub plus_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub points: Vec<LimitPoint>,
    /// Minus-branch distances to the identity strictly decrease.
    pub minus_monotone: bool,
    /// Plus-branch distances to the swap map strictly decrease.
    pub plus_monotone: bool,
    /// Observed convergence order `log(d_k/d_{k+1}) / log(s_k/s_{k+1})`
    /// between the first and last finite points.
    pub minus_order: Option<f64>,
    pub plus_order: Option<f64>,
    /// Every finite distance is within its scheduled tolerance.
    pub within_schedule: bool,
}

/// The `θ, η → 0` limit of the plus branch at fixed `θ/η`:
/// `X1 = −√(θ/η)p2`, `X2 = √(θ/η)p1`, `P1 = √(η/θ)x2`, `P2 = −√(η/θ)x1`.
pub fn plus_limit_map(theta_over_eta: f64, particle: usize) -> Representation {
    let r = theta_over_eta.sqrt();
    let mut rep = Representation::identity(particle, NCParams::new(0.0, 0.0));
    rep.x1 = LinearForm::term(CanonicalVar::p2(particle), -r);
    rep.x2 = LinearForm::term(CanonicalVar::p1(particle), r);
    rep.p1 = LinearForm::term(CanonicalVar::x2(particle), 1.0 / r);
    rep.p2 = LinearForm::term(CanonicalVar::x1(particle), -1.0 / r);
    rep
}

/// Builds both branches at `(sθ₀, sη₀)` for each scale `s` and measures the
/// distance of the minus branch to the identity and of the plus branch to
/// [`plus_limit_map`].
pub fn check_commutative_limit(scales: &[f64], p0: &NCParams, tol_schedule: &[f64]) -> Result<LimitReport> {
    if scales.is_empty() {
        return Err(NcError::Config("scale sequence is empty".into()));
    }
    if tol_schedule.len() != scales.len() {
        return Err(NcError::Config(format!(
            "tolerance schedule has {} entries for {} scales",
            tol_schedule.len(),
            scales.len()
        )));
    }
    if scales.iter().any(|s| !(*s >= 0.0)) || scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(NcError::Config("scales must be non-negative and strictly decreasing".into()));
    }

    let ratio = p0.theta / p0.eta;
    let identity = Representation::identity(0, *p0);
    let swap = (ratio > 0.0).then(|| plus_limit_map(ratio, 0));

    let points: Vec<LimitPoint> = scales
        .iter()
        .zip(tol_schedule)
        .map(|(&s, &tol)| {
            let p = NCParams { theta: s * p0.theta, eta: s * p0.eta, ..*p0 };
            let (minus_distance, minus_error) = match build_branch_rep(&p, Branch::Minus, 0) {
                Ok(rep) => (Some(rep.distance(&identity)), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let (plus_distance, plus_error) = match (&swap, build_branch_rep(&p, Branch::Plus, 0)) {
                (Some(target), Ok(rep)) => (Some(rep.distance(target)), None),
                (None, _) => {
                    (None, Some(NcError::Domain("plus-branch limit needs theta/eta > 0".into()).to_string()))
                }
                (_, Err(e)) => (None, Some(e.to_string())),
            };
            LimitPoint { scale: s, tol, minus_distance, plus_distance, minus_error, plus_error }
        })
        .collect();

    let finite = |pick: fn(&LimitPoint) -> Option<f64>| -> Vec<(f64, f64)> {
        points.iter().filter_map(|pt| pick(pt).map(|d| (pt.scale, d))).collect()
    };
    let minus = finite(|pt| pt.minus_distance);
    let plus = finite(|pt| pt.plus_distance);

    let within_schedule = points.iter().all(|pt| {
        pt.minus_distance.is_none_or(|d| d <= pt.tol) && pt.plus_distance.is_none_or(|d| d <= pt.tol)
    });

    Ok(LimitReport {
        minus_monotone: strictly_decreasing(&minus),
        plus_monotone: strictly_decreasing(&plus),
        minus_order: observed_order(&minus),
        plus_order: observed_order(&plus),
        within_schedule,
        points,
    })
}

fn strictly_decreasing(series: &[(f64, f64)]) -> bool {
    series.len() >= 2 && series.windows(2).all(|w| w[1].1 < w[0].1)
}

fn observed_order(series: &[(f64, f64)]) -> Option<f64> {
    let usable: Vec<&(f64, f64)> = series.iter().filter(|(s, d)| *s > 0.0 && *d > 0.0).collect();
    let (first, last) = (usable.first()?, usable.last()?);
    if first.0 == last.0 {
        return None;
    }
    Some((first.1 / last.1).ln() / (first.0 / last.0).ln())
}

/// `θ = γ/m`, `η = αm` with `ħ = 1`.
pub fn params_from_conditions(c: &MassConditions, mass: f64) -> Result<NCParams> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(NcError::Domain(format!("mass must be positive (got {mass})")));
    }
    if !(c.product() < 1.0) {
        return Err(NcError::Domain(format!(
            "alpha*gamma >= 1 (got {}); theta*eta would leave the real domain",
            c.product()
        )));
    }
    Ok(NCParams { theta: c.gamma / mass, eta: c.alpha * mass, hbar: 1.0, mass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub masses: Vec<f64>,
    pub family: Family,
    pub branch: Option<Branch>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Mass-conditioned parameters for each mass, then [`mass_invariance_for`].
pub fn mass_invariance_report(
    c: &MassConditions,
    masses: &[f64],
    family: Family,
    branch: Option<Branch>,
    tol: f64,
) -> Result<InvarianceReport> {
    let params = masses.iter().map(|&m| params_from_conditions(c, m)).collect::<Result<Vec<_>>>()?;
    mass_invariance_for(&params, family, branch, tol)
}

/// Checks that coordinates are kinematic and momenta mass-proportional
/// across particles of different mass.
///
/// For every coefficient that is nonzero for some mass, the spread
/// (max − min) over masses is measured of
/// * `X_i`: the `x` coefficient and `m ·` the `p` coefficient,
/// * `P_i`: the `p` coefficient and the `x` coefficient `/ m`.
pub fn mass_invariance_for(
    params: &[NCParams],
    family: Family,
    branch: Option<Branch>,
    tol: f64,
) -> Result<InvarianceReport> {
    if params.len() < 2 {
        return Err(NcError::Config("mass invariance needs at least two masses".into()));
    }
    let b = branch.unwrap_or_default();
    let reps = params.iter().map(|p| build_rep(p, family, b, 0)).collect::<Result<Vec<_>>>()?;

    let mut checks = Vec::new();
    for (op, name) in OPERATOR_NAMES.iter().enumerate() {
        let is_coordinate = op < 2;
        for kind in VarKind::ALL {
            let v = CanonicalVar::new(0, kind);
            let raw: Vec<f64> = reps.iter().map(|r| r.forms()[op].coeff(v)).collect();
            if raw.iter().all(|c| *c == 0.0) {
                continue;
            }
            let (label, scaled): (String, Vec<f64>) = match (is_coordinate, kind.is_position()) {
                (true, false) => (
                    format!("{name}.{}*m", kind.as_str()),
                    raw.iter().zip(params).map(|(c, p)| c * p.mass).collect(),
                ),
                (false, true) => (
                    format!("{name}.{}/m", kind.as_str()),
                    raw.iter().zip(params).map(|(c, p)| c / p.mass).collect(),
                ),
                _ => (format!("{name}.{}", kind.as_str()), raw),
            };
            let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            checks.push(Check::within(label, 0.0, hi - lo, tol));
        }
    }
    let pass = all_pass(&checks);
    Ok(InvarianceReport {
        masses: params.iter().map(|p| p.mass).collect(),
        family,
        branch: (family != Family::Simple).then_some(b),
        checks,
        pass,
    })
}

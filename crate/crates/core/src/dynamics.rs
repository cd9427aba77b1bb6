//! Classical evolution under quadratic Hamiltonians written through a
//! representation.
//!
//! `H = (P1² + P2²)/2m + V(X)` with the representation's linear forms
//! substituted is a quadratic polynomial `½zᵀAz + bᵀz + c` in the canonical
//! state `z`. Hamilton's equations `ż = J(Az + b)` are then linear and each
//! step is taken with the exact propagator `exp(G·dt)` of the augmented
//! generator `G = [[JA, Jb], [0, 0]]`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::{CanonicalVar, LinearForm, VarKind};
use crate::error::{NcError, Result};
use crate::representation::{
    build_rep, params_from_conditions, Branch, Family, MassConditions, NCParams, Representation,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HamiltonianKind {
    Free,
    /// `V = m g X2`.
    UniformGravity {
        g: f64,
    },
    /// `V = ½ m ω² (X1² + X2²)`.
    Harmonic {
        omega: f64,
    },
}

/// `H(z) = ½zᵀAz + bᵀz + c` over `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    pub kind: HamiltonianKind,
    pub mass: f64,
    pub basis: Vec<CanonicalVar>,
    pub quadratic: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
    /// `(X1, X2, P1, P2)` sampled along trajectories.
    pub observables: [LinearForm; 4],
}

impl QuadraticHamiltonian {
    fn empty(kind: HamiltonianKind, rep: &Representation) -> Self {
        let mut basis: Vec<CanonicalVar> =
            rep.support.iter().flat_map(|&id| VarKind::ALL.map(|k| CanonicalVar::new(id, k))).collect();
        basis.sort_unstable();
        let d = basis.len();
        QuadraticHamiltonian {
            kind,
            mass: rep.params.mass,
            basis,
            quadratic: DMatrix::zeros(d, d),
            linear: DVector::zeros(d),
            constant: 0.0,
            observables: [rep.x1.clone(), rep.x2.clone(), rep.p1.clone(), rep.p2.clone()],
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coefficient vector of a form over the basis.
    pub fn coefficients(&self, form: &LinearForm) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.basis.iter().map(|v| form.coeff(*v)))
    }

    /// `H += weight · f · g`.
    fn add_product(&mut self, f: &LinearForm, g: &LinearForm, weight: f64) {
        let u = self.coefficients(f);
        let v = self.coefficients(g);
        // ½zᵀAz = zᵀuvᵀz  =>  A += uvᵀ + vuᵀ
        self.quadratic += (&u * v.transpose() + &v * u.transpose()) * weight;
        self.linear += (&u * g.constant() + &v * f.constant()) * weight;
        self.constant += weight * f.constant() * g.constant();
    }

    fn add_linear(&mut self, f: &LinearForm, weight: f64) {
        self.linear += self.coefficients(f) * weight;
        self.constant += weight * f.constant();
    }

    pub fn energy(&self, z: &DVector<f64>) -> f64 {
        0.5 * z.dot(&(&self.quadratic * z)) + self.linear.dot(z) + self.constant
    }

    /// Symplectic matrix `J_uv = {z_u, z_v}`.
    pub fn poisson_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.basis[i].pairing(self.basis[j]))
    }

    /// Augmented generator `[[JA, Jb], [0, 0]]` of `ż = J(Az + b)`.
    pub fn generator(&self) -> DMatrix<f64> {
        let d = self.dim();
        let j = self.poisson_matrix();
        let ja = &j * &self.quadratic;
        let jb = &j * &self.linear;
        let mut g = DMatrix::zeros(d + 1, d + 1);
        g.view_mut((0, 0), (d, d)).copy_from(&ja);
        g.view_mut((0, d), (d, 1)).copy_from(&jb);
        g
    }

    /// Exact propagator for a step of length `dt`.
    pub fn propagator(&self, dt: f64) -> DMatrix<f64> {
        (self.generator() * dt).exp()
    }

    pub fn observe(&self, z: &DVector<f64>) -> [f64; 4] {
        let lookup = |v: CanonicalVar| self.basis.iter().position(|b| *b == v).map_or(0.0, |i| z[i]);
        [
            self.observables[0].evaluate(lookup),
            self.observables[1].evaluate(lookup),
            self.observables[2].evaluate(lookup),
            self.observables[3].evaluate(lookup),
        ]
    }

    /// Time derivative `{f, H}` of a linear observable, as an affine map of
    /// the state: returns `(row, offset)` with `ḟ = row·z + offset`.
    pub fn velocity_map(&self, f: &LinearForm) -> (DVector<f64>, f64) {
        let u = self.coefficients(f);
        let uj = self.poisson_matrix().transpose() * &u;
        let row = self.quadratic.transpose() * &uj;
        (row, uj.dot(&self.linear))
    }
}

/// Substitutes the representation into `(P1² + P2²)/2m + V(X)`.
pub fn build_hamiltonian(kind: HamiltonianKind, rep: &Representation) -> QuadraticHamiltonian {
    let mut h = QuadraticHamiltonian::empty(kind, rep);
    let m = rep.params.mass;
    h.add_product(&rep.p1, &rep.p1, 0.5 / m);
    h.add_product(&rep.p2, &rep.p2, 0.5 / m);
    match kind {
        HamiltonianKind::Free => {}
        HamiltonianKind::UniformGravity { g } => h.add_linear(&rep.x2, m * g),
        HamiltonianKind::Harmonic { omega } => {
            let k = 0.5 * m * omega * omega;
            h.add_product(&rep.x1, &rep.x1, k);
            h.add_product(&rep.x2, &rep.x2, k);
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub basis: Vec<CanonicalVar>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `(X1, X2, P1, P2)` at each time.
    pub observables: Vec<[f64; 4]>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|H(t) − H(0)|`, relative to `|H(0)|` when that is nonzero.
    pub fn max_energy_drift(&self, h: &QuadraticHamiltonian) -> f64 {
        let energies: Vec<f64> =
            self.states.iter().map(|s| h.energy(&DVector::from_column_slice(s))).collect();
        let e0 = energies[0];
        let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
        energies.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max)
    }
}

/// Integrates from `initial` (ordered as `h.basis`) to `t_end` in steps of
/// `dt`; a shorter final step lands exactly on `t_end`.
pub fn evolve(h: &QuadraticHamiltonian, initial: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(NcError::Step(format!("dt must be positive (got {dt})")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(NcError::Step(format!("t_end must be non-negative (got {t_end})")));
    }
    let d = h.dim();
    if initial.len() != d {
        return Err(NcError::Config(format!("initial state has {} entries, expected {d}", initial.len())));
    }

    let full_steps = (t_end / dt * (1.0 + 1e-12)).floor() as usize;
    let remainder = t_end - full_steps as f64 * dt;
    let step = h.propagator(dt);

    let mut times = Vec::with_capacity(full_steps + 2);
    let mut states = Vec::with_capacity(full_steps + 2);
    let mut observables = Vec::with_capacity(full_steps + 2);
    let mut z = DVector::from_iterator(d + 1, initial.iter().copied().chain(std::iter::once(1.0)));

    let mut record = |t: f64, z: &DVector<f64>| {
        let state = DVector::from_column_slice(&z.as_slice()[..d]);
        observables.push(h.observe(&state));
        states.push(state.as_slice().to_vec());
        times.push(t);
    };
    record(0.0, &z);
    for k in 1..=full_steps {
        z = &step * z;
        record(k as f64 * dt, &z);
    }
    if remainder > 1e-9 * dt {
        z = h.propagator(remainder) * z;
        record(t_end, &z);
    }
    Ok(Trajectory { basis: h.basis.clone(), times, states, observables })
}

/// Canonical state whose `(X1, X2, Ẋ1, Ẋ2)` take the given values.
pub fn canonical_from_nc(h: &QuadraticHamiltonian, nc: [f64; 4]) -> Result<Vec<f64>> {
    if h.dim() != 4 {
        return Err(NcError::Config(
            "initial data in observables needs a single-particle Hamiltonian".into(),
        ));
    }
    let (vx1, cx1) = h.velocity_map(&h.observables[0]);
    let (vx2, cx2) = h.velocity_map(&h.observables[1]);
    let rows = [h.coefficients(&h.observables[0]), h.coefficients(&h.observables[1]), vx1, vx2];
    let offsets = [h.observables[0].constant(), h.observables[1].constant(), cx1, cx2];

    let map = DMatrix::from_fn(4, 4, |i, j| rows[i][j]);
    let row_scale: f64 = rows.iter().map(|r| r.norm()).product();
    let det = map.determinant();
    if row_scale == 0.0 || !(det.abs() > 1e-12 * row_scale) {
        return Err(singular(det));
    }
    let rhs = DVector::from_iterator(4, nc.iter().zip(offsets).map(|(v, c)| v - c));
    map.lu().solve(&rhs).map(|z| z.as_slice().to_vec()).ok_or_else(|| singular(det))
}

fn singular(det: f64) -> NcError {
    NcError::SingularMap(format!("(X, dX/dt) -> canonical state map is not invertible (determinant {det:e})"))
}

/// Where each mass gets its noncommutativity parameters from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ParamSource {
    /// `θ = γ/m`, `η = αm`.
    Conditions(MassConditions),
    /// The same `(θ, η)` for every mass.
    Fixed { theta: f64, eta: f64 },
}

impl ParamSource {
    pub fn params_for(&self, mass: f64) -> Result<NCParams> {
        match *self {
            ParamSource::Conditions(c) => params_from_conditions(&c, mass),
            ParamSource::Fixed { theta, eta } => {
                let p = NCParams::new(theta, eta).with_mass(mass);
                p.validate()?;
                Ok(p)
            }
        }
    }
}

/// Two bodies released from identical noncommutative initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WepScenario {
    pub source: ParamSource,
    pub masses: (f64, f64),
    pub family: Family,
    pub branch: Branch,
    pub kind: HamiltonianKind,
    /// `(X1, X2, Ẋ1, Ẋ2)` at `t = 0`.
    pub initial_nc: [f64; 4],
    pub t_end: f64,
    pub dt: f64,
}

impl WepScenario {
    /// Uniform gravity `g = 1`, `t_end = 10`, `dt = 0.01`, masses 1 and 2,
    /// released at the origin with `Ẋ = (1, 0.5)`.
    pub fn gravity(source: ParamSource, family: Family) -> Self {
        WepScenario {
            source,
            masses: (1.0, 2.0),
            family,
            branch: Branch::Minus,
            kind: HamiltonianKind::UniformGravity { g: 1.0 },
            initial_nc: [0.0, 0.0, 1.0, 0.5],
            t_end: 10.0,
            dt: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WepOutcome {
    /// Largest distance between the two `(X1, X2)` curves.
    pub deviation_max: f64,
    pub conditions_used: bool,
    pub masses: (f64, f64),
    pub params: (NCParams, NCParams),
    /// Largest relative energy drift over both runs.
    pub energy_drift: f64,
}

/// Runs one mass of a scenario; returns the Hamiltonian and trajectory.
pub fn run_body(s: &WepScenario, mass: f64) -> Result<(QuadraticHamiltonian, Trajectory)> {
    let params = s.source.params_for(mass)?;
    let rep = build_rep(&params, s.family, s.branch, 0)?;
    let h = build_hamiltonian(s.kind, &rep);
    let z0 = canonical_from_nc(&h, s.initial_nc)?;
    let traj = evolve(&h, &z0, s.t_end, s.dt)?;
    Ok((h, traj))
}

/// Maximum separation of the noncommutative coordinates of the two bodies.
pub fn wep_deviation(s: &WepScenario) -> Result<WepOutcome> {
    let (h1, t1) = run_body(s, s.masses.0)?;
    let (h2, t2) = run_body(s, s.masses.1)?;
    let deviation_max = t1
        .observables
        .iter()
        .zip(&t2.observables)
        .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
        .fold(0.0, f64::max);
    Ok(WepOutcome {
        deviation_max,
        conditions_used: matches!(s.source, ParamSource::Conditions(_)),
        masses: s.masses,
        params: (s.source.params_for(s.masses.0)?, s.source.params_for(s.masses.1)?),
        energy_drift: t1.max_energy_drift(&h1).max(t2.max_energy_drift(&h2)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::build_simple_rep;
    use std::f64::consts::PI;

    fn identity(mass: f64) -> Representation {
        Representation::identity(0, NCParams::new(0.0, 0.0).with_mass(mass))
    }

    #[test]
    fn free_hamiltonian_matrix() {
        let h = build_hamiltonian(HamiltonianKind::Free, &identity(1.0));
        // basis order x1, x2, p1, p2
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 0.0, 1.0, 1.0]));
        assert_eq!(h.quadratic, expected);
        assert_eq!(h.linear, DVector::zeros(4));
    }

    #[test]
    fn gravity_hamiltonian_terms() {
        let h = build_hamiltonian(HamiltonianKind::UniformGravity { g: 9.0 }, &identity(2.0));
        assert_eq!(h.quadratic[(2, 2)], 0.5);
        assert_eq!(h.linear[1], 18.0);

        let p = NCParams::new(0.3, 0.2).with_mass(2.0);
        let h = build_hamiltonian(HamiltonianKind::UniformGravity { g: 9.0 }, &build_simple_rep(&p, 0));
        // m g (x2 + ½θ p1)
        assert_eq!(h.linear[1], 18.0);
        assert!((h.linear[2] - 18.0 * 0.15).abs() < 1e-15);
    }

    #[test]
    fn free_motion_is_uniform() {
        let h = build_hamiltonian(HamiltonianKind::Free, &identity(1.0));
        let traj = evolve(&h, &[0.5, 0.0, 1.0, 0.0], 2.0, 0.25).unwrap();
        assert_eq!(traj.len(), 9);
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s[0] - (0.5 + t)).abs() < 1e-14);
        }
    }

    #[test]
    fn oscillator_period() {
        let h = build_hamiltonian(HamiltonianKind::Harmonic { omega: 1.0 }, &identity(1.0));
        let z0 = [1.0, -0.5, 0.25, 2.0];
        let traj = evolve(&h, &z0, 2.0 * PI, 2.0 * PI / 1000.0).unwrap();
        let last = traj.states.last().unwrap();
        for (a, b) in last.iter().zip(z0) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn partial_final_step_hits_t_end() {
        let h = build_hamiltonian(HamiltonianKind::Free, &identity(1.0));
        let traj = evolve(&h, &[0.0, 0.0, 1.0, 0.0], 1.05, 0.1).unwrap();
        assert_eq!(*traj.times.last().unwrap(), 1.05);
        assert!((traj.states.last().unwrap()[0] - 1.05).abs() < 1e-14);
    }

    #[test]
    fn step_errors() {
        let h = build_hamiltonian(HamiltonianKind::Free, &identity(1.0));
        assert!(matches!(evolve(&h, &[0.0; 4], 1.0, 0.0), Err(NcError::Step(_))));
        assert!(matches!(evolve(&h, &[0.0; 4], 1.0, -0.1), Err(NcError::Step(_))));
        assert!(matches!(evolve(&h, &[0.0; 4], -1.0, 0.1), Err(NcError::Step(_))));
        assert!(matches!(evolve(&h, &[0.0; 3], 1.0, 0.1), Err(NcError::Config(_))));
    }

    #[test]
    fn initial_data_round_trips() {
        let p = NCParams::new(0.05, 0.02).with_mass(3.0);
        let rep = build_rep(&p, Family::Branch, Branch::Minus, 0).unwrap();
        let h = build_hamiltonian(HamiltonianKind::UniformGravity { g: 1.0 }, &rep);
        let target = [0.3, -0.2, 1.0, 0.5];
        let z = canonical_from_nc(&h, target).unwrap();
        let zv = DVector::from_vec(z);
        let obs = h.observe(&zv);
        assert!((obs[0] - 0.3).abs() < 1e-14 && (obs[1] + 0.2).abs() < 1e-14);
        let (row, c) = h.velocity_map(&h.observables[0]);
        assert!((row.dot(&zv) + c - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_initial_map() {
        // simple family with θη = -4 collapses the X-P pairing
        let p = NCParams::new(2.0, -2.0);
        let rep = build_simple_rep(&p, 0);
        let h = build_hamiltonian(HamiltonianKind::Free, &rep);
        assert!(matches!(canonical_from_nc(&h, [0.0, 0.0, 1.0, 0.0]), Err(NcError::SingularMap(_))));
    }

    #[test]
    fn equal_masses_do_not_deviate() {
        let mut s = WepScenario::gravity(ParamSource::Fixed { theta: 0.01, eta: 0.01 }, Family::Branch);
        s.masses = (1.5, 1.5);
        assert_eq!(wep_deviation(&s).unwrap().deviation_max, 0.0);
    }
}

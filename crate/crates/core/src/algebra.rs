//! Linear forms over canonical variables and their commutator.
//!
//! Every operator in the engine is affine in the canonical variables
//! `x1, x2, p1, p2` of one or more particles. The commutator of two such
//! operators is therefore a c-number: `[A, B] = iħ c` with `c` given by the
//! symplectic pairing of their coefficient vectors.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Component of a canonical pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    X1,
    X2,
    P1,
    P2,
}

impl VarKind {
    pub const ALL: [VarKind; 4] = [VarKind::X1, VarKind::X2, VarKind::P1, VarKind::P2];

    pub fn is_position(self) -> bool {
        matches!(self, VarKind::X1 | VarKind::X2)
    }

    /// The canonically conjugate component (`x_i <-> p_i`).
    pub fn conjugate(self) -> VarKind {
        match self {
            VarKind::X1 => VarKind::P1,
            VarKind::X2 => VarKind::P2,
            VarKind::P1 => VarKind::X1,
            VarKind::P2 => VarKind::X2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::X1 => "x1",
            VarKind::X2 => "x2",
            VarKind::P1 => "p1",
            VarKind::P2 => "p2",
        }
    }
}

/// One canonical variable of one particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalVar {
    pub particle: usize,
    pub kind: VarKind,
}

impl CanonicalVar {
    pub fn new(particle: usize, kind: VarKind) -> Self {
        CanonicalVar { particle, kind }
    }

    pub fn x1(particle: usize) -> Self {
        Self::new(particle, VarKind::X1)
    }

    pub fn x2(particle: usize) -> Self {
        Self::new(particle, VarKind::X2)
    }

    pub fn p1(particle: usize) -> Self {
        Self::new(particle, VarKind::P1)
    }

    pub fn p2(particle: usize) -> Self {
        Self::new(particle, VarKind::P2)
    }

    pub fn conjugate(self) -> Self {
        Self::new(self.particle, self.kind.conjugate())
    }

    /// Symplectic pairing: `+1` for `(x_i, p_i)` of the same particle, `-1`
    /// for `(p_i, x_i)`, zero otherwise.
    pub fn pairing(self, other: CanonicalVar) -> f64 {
        if self.particle != other.particle || self.kind.conjugate() != other.kind {
            0.0
        } else if self.kind.is_position() {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for CanonicalVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind.as_str(), self.particle)
    }
}

/// `constant + Σ coefficient·variable`, kept in canonical sparse form: a
/// coefficient that becomes exactly zero is removed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    #[serde(with = "term_list")]
    terms: BTreeMap<CanonicalVar, f64>,
    constant: f64,
}

/// Terms travel as `[{var, coeff}]`, since JSON object keys must be strings.
mod term_list {
    use super::CanonicalVar;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    #[derive(Serialize, Deserialize)]
    struct Term {
        var: CanonicalVar,
        coeff: f64,
    }

    pub fn serialize<S: Serializer>(terms: &BTreeMap<CanonicalVar, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(terms.iter().map(|(&var, &coeff)| Term { var, coeff }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<CanonicalVar, f64>, D::Error> {
        let list = Vec::<Term>::deserialize(d)?;
        Ok(list.into_iter().filter(|t| t.coeff != 0.0).map(|t| (t.var, t.coeff)).collect())
    }
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant_form(value: f64) -> Self {
        LinearForm { terms: BTreeMap::new(), constant: value }
    }

    pub fn var(v: CanonicalVar) -> Self {
        Self::term(v, 1.0)
    }

    pub fn term(v: CanonicalVar, coefficient: f64) -> Self {
        let mut form = Self::zero();
        form.add_term(v, coefficient);
        form
    }

    pub fn from_terms<I>(terms: I, constant: f64) -> Self
    where
        I: IntoIterator<Item = (CanonicalVar, f64)>,
    {
        let mut form = Self::constant_form(constant);
        for (v, c) in terms {
            form.add_term(v, c);
        }
        form
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Coefficient of `v`; zero when absent.
    pub fn coeff(&self, v: CanonicalVar) -> f64 {
        self.terms.get(&v).copied().unwrap_or(0.0)
    }

    /// Nonzero terms in variable order.
    pub fn terms(&self) -> impl Iterator<Item = (CanonicalVar, f64)> + '_ {
        self.terms.iter().map(|(v, c)| (*v, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Particles whose variables appear in the form.
    pub fn particles(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.terms.keys().map(|v| v.particle).collect();
        ids.dedup();
        ids
    }

    pub fn add_term(&mut self, v: CanonicalVar, coefficient: f64) {
        let entry = self.terms.entry(v).or_insert(0.0);
        *entry += coefficient;
        if *entry == 0.0 {
            self.terms.remove(&v);
        }
    }

    /// `self += factor·other`.
    pub fn add_scaled(&mut self, other: &LinearForm, factor: f64) {
        for (v, c) in other.terms() {
            self.add_term(v, factor * c);
        }
        self.constant += factor * other.constant;
    }

    pub fn scaled(&self, factor: f64) -> LinearForm {
        let mut out = LinearForm::constant_form(factor * self.constant);
        for (v, c) in self.terms() {
            out.add_term(v, factor * c);
        }
        out
    }

    /// Replaces every variable by a form.
    pub fn substitute<F>(&self, mut image: F) -> LinearForm
    where
        F: FnMut(CanonicalVar) -> LinearForm,
    {
        let mut out = LinearForm::constant_form(self.constant);
        for (v, c) in self.terms() {
            out.add_scaled(&image(v), c);
        }
        out
    }

    /// Value at a point of phase space given as a lookup.
    pub fn evaluate<F>(&self, mut value: F) -> f64
    where
        F: FnMut(CanonicalVar) -> f64,
    {
        self.terms().fold(self.constant, |acc, (v, c)| acc + c * value(v))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if self.constant != 0.0 || self.terms.is_empty() {
            write!(f, "{}", self.constant)?;
            first = false;
        }
        for (v, c) in self.terms() {
            if first {
                write!(f, "{c}·{v}")?;
                first = false;
            } else if c < 0.0 {
                write!(f, " - {}·{v}", -c)?;
            } else {
                write!(f, " + {c}·{v}")?;
            }
        }
        Ok(())
    }
}

impl Add<&LinearForm> for &LinearForm {
    type Output = LinearForm;

    fn add(self, rhs: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl Add for LinearForm {
    type Output = LinearForm;

    fn add(mut self, rhs: LinearForm) -> LinearForm {
        self.add_scaled(&rhs, 1.0);
        self
    }
}

impl Sub<&LinearForm> for &LinearForm {
    type Output = LinearForm;

    fn sub(self, rhs: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;

    fn sub(mut self, rhs: LinearForm) -> LinearForm {
        self.add_scaled(&rhs, -1.0);
        self
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;

    fn neg(self) -> LinearForm {
        self.scaled(-1.0)
    }
}

impl Mul<&LinearForm> for f64 {
    type Output = LinearForm;

    fn mul(self, rhs: &LinearForm) -> LinearForm {
        rhs.scaled(self)
    }
}

impl Mul<LinearForm> for f64 {
    type Output = LinearForm;

    fn mul(self, rhs: LinearForm) -> LinearForm {
        rhs.scaled(self)
    }
}

/// `[A, B] = iħ·scalar`.
///
/// The result is a number, not a form, so nested commutators do not
/// type-check:
///
/// ```compile_fail
/// use ncps_core::{commutator, CanonicalVar, LinearForm};
/// let a = LinearForm::var(CanonicalVar::x1(0));
/// let b = LinearForm::var(CanonicalVar::p1(0));
/// let inner = commutator(&a, &b, 1.0);
/// let _ = commutator(&a, &inner, 1.0);
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorResult {
    pub scalar: f64,
    pub hbar: f64,
}

impl CommutatorResult {
    /// Coefficient of `i` in the commutator, `ħ·scalar`.
    pub fn value(&self) -> f64 {
        self.hbar * self.scalar
    }

    /// The commutator as a constant operator (central in the algebra).
    pub fn as_form(&self) -> LinearForm {
        LinearForm::constant_form(self.value())
    }
}

/// Commutator of two linear forms in units of `iħ`.
///
/// Evaluated as `Σ_u a(u)·b(ū) − a(ū)·b(u)` over the position variables `u`
/// present in either form (`ū` the conjugate momentum), always in the same
/// variable order, so swapping the arguments negates the result exactly.
pub fn commutator(a: &LinearForm, b: &LinearForm, hbar: f64) -> CommutatorResult {
    debug_assert!(hbar > 0.0, "hbar must be positive");
    let mut positions: Vec<CanonicalVar> = a
        .terms
        .keys()
        .chain(b.terms.keys())
        .map(|v| if v.kind.is_position() { *v } else { v.conjugate() })
        .collect();
    positions.sort_unstable();
    positions.dedup();

    let scalar = positions.iter().fold(0.0, |acc, &u| {
        let ubar = u.conjugate();
        acc + (a.coeff(u) * b.coeff(ubar) - a.coeff(ubar) * b.coeff(u))
    });
    CommutatorResult { scalar, hbar }
}

/// Largest absolute difference between constants or matching coefficients.
pub fn form_distance(a: &LinearForm, b: &LinearForm) -> f64 {
    let mut worst = (a.constant - b.constant).abs();
    for (v, c) in a.terms() {
        worst = worst.max((c - b.coeff(v)).abs());
    }
    for (v, c) in b.terms() {
        if !a.terms.contains_key(&v) {
            worst = worst.max(c.abs());
        }
    }
    worst
}

/// Coefficient-wise equality at absolute tolerance `tol`.
pub fn form_equal(a: &LinearForm, b: &LinearForm, tol: f64) -> bool {
    form_distance(a, b) <= tol
}

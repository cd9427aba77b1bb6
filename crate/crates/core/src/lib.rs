//! Phase-space operators as linear forms over canonical variables.
//!
//! The crate builds realizations of the four-dimensional noncommutative
//! phase-space algebra
//!
//! ```text
//! [X1, X2] = iħθ,   [P1, P2] = iħη,   [Xi, Pj] = iħδij
//! ```
//!
//! out of ordinary canonical pairs `x_i, p_i`, checks them, and studies how
//! they behave when the noncommutativity parameters are tied to the particle
//! mass (`θ·m = γ`, `η/m = α`).
//!
//! * [`algebra`]: sparse linear forms and the commutator induced by the
//!   canonical pairing.
//! * [`representation`]: single-particle representations, parameter maps and
//!   verification reports.
//! * [`composite`]: center-of-mass variables of multi-particle systems.
//! * [`dynamics`]: exact-step evolution under quadratic Hamiltonians and the
//!   weak-equivalence check.
//! * [`sweep`]: seeded random batches, run on rayon when the `parallel`
//!   feature is on and sequentially otherwise.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod composite;
pub mod dynamics;
mod error;
mod numeric;
pub mod par;
pub mod report;
pub mod representation;
pub mod sweep;

pub use algebra::{
    commutator, form_distance, form_equal, CanonicalVar, CommutatorResult, LinearForm, VarKind,
};
pub use error::{NcError, Result};
pub use report::Check;
pub use representation::{Branch, Family, MassConditions, NCParams, Representation};

/// Default verification tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

//! Exact tools for the level-(n−1) Lasserre relaxation of 0/1 programs.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: subsets of `{1..n}` as bitmasks, canonical enumeration and
//!   the zeta/Möbius transforms between moment and corner coordinates.
//! - [`moment`]: moment matrices, the shift operator, objective evaluation,
//!   the congruent corner forms and the level-`t` feasibility check.
//! - [`speig`]: PSD decisions and spectra of diagonal-plus-rank-one matrices,
//!   plus a dense symmetric eigensolver used as an independent oracle.
//! - [`certify`]: exact certification of level-(n−1) integrality gaps,
//!   single-vertex-cutting constraints and degree/no-gap prechecks.
//! - [`instances`]: generators for the knapsack, empty-hull and indicator
//!   families together with their closed-form certificates.
//!
//! Certification always runs on [`Rational`] values; `f64` is accepted
//! wherever a float route is meaningful (dense eigenvalues, benchmarks).

pub mod certify;
pub mod error;
pub mod instances;
pub mod lattice;
pub mod moment;
pub mod scalar;
pub mod speig;

pub use error::{Error, Result};
pub use lattice::{LatticeVector, Repr, SubsetIndex};
pub use moment::{Instance, LinearForm, MultilinearPoly};
pub use scalar::{Rational, Scalar, ScalarMode};

//! Exact computer algebra for the differential calculus of jets:
//! polynomial rings over the rationals with jet indeterminates, the
//! polynomial reparametrization action on k-jets and its invariants,
//! classical and generalized Wronskians with their Schur-determinant
//! and hook-count identities, bracket-generated invariant towers, and
//! monic linear differential operators built from solution tuples.
//!
//! Everything is exact: coefficients are `BigRational`, identities are
//! verified structurally, and checks that can fail return witnesses.

pub mod brackets;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod ode;
pub mod poly;
pub mod series;
pub mod verify;
pub mod wronskian;

pub use error::Error;
pub use poly::{DiffPoly, Monomial, VarSym, Q};
pub use series::{Prec, TruncSeries};

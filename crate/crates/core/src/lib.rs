//! Greedy subspace selection in finite-dimensional normed spaces.
//!
//! The crate computes the greedy error sequence σₙ(K) of a compact set K in a
//! normed space ℝ^m, together with the quantities it is compared against:
//! Kolmogorov and Gelfand widths, Grothendieck numbers, absolutely 2-summing
//! norm bounds and John-ellipsoid bounds on Banach–Mazur distances. The
//! [`verify`] module checks the comparison inequalities on concrete instances
//! and records how every constant was obtained.
//!
//! Compact sets are always finite surrogates. For an operator ball the domain
//! sphere is discretized; the greedy sequence computed is that of the finite
//! sample, which is itself a compact subset of the continuum set.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
#![forbid(unsafe_code)]
// The float methods are inherent whenever std is anywhere in the crate graph,
// which makes the `num_traits::Float` imports look unused in those builds.
#![allow(unused_imports)]
// Negated comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod geometry;
pub mod greedy;
pub mod grothendieck;
pub mod linalg;
mod lp;
pub mod sampling;
pub mod spaces;
pub mod subspaces;
pub mod verify;
pub mod widths;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use spaces::{CompactSet, DualExponent, LpExponent, Norm, NormedSpace, OperatorBall};

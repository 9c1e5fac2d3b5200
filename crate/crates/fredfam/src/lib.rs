//! Numerical index theory for continuous families of Fredholm operators.
//!
//! The toolkit works with concrete bounded operators on the square-summable
//! sequence space — Toeplitz operators with Laurent-polynomial symbols and
//! diagonal operators with periodic tails, each plus a finite-rank part —
//! assigned continuously to the points of a finite graph. On top of that it
//! computes:
//!
//! - pointwise Fredholm indices via winding numbers, cross-checked by an
//!   independent SVD finite-section oracle ([`fredholm`]);
//! - the index vector of a family (one integer per connected component of
//!   the parameter graph), with compact-perturbation invariance, additivity
//!   under composition, homotopy invariance and local constancy ([`family`]);
//! - polynomial functional calculus: spectral mapping for the Fredholm
//!   spectrum and the root-counting formula for ind f(T) ([`calc`]);
//! - Weyl spectra on complex-plane grids, Kuratowski set limits, upper
//!   semicontinuity and the limit theorems for commuting, normal and
//!   totally disconnected scenarios ([`weyl`]).

pub mod calc;
pub mod error;
pub mod family;
pub mod fredholm;
pub mod op_model;
pub mod param_space;
pub mod tolerances;
pub mod weyl;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

//! Puiseux series developments for positive-dimensional solution sets of
//! sparse polynomial systems, driven by the Newton polytopes.
//!
//! The pipeline: compute the cones of the tropical prevariety whose vectors
//! are perpendicular to at least one edge of every Newton polytope
//! (pretropisms), change coordinates with a unimodular transform built from
//! such a cone, solve the initial form system exactly for the leading
//! coefficients, and grow series terms from there. Monomial parametrizations
//! coming out of the process can be verified against the original system and
//! measured by their projective degree.

pub mod binomial;
pub mod coeff;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod polytope;
pub mod puiseux;
pub mod solver;
pub mod surface;
pub mod systems;

pub use error::{Error, Result};

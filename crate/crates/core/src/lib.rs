//! Generalized binomial states of a single field mode and their exact
//! correspondence with coherent atomic states.
//!
//! The crate is organised bottom-up:
//!
//! - [`hilbert`]: dense complex states and operators, matrix exponential.
//! - [`gbs`]: N-photon generalized binomial states, overlaps, parameter maps.
//! - [`hp_algebra`]: Holstein-Primakoff pseudo-spin operators and rotations.
//! - [`delta_basis`]: orthonormal basis of rotated-ladder eigenstates.
//! - [`resolution`]: resolution of identity and state expansion over the sphere.
//! - [`squeezing`]: quadrature variances and closed-form squeezing indexes.
//! - [`cas`]: collective spins, Dicke states and coherent atomic states.
//! - [`verify`]: seeded invariant suites used by the command-line `verify`.

pub mod cas;
pub mod delta_basis;
mod error;
pub mod gbs;
pub mod hilbert;
pub mod hp_algebra;
pub mod numeric;
pub mod resolution;
pub mod squeezing;
pub mod verify;

mod compensated;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Default absolute tolerance for numerical comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

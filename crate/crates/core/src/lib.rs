//! Numerical Riemann theta functions on restricted domains of `C^g x H_g`.
//!
//! The crate is organised bottom-up:
//!
//! * [`sym_core`] symmetric matrices, positive definiteness, the Siegel half-space.
//! * [`symplectic`] exact symplectic matrices, their action on `H_g`, the
//!   subgroups `G_D`, `G_D(D)_0` and `Gamma_g(k)`.
//! * [`reduction`] Minkowski reduction and reduction to the Siegel fundamental set.
//! * [`cones_tubes`] integral polyhedral cones, tube domains and the sets the
//!   theta series are bounded on.
//! * [`theta_engine`] evaluation of `theta(z, tau)` and `theta[a;b](z, tau)`.
//! * [`abelian_embed`] lattices, coset representatives and the projective maps
//!   built from theta functions with characteristics.

pub mod abelian_embed;
pub mod cones_tubes;
mod error;
pub mod rational;
pub mod reduction;
pub mod sampling;
pub mod sym_core;
pub mod symplectic;
pub mod theta_engine;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default tolerance for the Cholesky pivot test.
pub const DEFAULT_PD_TOL: f64 = 1e-12;
/// Default tolerance for floating matrix identities.
pub const DEFAULT_MATRIX_TOL: f64 = 1e-10;
/// Default target accuracy of theta evaluations.
pub const DEFAULT_EPS: f64 = 1e-10;
/// Default threshold below which a coordinate counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

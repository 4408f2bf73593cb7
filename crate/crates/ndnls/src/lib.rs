//! Inverse scattering solver for the nonlocal derivative nonlinear Schrodinger
//! equation `u_t = i u_xx + i (u^2 conj(u(-x)))_x`.
//!
//! The pipeline maps an initial potential to scattering data, evolves the
//! reflection coefficients exactly in time, solves the coupled Cauchy
//! projection boundary system at every reconstruction point and unwinds the
//! nonlocal phase to recover `u(x, t)`. A pseudo-spectral integrator of the
//! same equation serves as an independent oracle.

pub mod cauchy;
pub mod direct_scattering;
pub mod error;
pub mod evolution;
pub mod fourier;
pub mod model;
pub mod pde_oracle;
pub mod pipeline;
pub mod reconstruction;
pub mod rh_solver;

pub use error::{Error, Result};
pub use model::C64;

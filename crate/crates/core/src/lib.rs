//! Gaussian covariance dynamics and entanglement diagnostics for two
//! oscillators with arbitrary quadratic potentials coupled by Newtonian
//! gravity.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] builds the drift and diffusion matrices of the linear
//!   Langevin system and the initial covariance.
//! * [`propagator`] evolves covariances exactly with matrix exponentials,
//!   with an ODE integrator kept as an independent oracle.
//! * [`entanglement`] computes partial transposes, symplectic eigenvalues
//!   and the logarithmic negativity.
//! * [`analytic`] holds the first-order closed forms and entanglement-time
//!   solvers.
//! * [`decoherence`] and [`design`] are SI calculators for gas collisions,
//!   photon shot noise and the levitated-mirror geometry.
//!
//! Phase-space variables are always ordered `(X1, P1, X2, P2)` and time is
//! the dimensionless `tau = omega * t` unless a function says otherwise.

pub mod analytic;
pub mod constants;
pub mod decoherence;
pub mod design;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod units;

pub use constants::Constants;
pub use error::{Error, Result};
pub use model::{CovarianceState, PhysicalParams, SystemParams};
pub use nalgebra::{Matrix2, Matrix4, Vector4};

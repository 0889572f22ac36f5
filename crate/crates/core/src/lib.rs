//! Pseudo-spectral solver for viscous, heat-conducting quantum
//! hydrodynamics on periodic boxes, with energy-method diagnostics and a
//! vanishing-Planck-constant experiment harness.
//!
//! The unknowns are perturbations `(rho, u, theta)` of density, velocity
//! and temperature around the constant state `(1, 0, 1)`. Spatial
//! derivatives are spectral (exact for band-limited fields), time stepping
//! is classic fourth-order Runge-Kutta under explicit stability bounds, and
//! the quadratic nonlinearities are controlled with 2/3-rule dealiasing.
//!
//! The core is generic over the scalar type; the `*64` aliases below fix
//! `f64`, which every shipped experiment uses.

// `!(x > 0)` guards reject NaN along with nonpositive values; the
// rewrite clippy suggests (`x <= 0`) would let NaN through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod integrate;
pub mod limit;
pub mod mms;
pub mod scalar;
pub mod snapshot;
pub mod spectral;
pub mod state;

pub use error::{QhdError, Result};
pub use scalar::Scalar;

/// Double-precision aliases for the common entry points.
pub type Grid64 = grid::Grid<f64>;
pub type ScalarField64 = field::ScalarField<f64>;
pub type VectorField64 = field::VectorField<f64>;
pub type TensorField64 = field::TensorField<f64>;
pub type State64 = state::State<f64>;
pub type PhysParams64 = state::PhysParams<f64>;
pub type InitSpec64 = state::InitSpec<f64>;
pub type SimConfig64 = config::SimConfig<f64>;
pub type SpectralWorkspace64 = spectral::SpectralWorkspace<f64>;
pub type Rhs64 = dynamics::Rhs<f64>;
pub type Trajectory64 = integrate::Trajectory<f64>;
pub type EnergyReport64 = diagnostics::EnergyReport<f64>;
pub type RateFit64 = limit::RateFit<f64>;

//! Electrodiffusion of two ion species through a narrow tubular channel,
//! reduced to its one-dimensional limit.
//!
//! The crate provides
//! - [`geometry`]: cross-section profiles, the geometry factor `∫ 1/h`, the
//!   coordinate-change Jacobians and the wall-compatible extension of
//!   boundary data,
//! - [`asymptotics`]: the zero-Debye-length (`mu -> 0`) solution with its
//!   closed-form fluxes, boundary layers and electroneutral regular layer,
//! - [`fast`]: the layer dynamical system, its first integrals and numerically
//!   integrated layer orbits,
//! - [`bvp`]: a finite-`mu` steady-state solver (exponentially fitted fluxes,
//!   damped Newton, continuation in `mu`),
//! - [`transient`]: time stepping with invariant-region and entropy monitors.

pub mod asymptotics;
pub mod bvp;
pub mod discretization;
pub mod error;
pub mod fast;
pub mod geometry;
pub mod numerics;
pub mod problem;
pub mod transient;

pub use error::{Error, Result};
pub use geometry::{ChannelProfile, GeometrySummary, ProfileKind};
pub use problem::{BoundaryData, IonSpecies, Side, SteadyProblem};

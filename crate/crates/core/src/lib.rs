//! Simulation and reconstruction toolkit for cold-atom dynamics in a weakly
//! corrugated harmonic trap.
//!
//! The crate covers the full pipeline from trap modeling to phase-space
//! imaging: a 1D potential with spline corrugations and wire-roughness
//! estimates ([`potential`]), classical ensemble dynamics with collisions and
//! period analytics ([`dynamics`]), tomographic projection and reconstruction
//! ([`tomography`]), a single-particle quantum extension ([`quantum`]), and
//! synthetic absorption imaging ([`imaging`]).
//!
//! Positions are meters, momenta kg·m/s, energies joules unless noted.
//! Phase space uses scaled coordinates (q̄, p̄) = (x, p/mω₀), both in meters,
//! so harmonic evolution is a rigid rotation.

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod imaging;
pub mod interp;
pub mod numeric;
pub mod params;
pub mod potential;
pub mod quantum;
pub mod rng;
pub mod tomography;

pub use error::{Error, Result};
pub use params::PhysicalParams;

/// Crate version, embedded in run reports for artifact provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

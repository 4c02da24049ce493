//! Config-driven experiment runner for the phase-space tomography toolkit.
//!
//! The library exposes the configuration model and the pipelines so
//! integration tests can drive experiments in-process; the `phasetomo`
//! binary wraps them in subcommands.

pub mod artifacts;
pub mod config;
pub mod experiments;

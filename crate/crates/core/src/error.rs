//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received arguments outside its domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Orbit does not encircle the trap center (e.g. trapped in a side well).
    #[error("orbit at E = {energy:.3e} J does not encircle the trap center: {reason}")]
    NonEncircling { energy: f64, reason: String },

    /// Perturbative machinery failed to converge; corrugation too strong at this energy.
    #[error("perturbation too strong at E = {energy:.3e} J: {reason}")]
    PerturbationTooStrong { energy: f64, reason: String },

    /// Requested energy lies outside an interpolation table's domain.
    #[error("energy {energy:.3e} J outside curve domain [{lo:.3e}, {hi:.3e}] J")]
    Extrapolation { energy: f64, lo: f64, hi: f64 },

    /// Discretization refinement check failed (estimated truncation error too large).
    #[error("discretization too coarse: {0}")]
    Refinement(String),

    /// Spatial or spectral grid cannot resolve the requested state or step.
    #[error("grid resolution: {0}")]
    Resolution(String),

    /// Probability reached the absorbing boundary of the quantum grid.
    #[error("boundary breach at t = {time:.6e} s: probability {probability:.3e} within {cells} cells of the grid edge")]
    BoundaryBreach {
        time: f64,
        probability: f64,
        cells: usize,
    },

    /// Wave-function or distribution normalization drifted out of tolerance.
    #[error("normalization violated: {0}")]
    Normalization(String),

    /// Two containers that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Malformed container file.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

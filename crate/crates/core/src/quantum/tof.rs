//! Time-of-flight mapping: ballistic expansion as a phase-space shear.
//!
//! Free flight for t_f maps (q, p̄) → (q + p̄ωt_f, p̄) in scaled coordinates.
//! The resulting column density is the phase-space projection at angle
//! arctan(ωt_f), magnified by √(1 + ω²t_f²): flight time selects the
//! quadrature between position (t_f = 0) and momentum (ωt_f → ∞).

use super::WaveFunction1D;
use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::tomography::PhaseSpaceGrid;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

/// Projection geometry realized by a ballistic flight.
#[derive(Debug, Clone, Copy)]
pub struct TofInfo {
    /// Projection angle contributed by the flight itself: arctan(ωt_f).
    /// A hold time t_h in the trap adds ωt_h on top of this.
    pub angle: f64,
    /// Spatial magnification √(1 + ω²t_f²) of the projected coordinate.
    pub stretch: f64,
}

pub fn tof_angle_stretch(omega: f64, t_f: f64) -> Result<TofInfo> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid("omega must be positive and finite"));
    }
    if !(t_f >= 0.0) || !t_f.is_finite() {
        return Err(Error::invalid("flight time must be nonnegative and finite"));
    }
    let wt = omega * t_f;
    Ok(TofInfo { angle: wt.atan(), stretch: (1.0 + wt * wt).sqrt() })
}

/// Exact free evolution for `t_f`: each plane wave acquires the kinetic phase
/// e^{−iħk²t_f/2m}. Errors if probability reaches the grid edge afterwards;
/// zero-pad first when the expanded packet outgrows the original span.
pub fn tof_map_wavefunction(psi: &WaveFunction1D, t_f: f64) -> Result<WaveFunction1D> {
    if !(t_f >= 0.0) || !t_f.is_finite() {
        return Err(Error::invalid("flight time must be nonnegative and finite"));
    }
    let mut out = psi.clone();
    if t_f == 0.0 {
        return Ok(out);
    }
    let n = out.n();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut out.psi);
    let coef = HBAR * t_f / (2.0 * out.params.mass);
    let inv_n = 1.0 / n as f64;
    for (c, k) in out.psi.iter_mut().zip(psi.k_lattice()) {
        *c *= Complex64::from_polar(inv_n, -coef * k * k);
    }
    planner.plan_fft_inverse(n).process(&mut out.psi);
    out.time += t_f;
    let dx = out.dx();
    let edge: f64 = out.psi[..4].iter().chain(out.psi[n - 4..].iter()).map(|c| c.norm_sqr()).sum();
    if edge * dx > 1e-6 {
        return Err(Error::BoundaryBreach { time: out.time, probability: edge * dx, cells: 4 });
    }
    Ok(out)
}

/// The same flight applied to a phase-space grid: bilinear gather from the
/// shear pre-image (q − p̄ωt_f, p̄). Mass carried beyond the grid span is lost,
/// so keep ωt_f·|p̄| small relative to the q extent.
pub fn tof_map_grid(grid: &PhaseSpaceGrid, omega: f64, t_f: f64) -> Result<PhaseSpaceGrid> {
    tof_angle_stretch(omega, t_f)?;
    let shear = omega * t_f;
    let nq = grid.nq();
    let values: Vec<f64> = (0..grid.np())
        .into_par_iter()
        .flat_map_iter(|ip| {
            let p = grid.p_center(ip);
            (0..nq).map(move |iq| grid.sample(grid.q_center(iq) - p * shear, p))
        })
        .collect();
    Ok(PhaseSpaceGrid { spec: *grid.spec(), values, signed: grid.is_signed() })
}

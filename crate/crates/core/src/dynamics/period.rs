//! Oscillation-period analytics for a weakly perturbed harmonic trap.
//!
//! The potential is split as V(x) = ½mω0²u² + ΔU(u) with u = x − center, so
//! ΔU collects everything beyond the harmonic core (corrugation and quartic
//! term alike). Energies are absolute (same zero as V).

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::numeric::{bisect, panel_doubling_integral, periodic_trapezoid};
use crate::potential::Potential1D;

/// Which period-shift formula `period_perturbative` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodMode {
    /// Full angular integral with the radius solved per angle; valid while
    /// the trajectory still encircles the origin.
    ExactIntegral,
    /// Turning-point weighted integral of x·ΔF, lowest order in ΔU/E.
    LowestOrder,
}

fn anharmonic(pot: &Potential1D, u: f64) -> (f64, f64) {
    // (ΔU, ΔF) at displacement u from the trap center.
    let p = pot.params();
    let k = p.mass * p.omega0 * p.omega0;
    let (v, f) = pot.eval(pot.center() + u);
    (v - 0.5 * k * u * u, f + k * u)
}

/// Finds the turning point E = V on one side of the center by scanning
/// outward from the harmonic estimate (expanded 20%) and bisecting the first
/// sign change.
fn turning_point(pot: &Potential1D, energy: f64, side: f64) -> Result<f64> {
    let p = pot.params();
    let v_c = pot.value(pot.center());
    if energy <= v_c {
        return Err(Error::NonEncircling {
            energy,
            reason: "energy does not exceed the potential at the trap center".into(),
        });
    }
    let x_h = (2.0 * (energy - v_c) / (p.mass * p.omega0 * p.omega0)).sqrt();
    let reach = 1.2 * x_h;
    let n_scan = 600;
    let f = |u: f64| energy - pot.value(pot.center() + u);
    let mut prev = 0.0;
    for i in 1..=n_scan {
        let u = side * reach * i as f64 / n_scan as f64;
        if f(u) <= 0.0 {
            let root = bisect(&f, prev, u, 1e-13)?;
            return Ok(root);
        }
        prev = u;
    }
    Err(Error::NonEncircling {
        energy,
        reason: format!(
            "no turning point within 1.2× the harmonic amplitude ({:.1} µm)",
            reach * 1e6
        ),
    })
}

/// Oscillation period by the turning-point quadrature
/// T = 2∫dx/√(2(E−V)/m), with the endpoint singularity removed by the
/// substitution x = mid + half·sinφ.
pub fn period_direct(pot: &Potential1D, energy: f64) -> Result<f64> {
    let p = pot.params();
    let u_l = turning_point(pot, energy, -1.0)?;
    let u_r = turning_point(pot, energy, 1.0)?;
    let mid = 0.5 * (u_l + u_r);
    let half = 0.5 * (u_r - u_l);
    let m = p.mass;
    let c = pot.center();
    let g = |phi: f64| {
        let u = mid + half * phi.sin();
        let ke = (energy - pot.value(c + u)).max(f64::MIN_POSITIVE);
        half * phi.cos() * (m / (2.0 * ke)).sqrt()
    };
    let integral = panel_doubling_integral(
        &g,
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
        1e-9,
    )?;
    Ok(2.0 * integral)
}

/// Period shift δT relative to the pure harmonic 2π/ω0.
pub fn period_perturbative(pot: &Potential1D, energy: f64, mode: PeriodMode) -> Result<f64> {
    match mode {
        PeriodMode::ExactIntegral => exact_integral(pot, energy),
        PeriodMode::LowestOrder => lowest_order(pot, energy),
    }
}

fn exact_integral(pot: &Potential1D, energy: f64) -> Result<f64> {
    let p = pot.params();
    let k = p.mass * p.omega0 * p.omega0;
    let (du0, _) = anharmonic(pot, 0.0);
    if energy <= du0 {
        return Err(Error::NonEncircling {
            energy,
            reason: "energy does not exceed the potential at the trap center".into(),
        });
    }
    let r_h = (2.0 * (energy - du0) / k).sqrt();
    // The integrand is smooth and 2π-periodic, so the periodic trapezoid rule
    // converges spectrally; 4096 points resolve corrugation features a few µm
    // wide at the turning points. Errors inside the quadrature are collected
    // and surfaced afterwards.
    let failure = std::cell::RefCell::new(None);
    let f = |theta: f64| {
        if failure.borrow().is_some() {
            return 0.0;
        }
        match integrand_eval(pot, energy, k, r_h, theta) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let value = periodic_trapezoid(&f, 2.0 * std::f64::consts::PI, 4096);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(value / p.omega0)
}

// Single-angle evaluation used by the exact integral (kept separate so the
// closure above can surface errors out of the quadrature).
fn integrand_eval(
    pot: &Potential1D,
    energy: f64,
    k: f64,
    r_h: f64,
    theta: f64,
) -> std::result::Result<f64, Error> {
    let cos_t = theta.cos();
    let mut r = r_h;
    let mut converged = false;
    for _ in 0..50 {
        let (du, df) = anharmonic(pot, r * cos_t);
        let g = 0.5 * k * r * r + du - energy;
        let gp = k * r - df * cos_t;
        let step = g / gp;
        r -= step;
        if step.abs() <= 1e-12 * r_h {
            converged = true;
            break;
        }
    }
    if !converged || !r.is_finite() || r <= 0.0 {
        return Err(Error::PerturbationTooStrong {
            energy,
            reason: format!("radius iteration failed to converge at θ = {theta:.4}"),
        });
    }
    let x = r * cos_t;
    let (du, df) = anharmonic(pot, x);
    let num = 0.5 * x * df;
    let den = energy - du - num;
    if den <= 0.0 {
        return Err(Error::NonEncircling {
            energy,
            reason: "nonpositive denominator: trajectory does not complete a round trip".into(),
        });
    }
    Ok(num / den)
}

fn lowest_order(pot: &Potential1D, energy: f64) -> Result<f64> {
    let p = pot.params();
    if energy <= 0.0 {
        return Err(Error::NonEncircling {
            energy,
            reason: "lowest-order formula needs positive energy".into(),
        });
    }
    let x_max = (2.0 * energy / (p.mass * p.omega0 * p.omega0)).sqrt();
    // Weak-perturbation guard along the sampled orbit.
    let mut max_du: f64 = 0.0;
    for i in 0..=1000 {
        let u = x_max * (2.0 * i as f64 / 1000.0 - 1.0);
        max_du = max_du.max(anharmonic(pot, u).0.abs());
    }
    if max_du >= 0.3 * energy {
        return Err(Error::PerturbationTooStrong {
            energy,
            reason: format!(
                "max|ΔU|/E = {:.2} exceeds the lowest-order validity guard 0.3",
                max_du / energy
            ),
        });
    }
    // ∫ x·ΔF/√(x_max²−x²) dx with x = x_max·sinφ.
    let g = |phi: f64| {
        let u = x_max * phi.sin();
        u * anharmonic(pot, u).1
    };
    let integral = panel_doubling_integral(
        &g,
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
        1e-9,
    )?;
    Ok(integral / (p.omega0 * energy))
}

/// Relative frequency shift δω/ω0 tabulated against energy, with monotone
/// cubic interpolation between grid points.
#[derive(Debug, Clone)]
pub struct FrequencyShiftCurve {
    energies: Vec<f64>,
    shifts: Vec<f64>,
    interp: MonotoneCubic,
    skipped: Vec<(f64, String)>,
}

impl FrequencyShiftCurve {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    /// Grid points that failed period evaluation, with the diagnostic.
    pub fn skipped(&self) -> &[(f64, String)] {
        &self.skipped
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.energies[0], *self.energies.last().unwrap())
    }

    /// (min, max) of the tabulated shifts.
    pub fn shift_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &s in &self.shifts {
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, hi)
    }

    /// δω/ω0 at the given energy; energies outside the table are an error.
    pub fn eval(&self, energy: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if energy < lo || energy > hi {
            return Err(Error::Extrapolation { energy, lo, hi });
        }
        Ok(self.interp.value(energy))
    }
}

/// Builds the δω/ω0 curve over an energy grid from the direct period
/// quadrature: δω/ω0 = 2π/(ω0·T) − 1. Failing grid points are skipped and
/// recorded; fewer than four usable points is an error.
pub fn frequency_shift_curve(pot: &Potential1D, e_grid: &[f64]) -> Result<FrequencyShiftCurve> {
    if e_grid.len() < 4 {
        return Err(Error::invalid("energy grid needs at least 4 points"));
    }
    for w in e_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid("energy grid must be strictly increasing"));
        }
    }
    let omega0 = pot.params().omega0;
    let mut energies = Vec::new();
    let mut shifts = Vec::new();
    let mut skipped = Vec::new();
    for &e in e_grid {
        match period_direct(pot, e) {
            Ok(t) => {
                let shift = 2.0 * std::f64::consts::PI / (omega0 * t) - 1.0;
                if shift.abs() >= 0.2 {
                    return Err(Error::PerturbationTooStrong {
                        energy: e,
                        reason: format!(
                            "|δω/ω0| = {:.3} breaks the weak-perturbation bound 0.2",
                            shift.abs()
                        ),
                    });
                }
                energies.push(e);
                shifts.push(shift);
            }
            Err(err) => skipped.push((e, err.to_string())),
        }
    }
    if energies.len() < 4 {
        return Err(Error::invalid(format!(
            "only {} of {} energy grid points were usable",
            energies.len(),
            e_grid.len()
        )));
    }
    let interp = MonotoneCubic::new(energies.clone(), shifts.clone())?;
    Ok(FrequencyShiftCurve {
        energies,
        shifts,
        interp,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::KB;
    use crate::params::PhysicalParams;
    use crate::potential::synth_paper_corrugation;

    fn harmonic() -> Potential1D {
        Potential1D::harmonic(PhysicalParams::rb87_default(), 0.0).unwrap()
    }

    #[test]
    fn harmonic_period_is_isochronous() {
        let pot = harmonic();
        let t0 = 2.0 * std::f64::consts::PI / pot.params().omega0;
        for e in [KB * 50e-9, KB * 1e-6, KB * 3e-6] {
            let t = period_direct(&pot, e).unwrap();
            assert!((t - t0).abs() < 1e-8 * t0, "T = {t} at E = {e:e}");
        }
    }

    #[test]
    fn quartic_shortens_period_by_1p69_percent() {
        let pot = harmonic().with_quartic_scale(100e-6).unwrap();
        let p = pot.params().clone();
        let x_max = 15e-6;
        // E chosen so the quartic orbit turns exactly at 15 µm.
        let e = pot.value(x_max);
        let t = period_direct(&pot, e).unwrap();
        let t0 = 2.0 * std::f64::consts::PI / p.omega0;
        let rel = t / t0 - 1.0;
        assert!(
            (rel - (-1.69e-2)).abs() < 0.05e-2,
            "δT/T = {:.4}%",
            100.0 * rel
        );
    }

    #[test]
    fn perturbative_zero_for_pure_harmonic() {
        let pot = harmonic();
        for mode in [PeriodMode::ExactIntegral, PeriodMode::LowestOrder] {
            let dt = period_perturbative(&pot, KB * 2e-6, mode).unwrap();
            assert!(dt.abs() < 1e-18, "δT = {dt:e}");
        }
    }

    #[test]
    fn quartic_lowest_order_matches_closed_form() {
        let pot = harmonic().with_quartic_scale(100e-6).unwrap();
        let p = pot.params().clone();
        let x_max: f64 = 15e-6;
        let e = 0.5 * p.mass * p.omega0 * p.omega0 * x_max * x_max;
        let dt = period_perturbative(&pot, e, PeriodMode::LowestOrder).unwrap();
        let t0 = 2.0 * std::f64::consts::PI / p.omega0;
        let expect = -0.75 * (x_max / 100e-6).powi(2);
        assert!(
            (dt / t0 - expect).abs() < 1e-6,
            "δT/T = {:.6e} vs {:.6e}",
            dt / t0,
            expect
        );
    }

    #[test]
    fn exact_integral_tracks_direct_quadrature_with_corrugation() {
        let pot = harmonic()
            .with_corrugation(&synth_paper_corrugation(1.0))
            .unwrap();
        let t0 = 2.0 * std::f64::consts::PI / pot.params().omega0;
        let e_shift = pot.params().shift_energy(85e-6);
        for frac in [0.8, 1.0, 1.2] {
            let e = frac * e_shift;
            let direct = period_direct(&pot, e).unwrap() - t0;
            let exact = period_perturbative(&pot, e, PeriodMode::ExactIntegral).unwrap();
            assert!(
                (exact - direct).abs() < 0.01 * direct.abs().max(1e-6 * t0),
                "E = {frac}·E_shift: exact {exact:e} vs direct {direct:e}"
            );
        }
    }

    #[test]
    fn lowest_order_approximates_exact_when_weak() {
        // At energies away from the curve's zero crossing the relative
        // comparison is well conditioned; max|ΔU|/E ≈ 0.01 here.
        let pot = harmonic()
            .with_corrugation(&synth_paper_corrugation(1.0))
            .unwrap();
        let e_shift = pot.params().shift_energy(85e-6);
        for frac in [0.8, 1.2] {
            let e = frac * e_shift;
            let exact = period_perturbative(&pot, e, PeriodMode::ExactIntegral).unwrap();
            let approx = period_perturbative(&pot, e, PeriodMode::LowestOrder).unwrap();
            assert!(
                (approx - exact).abs() < 0.1 * exact.abs(),
                "E = {frac}·E_shift: lowest {approx:e} vs exact {exact:e}"
            );
        }
    }

    #[test]
    fn corrugation_shift_sign_flips_with_energy() {
        // Outward force at the turning points at low energy lengthens the
        // period (δω < 0); inward force at high energy shortens it (δω > 0).
        let pot = harmonic()
            .with_corrugation(&synth_paper_corrugation(1.0))
            .unwrap();
        let e_shift = pot.params().shift_energy(85e-6);
        let omega0 = pot.params().omega0;
        let t0 = 2.0 * std::f64::consts::PI / omega0;
        let low = period_direct(&pot, 0.70 * e_shift).unwrap();
        let high = period_direct(&pot, 1.15 * e_shift).unwrap();
        assert!(low > t0, "low-energy period not lengthened");
        assert!(high < t0, "high-energy period not shortened");
    }

    #[test]
    fn non_encircling_energy_is_rejected() {
        let pot = harmonic()
            .with_corrugation(&synth_paper_corrugation(1.0))
            .unwrap();
        // Below the corrugation floor near the center nothing oscillates.
        let err = period_direct(&pot, -KB * 1e-6).unwrap_err();
        match err {
            Error::NonEncircling { .. } => {}
            other => panic!("expected non-encircling, got {other:?}"),
        }
    }

    #[test]
    fn strong_perturbation_is_rejected_by_lowest_order_guard() {
        let pot = harmonic()
            .with_corrugation(&synth_paper_corrugation(40.0))
            .unwrap();
        // max|ΔU| ≈ kB·0.87 µK; pick E with max|ΔU|/E > 0.3.
        let e = KB * 2.0e-6;
        match period_perturbative(&pot, e, PeriodMode::LowestOrder) {
            Err(Error::PerturbationTooStrong { .. }) => {}
            other => panic!("expected perturbation-too-strong, got {other:?}"),
        }
    }

    #[test]
    fn curve_reproduces_paper_span_and_linearity() {
        let params = PhysicalParams::rb87_default();
        let e_shift = params.shift_energy(85e-6);
        let de = (params.thermal_energy() * (params.thermal_energy() + 2.0 * e_shift)).sqrt();
        let grid: Vec<f64> = (0..=60)
            .map(|i| (e_shift - 2.0 * de) + 4.0 * de * i as f64 / 60.0)
            .collect();
        let pot1 = Potential1D::harmonic(params.clone(), 0.0)
            .unwrap()
            .with_corrugation(&synth_paper_corrugation(1.0))
            .unwrap();
        let curve1 = frequency_shift_curve(&pot1, &grid).unwrap();
        assert!(curve1.skipped().is_empty());
        let (lo, hi) = curve1.shift_range();
        // Fig-like target span −0.015 / +0.009, each within ±50%.
        assert!(lo > -0.0225 && lo < -0.0075, "min δω/ω0 = {lo:.4}");
        assert!(hi > 0.0045 && hi < 0.0135, "max δω/ω0 = {hi:.4}");
        // Halving the corrugation roughly halves the shift (linear response).
        // Energies whose turning points sit on a well carry a visible
        // quadratic correction, so the comparison runs toward zero amplitude
        // rather than away from it.
        let pot_half = Potential1D::harmonic(params, 0.0)
            .unwrap()
            .with_corrugation(&synth_paper_corrugation(0.5))
            .unwrap();
        let curve_half = frequency_shift_curve(&pot_half, &grid).unwrap();
        for (i, &e) in curve1.energies().iter().enumerate() {
            let s1 = curve1.shifts()[i];
            let s_half = curve_half.eval(e).unwrap();
            if s1.abs() > 2e-3 {
                assert!(
                    (s1 - 2.0 * s_half).abs() < 0.2 * s1.abs(),
                    "E = {e:e}: {s1:e} vs 2×{s_half:e}"
                );
            }
        }
    }

    #[test]
    fn flat_curve_for_harmonic_and_extrapolation_guard() {
        let pot = harmonic();
        let grid: Vec<f64> = (1..=10).map(|i| KB * 0.3e-6 * i as f64).collect();
        let curve = frequency_shift_curve(&pot, &grid).unwrap();
        for &e in curve.energies() {
            assert!(curve.eval(e).unwrap().abs() < 1e-9);
        }
        match curve.eval(KB * 10e-6) {
            Err(Error::Extrapolation { .. }) => {}
            other => panic!("expected extrapolation error, got {other:?}"),
        }
    }
}

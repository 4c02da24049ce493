//! Shared physical parameter set for the trapped gas.

use crate::constants::{KB, MASS_RB87};
use crate::error::{Error, Result};

/// Trap and gas parameters. All fields SI and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Atomic mass [kg].
    pub mass: f64,
    /// Longitudinal (weak-axis) angular trap frequency [rad/s].
    pub omega0: f64,
    /// Transverse angular trap frequency [rad/s].
    pub omega_perp: f64,
    /// Gas temperature [K].
    pub temperature: f64,
    /// Elastic collision cross section [m^2].
    pub sigma_el: f64,
}

impl PhysicalParams {
    pub fn new(
        mass: f64,
        omega0: f64,
        omega_perp: f64,
        temperature: f64,
        sigma_el: f64,
    ) -> Result<Self> {
        let p = PhysicalParams {
            mass,
            omega0,
            omega_perp,
            temperature,
            sigma_el,
        };
        p.validate()?;
        Ok(p)
    }

    /// 87Rb in the 38 Hz × 110 Hz trap at 160 nK with σ_el = 8e-16 m².
    pub fn rb87_default() -> Self {
        PhysicalParams {
            mass: MASS_RB87,
            omega0: 2.0 * std::f64::consts::PI * 38.0,
            omega_perp: 2.0 * std::f64::consts::PI * 110.0,
            temperature: 160e-9,
            sigma_el: 8e-16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mass", self.mass),
            ("omega0", self.omega0),
            ("omega_perp", self.omega_perp),
            ("temperature", self.temperature),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and > 0, got {v:e}"
                )));
            }
        }
        // σ_el = 0 is the collisionless limit.
        if !self.sigma_el.is_finite() || self.sigma_el < 0.0 {
            return Err(Error::invalid(format!(
                "sigma_el must be finite and ≥ 0, got {:e}",
                self.sigma_el
            )));
        }
        Ok(())
    }

    /// Thermal energy k_B T [J].
    pub fn thermal_energy(&self) -> f64 {
        KB * self.temperature
    }

    /// Thermal position spread in the longitudinal trap, sqrt(kB T / m ω0²) [m].
    pub fn sigma_x(&self) -> f64 {
        (self.thermal_energy() / (self.mass * self.omega0 * self.omega0)).sqrt()
    }

    /// Thermal momentum spread sqrt(m kB T) [kg·m/s].
    pub fn sigma_p(&self) -> f64 {
        (self.mass * self.thermal_energy()).sqrt()
    }

    /// Momentum-to-length conversion for scaled phase space: p̄ = p / (m ω0).
    pub fn momentum_scale(&self) -> f64 {
        self.mass * self.omega0
    }

    /// Harmonic energy of a displacement, ½ m ω0² x² [J].
    pub fn shift_energy(&self, x_shift: f64) -> f64 {
        0.5 * self.mass * self.omega0 * self.omega0 * x_shift * x_shift
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_fields() {
        let mut p = PhysicalParams::rb87_default();
        p.temperature = 0.0;
        assert!(p.validate().is_err());
        p = PhysicalParams::rb87_default();
        p.mass = -1.0;
        assert!(p.validate().is_err());
        p = PhysicalParams::rb87_default();
        p.sigma_el = f64::NAN;
        assert!(p.validate().is_err());
    }

    #[test]
    fn shift_energy_85um_is_2p15_uk() {
        // ½ m ω0² (85 µm)² = 2.97e-29 J ≈ kB · 2.15 µK
        let p = PhysicalParams::rb87_default();
        let e = p.shift_energy(85e-6);
        assert!((e - 2.97e-29).abs() < 0.01e-29, "E = {e:e}");
        let t_uk = e / KB * 1e6;
        assert!((t_uk - 2.15).abs() < 0.01, "E/kB = {t_uk} µK");
    }

    #[test]
    fn energy_spread_of_shifted_cloud() {
        // ΔE = sqrt(kBT (kBT + 2 E_shift)) ≈ kB · 845 nK for T = 160 nK, shift 85 µm
        let p = PhysicalParams::rb87_default();
        let kt = p.thermal_energy();
        let de = (kt * (kt + 2.0 * p.shift_energy(85e-6))).sqrt();
        let de_nk = de / KB * 1e9;
        assert!((de_nk - 845.0).abs() < 2.0, "ΔE/kB = {de_nk} nK");
    }
}

//! Longitudinal trap potential: harmonic with optional spline corrugation and
//! optional quartic anharmonicity.

pub mod wire;

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::constants::KB;
use crate::error::{Error, Result};
use crate::interp::CubicSpline;
use crate::params::PhysicalParams;

/// Tabulated corrugation ΔU(x): strictly increasing x [m], energies [J].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrugationGrid {
    xs: Vec<f64>,
    du: Vec<f64>,
}

impl CorrugationGrid {
    pub fn new(xs: Vec<f64>, du: Vec<f64>) -> Result<Self> {
        if xs.len() != du.len() {
            return Err(Error::invalid("corrugation x/ΔU length mismatch"));
        }
        if xs.len() < 4 {
            return Err(Error::invalid("corrugation grid needs at least 4 points"));
        }
        for v in xs.iter().chain(du.iter()) {
            if !v.is_finite() {
                return Err(Error::invalid("non-finite corrugation sample"));
            }
        }
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::invalid(format!(
                    "corrugation x must be strictly increasing: {:e} then {:e}",
                    w[0], w[1]
                )));
            }
        }
        Ok(CorrugationGrid { xs, du })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn du(&self) -> &[f64] {
        &self.du
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Multiply all energies by `scale`.
    pub fn scaled(&self, scale: f64) -> Self {
        CorrugationGrid {
            xs: self.xs.clone(),
            du: self.du.iter().map(|v| v * scale).collect(),
        }
    }

    /// Read `x_meters<TAB>deltaU_joules` rows; `#` starts a comment line.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut xs = Vec::new();
        let mut du = Vec::new();
        for (ln, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut it = t.split('\t');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::Format(format!("line {}: expected two columns", ln + 1)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {}: {e}", ln + 1)))
            };
            xs.push(parse(it.next())?);
            du.push(parse(it.next())?);
        }
        CorrugationGrid::new(xs, du)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "# corrugation table: x_meters<TAB>deltaU_joules")?;
        for (x, u) in self.xs.iter().zip(self.du.iter()) {
            writeln!(w, "{x}\t{u}")?;
        }
        Ok(())
    }
}

/// Synthetic stand-in for the measured wire corrugation at drive scale 1:
/// two 22 nK wells at ±80 µm (the dominant lithography-stitch features) and a
/// ∓7 nK pair at ∓30 µm, Gaussian profiles of width σ = 6 µm, tabulated on
/// ±150 µm at 0.5 µm spacing. `amplitude_scale` multiplies all depths.
///
/// Sign convention: at energies with turning points inside ±80 µm the wells
/// exert an outward force at both turning points, lengthening the period.
pub fn synth_paper_corrugation(amplitude_scale: f64) -> CorrugationGrid {
    const CENTERS_UM: [f64; 4] = [-80.0, -30.0, 30.0, 80.0];
    const DEPTHS_NK: [f64; 4] = [-22.0, -7.0, 7.0, -22.0];
    const SIGMA_UM: f64 = 6.0;
    let n = 601;
    let mut xs = Vec::with_capacity(n);
    let mut du = Vec::with_capacity(n);
    for i in 0..n {
        let x_um = -150.0 + i as f64 * 0.5;
        let mut u = 0.0;
        for (c, d) in CENTERS_UM.iter().zip(DEPTHS_NK.iter()) {
            let z = (x_um - c) / SIGMA_UM;
            u += d * (-0.5 * z * z).exp();
        }
        xs.push(x_um * 1e-6);
        du.push(u * 1e-9 * KB * amplitude_scale);
    }
    CorrugationGrid::new(xs, du).expect("synthetic corrugation grid is well formed")
}

/// 1D trap potential V(x) = ½ m ω0² X² (1 + X²/w²) + ΔU(x), X = x − center.
///
/// The corrugation spline contributes zero outside its tabulated domain; such
/// evaluations are counted in [`Potential1D::out_of_domain_count`].
#[derive(Debug)]
pub struct Potential1D {
    params: PhysicalParams,
    center: f64,
    corrugation: Option<CubicSpline>,
    /// Quartic length scale w [m]; `None` disables the quartic term.
    quartic_scale: Option<f64>,
    oob: AtomicU64,
}

impl Clone for Potential1D {
    fn clone(&self) -> Self {
        Potential1D {
            params: self.params,
            center: self.center,
            corrugation: self.corrugation.clone(),
            quartic_scale: self.quartic_scale,
            oob: AtomicU64::new(self.oob.load(Ordering::Relaxed)),
        }
    }
}

impl Potential1D {
    pub fn harmonic(params: PhysicalParams, center: f64) -> Result<Self> {
        params.validate()?;
        if !center.is_finite() {
            return Err(Error::invalid("trap center must be finite"));
        }
        Ok(Potential1D {
            params,
            center,
            corrugation: None,
            quartic_scale: None,
            oob: AtomicU64::new(0),
        })
    }

    pub fn with_corrugation(mut self, grid: &CorrugationGrid) -> Result<Self> {
        self.corrugation = Some(CubicSpline::new(grid.xs.clone(), grid.du.clone())?);
        Ok(self)
    }

    /// Enable the quartic term ½ m ω0² X⁴ / w².
    pub fn with_quartic_scale(mut self, w: f64) -> Result<Self> {
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::invalid("quartic scale w must be finite and > 0"));
        }
        self.quartic_scale = Some(w);
        Ok(self)
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn has_corrugation(&self) -> bool {
        self.corrugation.is_some()
    }

    pub fn quartic_scale(&self) -> Option<f64> {
        self.quartic_scale
    }

    /// Number of corrugation evaluations that fell outside the tabulated domain.
    pub fn out_of_domain_count(&self) -> u64 {
        self.oob.load(Ordering::Relaxed)
    }

    pub fn reset_out_of_domain_count(&self) {
        self.oob.store(0, Ordering::Relaxed);
    }

    /// Potential [J] and force −dV/dx [N] at x. The force uses the analytic
    /// spline derivative, so it is consistent with V to interpolation order.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let m_w2 = self.params.mass * self.params.omega0 * self.params.omega0;
        let xx = x - self.center;
        let mut v = 0.5 * m_w2 * xx * xx;
        let mut f = -m_w2 * xx;
        if let Some(w) = self.quartic_scale {
            let r2 = (xx / w) * (xx / w);
            v += 0.5 * m_w2 * xx * xx * r2;
            f -= 2.0 * m_w2 * xx * r2;
        }
        if let Some(s) = &self.corrugation {
            if s.contains(x) {
                v += s.value(x);
                f -= s.derivative(x);
            } else {
                self.oob.fetch_add(1, Ordering::Relaxed);
            }
        }
        (v, f)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    /// Corrugation-only part ΔU(x) [J] (0 outside the tabulated domain).
    pub fn corrugation_value(&self, x: f64) -> f64 {
        match &self.corrugation {
            Some(s) if s.contains(x) => s.value(x),
            _ => 0.0,
        }
    }

    /// Corrugation-only force ΔF = −dΔU/dx [N].
    pub fn corrugation_force(&self, x: f64) -> f64 {
        match &self.corrugation {
            Some(s) if s.contains(x) => -s.derivative(x),
            _ => 0.0,
        }
    }
}

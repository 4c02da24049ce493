//! Tomographic projection and reconstruction in scaled phase space.
//!
//! Projections pr(x,θ) are line integrals of the distribution P(q̄,p̄) along
//! the axis rotated by θ. Reconstruction inverts the projection set either by
//! filtered back-projection with a regularized oscillatory kernel (cut off at
//! spatial frequency k_c) or by multiplicative maximum-likelihood iteration.

pub mod metrics;
pub mod mlem;

pub use metrics::{grid_metrics, overlap, GridMetrics};
pub use mlem::mlem_reconstruct;

use crate::dynamics::Ensemble;
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Uniform grid spacing of strictly increasing `xs`, validated to be uniform.
fn uniform_spacing(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::invalid("x-grid needs at least 2 points"));
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if !(dx > 0.0) || !dx.is_finite() {
        return Err(Error::invalid("x-grid must be increasing and finite"));
    }
    for (i, w) in xs.windows(2).enumerate() {
        if ((w[1] - w[0]) - dx).abs() > 1e-6 * dx {
            return Err(Error::invalid(format!(
                "x-grid not uniform near index {i}: step {} vs {}",
                w[1] - w[0],
                dx
            )));
        }
    }
    Ok(dx)
}

/// Evenly spaced x-grid of `n` points covering [lo, hi] (endpoints included).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

/// A set of 1D projections at increasing angles in [0, π) on a shared
/// uniform x-grid.
#[derive(Debug, Clone)]
pub struct Sinogram {
    angles: Vec<f64>,
    xs: Vec<f64>,
    dx: f64,
    values: Vec<Vec<f64>>,
    normalized: bool,
}

impl Sinogram {
    pub fn new(
        angles: Vec<f64>,
        xs: Vec<f64>,
        values: Vec<Vec<f64>>,
        normalized: bool,
    ) -> Result<Self> {
        if angles.is_empty() || angles.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} angles with {} projection rows",
                angles.len(),
                values.len()
            )));
        }
        for w in angles.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::invalid("angles must be strictly increasing"));
            }
        }
        if angles[0] < 0.0 || *angles.last().unwrap() >= std::f64::consts::PI {
            return Err(Error::invalid("angles must lie in [0, π)"));
        }
        let dx = uniform_spacing(&xs)?;
        for (i, row) in values.iter().enumerate() {
            if row.len() != xs.len() {
                return Err(Error::invalid(format!(
                    "projection {i} has {} values for {} grid points",
                    row.len(),
                    xs.len()
                )));
            }
            let mut sum = 0.0;
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!(
                        "projection {i} contains negative or non-finite value {v}"
                    )));
                }
                sum += v;
            }
            if normalized && (sum * dx - 1.0).abs() > 1e-6 {
                return Err(Error::Normalization(format!(
                    "projection {i} sums to {} (×Δx), expected 1",
                    sum * dx
                )));
            }
        }
        Ok(Sinogram { angles, xs, dx, values, normalized })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Same projections rescaled so each sums (×Δx) to 1.
    pub fn normalize(&self) -> Result<Sinogram> {
        let mut values = self.values.clone();
        for (i, row) in values.iter_mut().enumerate() {
            let sum: f64 = row.iter().sum::<f64>() * self.dx;
            if sum <= 0.0 {
                return Err(Error::Normalization(format!("projection {i} has zero mass")));
            }
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        Sinogram::new(self.angles.clone(), self.xs.clone(), values, true)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = BufWriter::new(f);
        writeln!(
            w,
            "PSSINO1 {} {} {} {}",
            self.angles.len(),
            self.xs.len(),
            self.xs[0],
            self.xs[self.xs.len() - 1]
        )?;
        for (theta, row) in self.angles.iter().zip(&self.values) {
            writeln!(w, "theta={theta}")?;
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Sinogram> {
        let f = std::fs::File::open(path)?;
        let reader = BufReader::new(f);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty sinogram file".into()))??;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 5 || head[0] != "PSSINO1" {
            return Err(Error::Format(format!("bad sinogram header: {header}")));
        }
        let n_angles: usize = head[1].parse().map_err(|_| Error::Format("bad angle count".into()))?;
        let n_x: usize = head[2].parse().map_err(|_| Error::Format("bad x count".into()))?;
        let x_min: f64 = head[3].parse().map_err(|_| Error::Format("bad x_min".into()))?;
        let x_max: f64 = head[4].parse().map_err(|_| Error::Format("bad x_max".into()))?;
        let mut angles = Vec::with_capacity(n_angles);
        let mut values = Vec::with_capacity(n_angles);
        for i in 0..n_angles {
            let theta_line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("missing theta line for angle {i}")))??;
            let theta = theta_line
                .strip_prefix("theta=")
                .ok_or_else(|| Error::Format(format!("expected theta= line, got: {theta_line}")))?
                .parse::<f64>()
                .map_err(|_| Error::Format("unparsable theta".into()))?;
            let row_line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("missing values for angle {i}")))??;
            let row: Vec<f64> = row_line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Format(format!("unparsable value in projection {i}")))?;
            if row.len() != n_x {
                return Err(Error::Format(format!(
                    "projection {i} has {} values, header says {n_x}",
                    row.len()
                )));
            }
            angles.push(theta);
            values.push(row);
        }
        Sinogram::new(angles, linspace(x_min, x_max, n_x), values, false)
    }
}

/// Extents and shape of a phase-space grid; cells are uniform, values sit at
/// cell centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nq: usize,
    pub np: usize,
    pub qmin: f64,
    pub qmax: f64,
    pub pmin: f64,
    pub pmax: f64,
}

impl GridSpec {
    /// Square n×n grid over ±half in both coordinates.
    pub fn square(n: usize, half: f64) -> GridSpec {
        GridSpec { nq: n, np: n, qmin: -half, qmax: half, pmin: -half, pmax: half }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nq < 2 || self.np < 2 {
            return Err(Error::invalid("grid needs at least 2×2 cells"));
        }
        if !(self.qmax > self.qmin) || !(self.pmax > self.pmin) {
            return Err(Error::invalid("grid extents must be positive"));
        }
        for v in [self.qmin, self.qmax, self.pmin, self.pmax] {
            if !v.is_finite() {
                return Err(Error::invalid("grid extents must be finite"));
            }
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::square(128, 150e-6)
    }
}

/// Discretized distribution over scaled phase space (q̄, p̄), both in meters.
/// Classical distributions are nonnegative; Wigner functions are signed.
#[derive(Debug, Clone)]
pub struct PhaseSpaceGrid {
    pub(crate) spec: GridSpec,
    /// Row-major, q̄ fastest: values[ip * nq + iq].
    pub(crate) values: Vec<f64>,
    pub(crate) signed: bool,
}

impl PhaseSpaceGrid {
    pub fn zeros(spec: GridSpec, signed: bool) -> Result<PhaseSpaceGrid> {
        spec.validate()?;
        Ok(PhaseSpaceGrid { spec, values: vec![0.0; spec.nq * spec.np], signed })
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>, signed: bool) -> Result<PhaseSpaceGrid> {
        spec.validate()?;
        if values.len() != spec.nq * spec.np {
            return Err(Error::invalid(format!(
                "{} values for a {}×{} grid",
                values.len(),
                spec.nq,
                spec.np
            )));
        }
        let mut max_abs = 0.0f64;
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::invalid("non-finite grid value"));
            }
            max_abs = max_abs.max(v.abs());
        }
        if !signed {
            for &v in &values {
                if v < -1e-3 * max_abs {
                    return Err(Error::invalid(format!(
                        "negative value {v} in classical grid (max |v| = {max_abs})"
                    )));
                }
            }
        }
        Ok(PhaseSpaceGrid { spec, values, signed })
    }

    /// Normalized 2D histogram of ensemble phase-space coordinates.
    pub fn from_ensemble(ens: &Ensemble, spec: GridSpec) -> Result<PhaseSpaceGrid> {
        ens.validate()?;
        let mut g = PhaseSpaceGrid::zeros(spec, false)?;
        let scale = ens.params.momentum_scale();
        let (dq, dp) = (g.dq(), g.dp());
        let mut count = 0usize;
        for (&x, &p) in ens.x.iter().zip(&ens.p) {
            let fq = (x - spec.qmin) / dq;
            let fp = (p / scale - spec.pmin) / dp;
            if fq >= 0.0 && fp >= 0.0 && fq < spec.nq as f64 && fp < spec.np as f64 {
                g.values[fp as usize * spec.nq + fq as usize] += 1.0;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::invalid("no particles inside the grid extents"));
        }
        let norm = count as f64 * dq * dp;
        for v in &mut g.values {
            *v /= norm;
        }
        Ok(g)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn nq(&self) -> usize {
        self.spec.nq
    }

    pub fn np(&self) -> usize {
        self.spec.np
    }

    pub fn dq(&self) -> f64 {
        (self.spec.qmax - self.spec.qmin) / self.spec.nq as f64
    }

    pub fn dp(&self) -> f64 {
        (self.spec.pmax - self.spec.pmin) / self.spec.np as f64
    }

    pub fn q_center(&self, iq: usize) -> f64 {
        self.spec.qmin + (iq as f64 + 0.5) * self.dq()
    }

    pub fn p_center(&self, ip: usize) -> f64 {
        self.spec.pmin + (ip as f64 + 0.5) * self.dp()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn at(&self, iq: usize, ip: usize) -> f64 {
        self.values[ip * self.spec.nq + iq]
    }

    /// Signed total Σ v·Δq̄Δp̄.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dq() * self.dp()
    }

    /// Same grid scaled to unit signed mass.
    pub fn normalized(&self) -> Result<PhaseSpaceGrid> {
        let mass = self.total_mass();
        if mass.abs() < 1e-300 {
            return Err(Error::Normalization("grid has zero total mass".into()));
        }
        let mut out = self.clone();
        for v in &mut out.values {
            *v /= mass;
        }
        Ok(out)
    }

    /// Bilinear sample at physical coordinates; zero outside the cell centers.
    pub fn sample(&self, q: f64, p: f64) -> f64 {
        crate::interp::bilinear(
            &self.values,
            self.spec.nq,
            self.spec.np,
            self.spec.qmin + 0.5 * self.dq(),
            self.dq(),
            self.spec.pmin + 0.5 * self.dp(),
            self.dp(),
            q,
            p,
        )
    }

    /// Distribution rotated counterclockwise by `delta` (bilinear gather from
    /// the pre-image of each output cell).
    pub fn rotated(&self, delta: f64) -> PhaseSpaceGrid {
        let (c, s) = (delta.cos(), delta.sin());
        let nq = self.spec.nq;
        let values: Vec<f64> = (0..self.spec.np)
            .into_par_iter()
            .flat_map_iter(|ip| {
                let p = self.p_center(ip);
                (0..nq).map(move |iq| {
                    let q = self.q_center(iq);
                    self.sample(q * c + p * s, -q * s + p * c)
                })
            })
            .collect();
        PhaseSpaceGrid { spec: self.spec, values, signed: self.signed }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = BufWriter::new(f);
        writeln!(
            w,
            "PSGRID1 {} {} {} {} {} {}",
            self.spec.nq, self.spec.np, self.spec.qmin, self.spec.qmax, self.spec.pmin, self.spec.pmax
        )?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PhaseSpaceGrid> {
        let f = std::fs::File::open(path)?;
        let mut r = BufReader::new(f);
        let mut header = String::new();
        r.read_line(&mut header)?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 7 || head[0] != "PSGRID1" {
            return Err(Error::Format(format!("bad grid header: {}", header.trim())));
        }
        let nq: usize = head[1].parse().map_err(|_| Error::Format("bad nq".into()))?;
        let np: usize = head[2].parse().map_err(|_| Error::Format("bad np".into()))?;
        let ext: Vec<f64> = head[3..7]
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Format("bad grid extent".into()))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != nq * np * 8 {
            return Err(Error::Format(format!(
                "expected {} value bytes, found {}",
                nq * np * 8,
                bytes.len()
            )));
        }
        let values: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let signed = values.iter().any(|&v| v < 0.0);
        let spec = GridSpec { nq, np, qmin: ext[0], qmax: ext[1], pmin: ext[2], pmax: ext[3] };
        PhaseSpaceGrid::from_values(spec, values, signed)
    }
}

/// Regularized back-projection kernel: the inverse-Radon filter with
/// frequencies cut off at k_c, in closed form. Even in x; units 1/m².
pub fn kernel_k(x: f64, k_c: f64) -> f64 {
    debug_assert!(k_c > 0.0);
    let u = k_c * x.abs();
    if u > 0.1 {
        (u.cos() + u * u.sin() - 1.0) / (x * x)
    } else {
        // Series form, nondivergent at x = 0; remainder O(u⁶/144).
        0.5 * k_c * k_c * (1.0 - u * u / 4.0 + u.powi(4) / 72.0)
    }
}

// Sparse row of the projection operator: (cell, weight) pairs such that
// pr(x,θ) = Σ w·P_cell. Integration nodes are the grid's own p̄-lattice
// midpoints extended along the rotated line, so θ = 0 reproduces the exact
// discrete marginal; weights are bilinear in the cell centers.
pub(crate) fn line_entries(
    spec: &GridSpec,
    theta: f64,
    x: f64,
    out: &mut Vec<(u32, f64)>,
) {
    out.clear();
    let dq = (spec.qmax - spec.qmin) / spec.nq as f64;
    let dp = (spec.pmax - spec.pmin) / spec.np as f64;
    let (c, s) = (theta.cos(), theta.sin());
    let half_diag = 0.5 * ((spec.qmax - spec.qmin).hypot(spec.pmax - spec.pmin));
    let center_q = 0.5 * (spec.qmin + spec.qmax);
    let center_p = 0.5 * (spec.pmin + spec.pmax);
    let reach = half_diag + center_q.hypot(center_p);
    let k_lo = ((-reach - spec.pmin) / dp).floor() as i64 - 1;
    let k_hi = ((reach - spec.pmin) / dp).ceil() as i64 + 1;
    let q0 = spec.qmin + 0.5 * dq;
    let p0 = spec.pmin + 0.5 * dp;
    for k in k_lo..=k_hi {
        let sv = spec.pmin + (k as f64 + 0.5) * dp;
        let q = x * c - sv * s;
        let p = x * s + sv * c;
        let fq = (q - q0) / dq;
        let fp = (p - p0) / dp;
        if fq < 0.0 || fp < 0.0 || fq > (spec.nq - 1) as f64 || fp > (spec.np - 1) as f64 {
            continue;
        }
        let iq = (fq.floor() as usize).min(spec.nq - 2);
        let ip = (fp.floor() as usize).min(spec.np - 2);
        let (tq, tp) = (fq - iq as f64, fp - ip as f64);
        let base = (ip * spec.nq + iq) as u32;
        let nq = spec.nq as u32;
        out.push((base, (1.0 - tq) * (1.0 - tp) * dp));
        out.push((base + 1, tq * (1.0 - tp) * dp));
        out.push((base + nq, (1.0 - tq) * tp * dp));
        out.push((base + nq + 1, tq * tp * dp));
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..std::f64::consts::PI).contains(&theta) {
        return Err(Error::invalid(format!("projection angle {theta} outside [0, π)")));
    }
    Ok(())
}

/// Projection of a grid distribution along the axis rotated by θ, normalized
/// to unit sum×Δx.
pub fn project_grid(grid: &PhaseSpaceGrid, theta: f64, xs: &[f64]) -> Result<Vec<f64>> {
    check_theta(theta)?;
    let dx = uniform_spacing(xs)?;
    let mut row = Vec::new();
    let mut pr = Vec::with_capacity(xs.len());
    for &x in xs {
        line_entries(&grid.spec, theta, x, &mut row);
        pr.push(row.iter().map(|&(i, w)| w * grid.values[i as usize]).sum::<f64>());
    }
    let total: f64 = pr.iter().sum::<f64>() * dx;
    if total <= 0.0 {
        return Err(Error::Normalization("projection has zero mass".into()));
    }
    for v in &mut pr {
        *v /= total;
    }
    Ok(pr)
}

/// Projection of an ensemble: histogram of q̄cosθ + p̄sinθ, normalized to
/// unit sum×Δx. Particles falling outside the x-grid are dropped.
pub fn project_ensemble(ens: &Ensemble, theta: f64, xs: &[f64]) -> Result<Vec<f64>> {
    check_theta(theta)?;
    ens.validate()?;
    let dx = uniform_spacing(xs)?;
    let (c, s) = (theta.cos(), theta.sin());
    let scale = ens.params.momentum_scale();
    let lo = xs[0] - 0.5 * dx;
    let mut counts = vec![0u64; xs.len()];
    let mut kept = 0u64;
    for (&x, &p) in ens.x.iter().zip(&ens.p) {
        let proj = x * c + (p / scale) * s;
        let f = (proj - lo) / dx;
        if f >= 0.0 && f < xs.len() as f64 {
            counts[f as usize] += 1;
            kept += 1;
        }
    }
    if kept == 0 {
        return Err(Error::invalid("no particles project onto the x-grid"));
    }
    let norm = kept as f64 * dx;
    Ok(counts.iter().map(|&c| c as f64 / norm).collect())
}

/// Sinogram of a grid distribution at the given angles.
pub fn sinogram_from_grid(grid: &PhaseSpaceGrid, angles: &[f64], xs: &[f64]) -> Result<Sinogram> {
    let values: Result<Vec<Vec<f64>>> =
        angles.iter().map(|&t| project_grid(grid, t, xs)).collect();
    Sinogram::new(angles.to_vec(), xs.to_vec(), values?, true)
}

/// Sinogram of an ensemble at the given angles.
pub fn sinogram_from_ensemble(ens: &Ensemble, angles: &[f64], xs: &[f64]) -> Result<Sinogram> {
    let values: Result<Vec<Vec<f64>>> =
        angles.iter().map(|&t| project_ensemble(ens, t, xs)).collect();
    Sinogram::new(angles.to_vec(), xs.to_vec(), values?, true)
}

/// Filtered back-projection output: the raw signed reconstruction plus the
/// nonnegative renormalized version used by the classical pipeline.
#[derive(Debug, Clone)]
pub struct FbpResult {
    pub raw: PhaseSpaceGrid,
    pub clipped: PhaseSpaceGrid,
    /// Fraction of total absolute mass removed by clipping at zero.
    pub clipped_mass_fraction: f64,
}

/// Filtered back-projection: P(q̄,p̄) = (1/2π²)·(π/N_θ)·Σ_i Δx·Σ_j w_j·
/// K(q̄cosθ_i + p̄sinθ_i − x_j)·pr(x_j,θ_i), with trapezoid weights w_j in x
/// and the kernel evaluated at exact offsets.
pub fn fbp_reconstruct(sino: &Sinogram, k_c: f64, spec: GridSpec) -> Result<FbpResult> {
    spec.validate()?;
    if sino.angles.len() < 2 {
        return Err(Error::invalid("need at least 2 projection angles"));
    }
    if !(k_c > 0.0) || !k_c.is_finite() {
        return Err(Error::invalid("k_c must be positive and finite"));
    }
    let n_x = sino.xs.len();
    let trig: Vec<(f64, f64)> = sino.angles.iter().map(|&t| (t.cos(), t.sin())).collect();
    let trig = &trig;
    let prefac = 0.5 / std::f64::consts::PI * (1.0 / sino.angles.len() as f64) * sino.dx;
    let dq = (spec.qmax - spec.qmin) / spec.nq as f64;
    let dp = (spec.pmax - spec.pmin) / spec.np as f64;
    let raw_values: Vec<f64> = (0..spec.np)
        .into_par_iter()
        .flat_map_iter(|ip| {
            let p = spec.pmin + (ip as f64 + 0.5) * dp;
            (0..spec.nq).map(move |iq| {
                let q = spec.qmin + (iq as f64 + 0.5) * dq;
                let mut acc = 0.0;
                for (i, &(c, s)) in trig.iter().enumerate() {
                    let proj = q * c + p * s;
                    let row = &sino.values[i];
                    let mut angle_acc = 0.0;
                    for (j, &pr) in row.iter().enumerate() {
                        let w = if j == 0 || j == n_x - 1 { 0.5 } else { 1.0 };
                        angle_acc += w * kernel_k(proj - sino.xs[j], k_c) * pr;
                    }
                    acc += angle_acc;
                }
                acc * prefac
            })
        })
        .collect();
    let raw = PhaseSpaceGrid { spec, values: raw_values, signed: true };
    let mut pos = 0.0;
    let mut neg = 0.0;
    for &v in &raw.values {
        if v >= 0.0 {
            pos += v;
        } else {
            neg -= v;
        }
    }
    let clipped_mass_fraction = if pos + neg > 0.0 { neg / (pos + neg) } else { 0.0 };
    let clipped_values: Vec<f64> = if pos > 0.0 {
        let norm = pos * dq * dp;
        raw.values.iter().map(|&v| v.max(0.0) / norm).collect()
    } else {
        vec![0.0; raw.values.len()]
    };
    let clipped = PhaseSpaceGrid { spec, values: clipped_values, signed: false };
    Ok(FbpResult { raw, clipped, clipped_mass_fraction })
}

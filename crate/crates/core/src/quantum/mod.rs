//! Single-particle quantum extension: 1D wave functions on uniform grids,
//! symmetric split-operator evolution, Wigner functions, time-of-flight
//! mapping, phase-space tomography of quantum states, and the quartic
//! squeezing study.

pub mod tof;
pub mod tomography;
pub mod wigner;

pub use tof::{tof_angle_stretch, tof_map_grid, tof_map_wavefunction, TofInfo};
pub use tomography::{
    quantum_tomography, signed_comparison, QuantumTomography, SignedComparison, TomographyOptions,
};
pub use wigner::wigner_from_wavefunction;

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::potential::Potential1D;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

// Spectral tail fraction beyond 0.9·k_Nyquist that flags an under-resolved
// state during evolution. Loose enough that a packet accelerating toward a
// grid edge trips the boundary monitor before the periodic-wrap tail does.
const NYQUIST_TAIL_LIMIT: f64 = 1e-8;

/// Complex amplitudes on a uniform spatial grid (endpoints included).
#[derive(Debug, Clone)]
pub struct WaveFunction1D {
    pub(crate) psi: Vec<Complex64>,
    pub(crate) xmin: f64,
    pub(crate) xmax: f64,
    pub(crate) time: f64,
    pub(crate) params: PhysicalParams,
}

impl WaveFunction1D {
    pub fn n(&self) -> usize {
        self.psi.len()
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / (self.psi.len() - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.x(i)).collect()
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.dx()
    }

    /// |ψ(x)|² on the grid.
    pub fn position_density(&self) -> Vec<f64> {
        self.psi.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Momentum density |ψ̃(k)|² on the FFT wavenumber lattice, returned in
    /// ascending k with Σ·Δk = 1.
    pub fn momentum_density(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let dx = self.dx();
        let mut buf = self.psi.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let dk = 2.0 * std::f64::consts::PI / (n as f64 * dx);
        let scale = dx * dx / (2.0 * std::f64::consts::PI);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let jj = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                (jj * dk, buf[j].norm_sqr() * scale)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pairs.into_iter().unzip()
    }

    /// Wavenumbers of the FFT lattice in FFT (wrapped) order.
    pub(crate) fn k_lattice(&self) -> Vec<f64> {
        let n = self.n();
        let dk = 2.0 * std::f64::consts::PI / (n as f64 * self.dx());
        (0..n)
            .map(|j| {
                let jj = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                jj * dk
            })
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = BufWriter::new(f);
        writeln!(w, "PSWF1 {} {} {} {}", self.n(), self.xmin, self.xmax, self.time)?;
        for c in &self.psi {
            writeln!(w, "{}\t{}", c.re, c.im)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, params: PhysicalParams) -> Result<WaveFunction1D> {
        let f = std::fs::File::open(path)?;
        let reader = BufReader::new(f);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty wave-function file".into()))??;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 5 || head[0] != "PSWF1" {
            return Err(Error::Format(format!("bad wave-function header: {header}")));
        }
        let n: usize = head[1].parse().map_err(|_| Error::Format("bad point count".into()))?;
        let xmin: f64 = head[2].parse().map_err(|_| Error::Format("bad xmin".into()))?;
        let xmax: f64 = head[3].parse().map_err(|_| Error::Format("bad xmax".into()))?;
        let time: f64 = head[4].parse().map_err(|_| Error::Format("bad time".into()))?;
        let mut psi = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("missing amplitude line {i}")))??;
            let mut it = line.split('\t');
            let re: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad amplitude at line {i}")))?;
            let im: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad amplitude at line {i}")))?;
            psi.push(Complex64::new(re, im));
        }
        let wf = WaveFunction1D { psi, xmin, xmax, time, params };
        let norm = wf.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Normalization(format!("loaded norm = {norm}")));
        }
        Ok(wf)
    }
}

fn build_grid(
    params: &PhysicalParams,
    sigma: f64,
    center: f64,
    k_extent: f64,
    n: usize,
    half_width: f64,
) -> Result<WaveFunction1D> {
    params.validate()?;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid("sigma must be positive"));
    }
    if n < 16 {
        return Err(Error::invalid("need at least 16 grid points"));
    }
    if !(half_width > 0.0) || 2.0 * half_width < 8.0 * sigma {
        return Err(Error::Resolution(format!(
            "grid span {} must cover at least 8σ = {}",
            2.0 * half_width,
            8.0 * sigma
        )));
    }
    if center.abs() + 4.0 * sigma > half_width {
        return Err(Error::Resolution(format!(
            "packet at {center} with 4σ tails does not fit inside ±{half_width}"
        )));
    }
    let dx = 2.0 * half_width / (n - 1) as f64;
    // The occupied band |k| + 4/σ must stay well inside the lattice Nyquist
    // limit; the factor π/4 leaves headroom for evolution.
    let band = k_extent.abs() + 4.0 / sigma;
    if band * dx >= std::f64::consts::FRAC_PI_4 {
        return Err(Error::Resolution(format!(
            "occupied band k = {band:.3e} needs Δx < {:.3e}, grid has {dx:.3e}",
            std::f64::consts::FRAC_PI_4 / band
        )));
    }
    Ok(WaveFunction1D {
        psi: vec![Complex64::new(0.0, 0.0); n],
        xmin: -half_width,
        xmax: half_width,
        time: 0.0,
        params: *params,
    })
}

/// Gaussian packet exp(−(x−center)²/2σ²), normalized numerically.
pub fn init_gaussian(
    params: &PhysicalParams,
    sigma: f64,
    center: f64,
    n: usize,
    half_width: f64,
) -> Result<WaveFunction1D> {
    let mut wf = build_grid(params, sigma, center, 0.0, n, half_width)?;
    for i in 0..n {
        let u = (wf.x(i) - center) / sigma;
        wf.psi[i] = Complex64::new((-0.5 * u * u).exp(), 0.0);
    }
    let norm = wf.norm().sqrt();
    for c in &mut wf.psi {
        *c /= norm;
    }
    Ok(wf)
}

/// Two-momentum superposition exp(−x²/2σ²)(e^{ikx} + e^{−ikx}), normalized
/// numerically. k = 0 reduces to the Gaussian ground-state packet.
pub fn init_superposition(
    params: &PhysicalParams,
    sigma: f64,
    k: f64,
    n: usize,
    half_width: f64,
) -> Result<WaveFunction1D> {
    let mut wf = build_grid(params, sigma, 0.0, k, n, half_width)?;
    for i in 0..n {
        let x = wf.x(i);
        let u = x / sigma;
        wf.psi[i] = Complex64::new(2.0 * (-0.5 * u * u).exp() * (k * x).cos(), 0.0);
    }
    let norm = wf.norm().sqrt();
    for c in &mut wf.psi {
        *c /= norm;
    }
    Ok(wf)
}

/// Largest step satisfying the split-operator phase bound
/// dt·(max kinetic + max |V|)/ħ < 0.1.
pub fn max_stable_dt(psi: &WaveFunction1D, pot: &Potential1D) -> f64 {
    let dx = psi.dx();
    let k_nyq = std::f64::consts::PI / dx;
    let kin_max = HBAR * HBAR * k_nyq * k_nyq / (2.0 * psi.params.mass);
    let v_max = (0..psi.n()).map(|i| pot.value(psi.x(i)).abs()).fold(0.0f64, f64::max);
    0.1 * HBAR / (kin_max + v_max)
}

struct SplitStepper {
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
    /// Kinetic half-step phases, with the 1/n inverse-FFT scale folded in.
    kin_half: Vec<Complex64>,
    kin_full: Vec<Complex64>,
    pot_phase: Vec<Complex64>,
    /// Spectral indices at or beyond 0.9·k_Nyquist.
    tail: Vec<usize>,
}

impl SplitStepper {
    fn new(psi: &WaveFunction1D, v: &[f64], dt: f64) -> SplitStepper {
        let n = psi.n();
        let mut planner = FftPlanner::new();
        let ks = psi.k_lattice();
        let mass = psi.params.mass;
        let inv_n = 1.0 / n as f64;
        let kin_half: Vec<Complex64> = ks
            .iter()
            .map(|&k| Complex64::from_polar(inv_n, -HBAR * k * k * dt / (4.0 * mass)))
            .collect();
        let kin_full: Vec<Complex64> = ks
            .iter()
            .map(|&k| Complex64::from_polar(inv_n, -HBAR * k * k * dt / (2.0 * mass)))
            .collect();
        let pot_phase: Vec<Complex64> =
            v.iter().map(|&vj| Complex64::from_polar(1.0, -vj * dt / HBAR)).collect();
        let k_edge = 0.9 * std::f64::consts::PI / psi.dx();
        let tail = ks.iter().enumerate().filter(|(_, k)| k.abs() >= k_edge).map(|(j, _)| j).collect();
        SplitStepper {
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            kin_half,
            kin_full,
            pot_phase,
            tail,
        }
    }

    // Checks that the occupied band has not reached the lattice edge (the
    // spectrum must stay meaningful under the k² phase map).
    fn check_tail(&self, buf: &[Complex64], time: f64) -> Result<()> {
        let total: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
        let tail: f64 = self.tail.iter().map(|&j| buf[j].norm_sqr()).sum();
        if tail > NYQUIST_TAIL_LIMIT * total {
            return Err(Error::Resolution(format!(
                "spectral occupancy {:.3e} beyond 0.9·k_Nyquist at t = {time:.6e} s",
                tail / total
            )));
        }
        Ok(())
    }

    fn check_boundary(&self, buf: &[Complex64], dx: f64, time: f64) -> Result<()> {
        let n = buf.len();
        let edge: f64 = buf[..4].iter().chain(buf[n - 4..].iter()).map(|c| c.norm_sqr()).sum();
        let prob = edge * dx;
        if prob > 1e-6 {
            return Err(Error::BoundaryBreach { time, probability: prob, cells: 4 });
        }
        Ok(())
    }

    // n_steps of K/2·V·K/2 with adjacent half-kinetic steps merged.
    fn run(&self, buf: &mut [Complex64], dx: f64, t0: f64, dt: f64, n_steps: usize) -> Result<()> {
        if n_steps == 0 {
            return Ok(());
        }
        self.fwd.process(buf);
        self.check_tail(buf, t0)?;
        for (b, k) in buf.iter_mut().zip(&self.kin_half) {
            *b *= k;
        }
        self.inv.process(buf);
        for s in 0..n_steps {
            for (b, v) in buf.iter_mut().zip(&self.pot_phase) {
                *b *= v;
            }
            self.fwd.process(buf);
            let t = t0 + (s + 1) as f64 * dt;
            self.check_tail(buf, t)?;
            let kin = if s + 1 < n_steps { &self.kin_full } else { &self.kin_half };
            for (b, k) in buf.iter_mut().zip(kin) {
                *b *= k;
            }
            self.inv.process(buf);
            self.check_boundary(buf, dx, t)?;
        }
        Ok(())
    }
}

/// Symmetric split-operator evolution (half-kinetic, potential, half-kinetic)
/// for `t_total` in steps of `dt` plus one remainder step.
pub fn evolve_schrodinger(
    psi: &WaveFunction1D,
    pot: &Potential1D,
    dt: f64,
    t_total: f64,
) -> Result<WaveFunction1D> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt must be positive and finite"));
    }
    if !(t_total >= 0.0) || !t_total.is_finite() {
        return Err(Error::invalid("t_total must be nonnegative and finite"));
    }
    let limit = max_stable_dt(psi, pot);
    if dt >= limit {
        return Err(Error::invalid(format!(
            "dt = {dt:.3e} exceeds the 0.1 rad/step phase bound {limit:.3e}"
        )));
    }
    let v: Vec<f64> = (0..psi.n()).map(|i| pot.value(psi.x(i))).collect();
    let n_full = (t_total / dt + 1e-9).floor() as usize;
    let remainder = t_total - n_full as f64 * dt;
    let mut out = psi.clone();
    let dx = out.dx();
    let stepper = SplitStepper::new(&out, &v, dt);
    stepper.run(&mut out.psi, dx, out.time, dt, n_full)?;
    if remainder > 1e-9 * dt {
        let rem_stepper = SplitStepper::new(&out, &v, remainder);
        rem_stepper.run(&mut out.psi, dx, out.time + n_full as f64 * dt, remainder, 1)?;
    }
    out.time += t_total;
    let norm = out.norm();
    let budget = 1e-9 * (n_full as f64 / 1e4).max(1.0);
    if (norm - 1.0).abs() > budget {
        return Err(Error::Normalization(format!(
            "norm drifted to {norm} after {n_full} steps (budget {budget:.3e})"
        )));
    }
    Ok(out)
}

/// Standard deviations of position and momentum, (Δx [m], Δp [kg·m/s]).
pub fn uncertainties(psi: &WaveFunction1D) -> (f64, f64) {
    let dx = psi.dx();
    let dens = psi.position_density();
    let mass: f64 = dens.iter().sum::<f64>() * dx;
    let mean: f64 = dens.iter().enumerate().map(|(i, d)| d * psi.x(i)).sum::<f64>() * dx / mass;
    let var: f64 = dens
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let u = psi.x(i) - mean;
            d * u * u
        })
        .sum::<f64>()
        * dx
        / mass;
    let (ks, kdens) = psi.momentum_density();
    let dk = ks[1] - ks[0];
    let kmass: f64 = kdens.iter().sum::<f64>() * dk;
    let kmean: f64 = ks.iter().zip(&kdens).map(|(k, d)| k * d).sum::<f64>() * dk / kmass;
    let kvar: f64 = ks
        .iter()
        .zip(&kdens)
        .map(|(k, d)| {
            let u = k - kmean;
            d * u * u
        })
        .sum::<f64>()
        * dk
        / kmass;
    (var.max(0.0).sqrt(), HBAR * kvar.max(0.0).sqrt())
}

/// Same uncertainties from a (possibly signed) phase-space grid in scaled
/// coordinates; Δp converted back to kg·m/s via mω₀.
pub fn grid_uncertainties(grid: &crate::tomography::PhaseSpaceGrid, params: &PhysicalParams) -> Result<(f64, f64)> {
    let mut mass = 0.0;
    let (mut mq, mut mp) = (0.0, 0.0);
    for ip in 0..grid.np() {
        for iq in 0..grid.nq() {
            let w = grid.at(iq, ip);
            mass += w;
            mq += w * grid.q_center(iq);
            mp += w * grid.p_center(ip);
        }
    }
    if mass <= 0.0 {
        return Err(Error::invalid("grid has nonpositive total mass"));
    }
    mq /= mass;
    mp /= mass;
    let (mut qq, mut pp) = (0.0, 0.0);
    for ip in 0..grid.np() {
        let p = grid.p_center(ip) - mp;
        for iq in 0..grid.nq() {
            let w = grid.at(iq, ip);
            let q = grid.q_center(iq) - mq;
            qq += w * q * q;
            pp += w * p * p;
        }
    }
    let dq_std = (qq / mass).max(0.0).sqrt();
    let dp_std = (pp / mass).max(0.0).sqrt() * params.momentum_scale();
    Ok((dq_std, dp_std))
}

/// Wave function zero-padded symmetrically to `factor`·n points at the same
/// spacing (for free expansion well beyond the original span).
pub fn zero_padded(psi: &WaveFunction1D, factor: usize) -> WaveFunction1D {
    let n = psi.n();
    let dx = psi.dx();
    let n_new = n * factor.max(1);
    let pad_left = (n_new - n) / 2;
    let mut new_psi = vec![Complex64::new(0.0, 0.0); n_new];
    new_psi[pad_left..pad_left + n].copy_from_slice(&psi.psi);
    let xmin = psi.xmin - pad_left as f64 * dx;
    WaveFunction1D {
        psi: new_psi,
        xmin,
        xmax: xmin + (n_new - 1) as f64 * dx,
        time: psi.time,
        params: psi.params,
    }
}

/// Knobs for the quartic squeezing study.
#[derive(Debug, Clone)]
pub struct SqueezingOptions {
    pub n: usize,
    pub half_width: f64,
    /// Initial displacement of the ground-state packet.
    pub shift: f64,
    /// Sweep length.
    pub t_max: f64,
    /// Split step; 0 selects 0.8× the stability bound.
    pub dt: f64,
    /// Δx is sampled this long after each return to the initial turning
    /// point, where the packet is slowest and narrowest.
    pub sample_offset: f64,
    /// Dense recording interval for Δx(t), Δp(t), ⟨x⟩(t).
    pub record_dt: f64,
}

impl Default for SqueezingOptions {
    fn default() -> Self {
        SqueezingOptions {
            n: 2048,
            half_width: 120e-6,
            shift: 15e-6,
            t_max: 150e-3,
            dt: 0.0,
            sample_offset: 3e-3,
            record_dt: 0.25e-3,
        }
    }
}

/// Dense traces plus per-oscillation samples from a squeezing sweep.
#[derive(Debug, Clone)]
pub struct SqueezingResult {
    pub times: Vec<f64>,
    pub dx: Vec<f64>,
    pub dp: Vec<f64>,
    pub mean_x: Vec<f64>,
    /// Sampling instants (turning-point passages + offset) and Δx there.
    pub sample_times: Vec<f64>,
    pub sample_dx: Vec<f64>,
    /// Sample with the smallest Δx.
    pub best_time: f64,
    /// min sampled Δx / Δx(0).
    pub best_ratio: f64,
    /// Oscillation period from ⟨x⟩ zero crossings.
    pub period: f64,
    /// (measured period − 2π/ω₀) / (2π/ω₀).
    pub period_shift_fraction: f64,
}

/// Releases a displaced ground-state packet in `pot` and tracks uncertainty
/// evolution. Δx develops local minima shortly after each return to the
/// release point; those per-oscillation samples locate the squeezing optimum.
pub fn squeezing_run(
    params: &PhysicalParams,
    pot: &Potential1D,
    opts: &SqueezingOptions,
) -> Result<SqueezingResult> {
    if !(opts.t_max > 0.0) || !(opts.record_dt > 0.0) || opts.record_dt > opts.t_max {
        return Err(Error::invalid("need 0 < record_dt ≤ t_max"));
    }
    if opts.shift == 0.0 {
        return Err(Error::invalid("squeezing requires a nonzero displacement"));
    }
    let sigma = (HBAR / (params.mass * params.omega0)).sqrt();
    let psi0 = init_gaussian(params, sigma, opts.shift, opts.n, opts.half_width)?;
    let dt = if opts.dt > 0.0 { opts.dt } else { 0.8 * max_stable_dt(&psi0, pot) };
    let n_rec = (opts.t_max / opts.record_dt).ceil() as usize;
    let mut times = Vec::with_capacity(n_rec + 1);
    let mut dxs = Vec::with_capacity(n_rec + 1);
    let mut dps = Vec::with_capacity(n_rec + 1);
    let mut means = Vec::with_capacity(n_rec + 1);
    let record = |wf: &WaveFunction1D, times: &mut Vec<f64>, dxs: &mut Vec<f64>, dps: &mut Vec<f64>, means: &mut Vec<f64>| {
        let (dx_u, dp_u) = uncertainties(wf);
        let dens = wf.position_density();
        let mass: f64 = dens.iter().sum();
        let mean: f64 = dens.iter().enumerate().map(|(i, d)| d * wf.x(i)).sum::<f64>() / mass;
        times.push(wf.time);
        dxs.push(dx_u);
        dps.push(dp_u);
        means.push(mean);
    };
    let mut cur = psi0;
    record(&cur, &mut times, &mut dxs, &mut dps, &mut means);
    for r in 1..=n_rec {
        let target = (r as f64 * opts.record_dt).min(opts.t_max);
        cur = evolve_schrodinger(&cur, pot, dt, target - cur.time)?;
        record(&cur, &mut times, &mut dxs, &mut dps, &mut means);
    }
    // Passages of the packet center through the release-side turning point:
    // local maxima of ⟨x⟩ on the displaced side (t = 0 included). Interior
    // maxima are refined by the vertex of the parabola through the three
    // surrounding record points, removing the record-grid snap bias.
    let side = opts.shift.signum();
    let gate = 0.25 * opts.shift.abs();
    let mut sample_times = Vec::new();
    for i in 0..times.len() {
        let prev = if i == 0 { f64::NEG_INFINITY } else { side * means[i - 1] };
        let next = if i + 1 == times.len() { f64::NEG_INFINITY } else { side * means[i + 1] };
        let here = side * means[i];
        if here > gate && here >= prev && here >= next {
            let mut t_peak = times[i];
            if i > 0 && i + 1 < times.len() {
                let (h0, h1) = (times[i] - times[i - 1], times[i + 1] - times[i]);
                let denom = prev - 2.0 * here + next;
                if (h0 - h1).abs() < 1e-9 * h0 && denom < 0.0 {
                    let off = 0.5 * h0 * (prev - next) / denom;
                    t_peak += off.clamp(-0.5 * h0, 0.5 * h0);
                }
            }
            let t = t_peak + opts.sample_offset;
            if t <= opts.t_max {
                sample_times.push(t);
            }
        }
    }
    if sample_times.len() < 2 {
        return Err(Error::invalid(format!(
            "only {} turning-point samples in {} s; extend t_max",
            sample_times.len(),
            opts.t_max
        )));
    }
    let interp = |t: f64| -> f64 {
        let i = times.partition_point(|&v| v < t).clamp(1, times.len() - 1);
        let w = (t - times[i - 1]) / (times[i] - times[i - 1]);
        dxs[i - 1] * (1.0 - w) + dxs[i] * w
    };
    let sample_dx: Vec<f64> = sample_times.iter().map(|&t| interp(t)).collect();
    let (best_idx, best) = sample_dx
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let period = crate::numeric::zero_crossing_period(&times, &means)?;
    let t0 = 2.0 * std::f64::consts::PI / params.omega0;
    Ok(SqueezingResult {
        best_time: sample_times[best_idx],
        best_ratio: best / dxs[0],
        period,
        period_shift_fraction: (period - t0) / t0,
        times,
        dx: dxs,
        dp: dps,
        mean_x: means,
        sample_times,
        sample_dx,
    })
}

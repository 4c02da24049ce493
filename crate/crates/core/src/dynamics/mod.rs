//! Classical ensemble dynamics: thermal sampling, symplectic integration,
//! stochastic binary collisions, and oscillation-period analytics.

pub mod collisions;
pub mod period;

pub use collisions::{collision_step, CollisionStats};
pub use period::{
    frequency_shift_curve, period_direct, period_perturbative, FrequencyShiftCurve, PeriodMode,
};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::potential::Potential1D;
use crate::rng::stream;
use rand_distr::{Distribution, Exp, Normal};
use rayon::prelude::*;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Classical particle set: longitudinal phase space plus a scalar transverse
/// thermal energy (two transverse degrees of freedom, positions untracked).
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    /// Longitudinal positions [m].
    pub x: Vec<f64>,
    /// Longitudinal momenta [kg·m/s].
    pub p: Vec<f64>,
    /// Transverse thermal energy per particle [J], nonnegative.
    pub e_perp: Vec<f64>,
    /// Elapsed evolution time [s].
    pub time: f64,
    /// Seed of the stream that sampled this ensemble.
    pub seed: u64,
    /// Seeded sampling passes consumed so far (keys derived streams).
    pub draw_count: u64,
    pub params: PhysicalParams,
}

/// Centroid and central second moments in scaled coordinates
/// (q̄ = x, p̄ = p/mω0, both in meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_q: f64,
    pub mean_p: f64,
    pub cov_qq: f64,
    pub cov_qp: f64,
    pub cov_pp: f64,
}

impl Moments {
    /// Area of the 2σ covariance ellipse, 4π·√det(cov) [m²].
    pub fn two_sigma_area(&self) -> f64 {
        let det = self.cov_qq * self.cov_pp - self.cov_qp * self.cov_qp;
        4.0 * std::f64::consts::PI * det.max(0.0).sqrt()
    }
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.is_empty() {
            return Err(Error::invalid("ensemble must hold at least one particle"));
        }
        if self.x.len() != self.p.len() || self.x.len() != self.e_perp.len() {
            return Err(Error::invalid("ensemble component lengths differ"));
        }
        for i in 0..self.x.len() {
            if !self.x[i].is_finite() || !self.p[i].is_finite() || !self.e_perp[i].is_finite() {
                return Err(Error::invalid(format!("non-finite particle state at {i}")));
            }
            if self.e_perp[i] < 0.0 {
                return Err(Error::invalid(format!("negative transverse energy at {i}")));
            }
        }
        self.params.validate()
    }

    /// Total longitudinal energy per particle, p²/2m + V(x).
    pub fn energies(&self, pot: &Potential1D) -> Vec<f64> {
        let m = self.params.mass;
        self.x
            .iter()
            .zip(self.p.iter())
            .map(|(&x, &p)| p * p / (2.0 * m) + pot.value(x))
            .collect()
    }

    /// Centroid and central second moments over (q̄, p̄).
    pub fn moments(&self) -> Moments {
        let n = self.len() as f64;
        let scale = self.params.momentum_scale();
        let (mut mq, mut mp) = (0.0, 0.0);
        for i in 0..self.len() {
            mq += self.x[i];
            mp += self.p[i] / scale;
        }
        mq /= n;
        mp /= n;
        let (mut qq, mut qp, mut pp) = (0.0, 0.0, 0.0);
        for i in 0..self.len() {
            let dq = self.x[i] - mq;
            let dp = self.p[i] / scale - mp;
            qq += dq * dq;
            qp += dq * dp;
            pp += dp * dp;
        }
        Moments {
            mean_q: mq,
            mean_p: mp,
            cov_qq: qq / n,
            cov_qp: qp / n,
            cov_pp: pp / n,
        }
    }

    /// Text snapshot: `# N=<n> t=<seconds> seed=<u64>` then `x<TAB>p<TAB>e_perp`.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "# N={} t={} seed={}", self.len(), self.time, self.seed)?;
        for i in 0..self.len() {
            writeln!(w, "{}\t{}\t{}", self.x[i], self.p[i], self.e_perp[i])?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, params: PhysicalParams) -> Result<Ensemble> {
        let reader = BufReader::new(std::fs::File::open(&path)?);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty snapshot file".into()))??;
        let rest = header
            .strip_prefix("# ")
            .ok_or_else(|| Error::Format("snapshot header must start with '# '".into()))?;
        let mut n = None;
        let mut time = None;
        let mut seed = None;
        for field in rest.split_whitespace() {
            if let Some(v) = field.strip_prefix("N=") {
                n = Some(v.parse::<usize>().map_err(|e| Error::Format(e.to_string()))?);
            } else if let Some(v) = field.strip_prefix("t=") {
                time = Some(v.parse::<f64>().map_err(|e| Error::Format(e.to_string()))?);
            } else if let Some(v) = field.strip_prefix("seed=") {
                seed = Some(v.parse::<u64>().map_err(|e| Error::Format(e.to_string()))?);
            }
        }
        let (n, time, seed) = match (n, time, seed) {
            (Some(n), Some(t), Some(s)) => (n, t, s),
            _ => return Err(Error::Format("snapshot header missing N=, t= or seed=".into())),
        };
        let mut ens = Ensemble {
            x: Vec::with_capacity(n),
            p: Vec::with_capacity(n),
            e_perp: Vec::with_capacity(n),
            time,
            seed,
            draw_count: 1,
            params,
        };
        for line in lines {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split('\t');
            let mut next = || -> Result<f64> {
                it.next()
                    .ok_or_else(|| Error::Format("snapshot row needs x, p, e_perp".into()))?
                    .parse::<f64>()
                    .map_err(|e| Error::Format(e.to_string()))
            };
            ens.x.push(next()?);
            ens.p.push(next()?);
            ens.e_perp.push(next()?);
        }
        if ens.len() != n {
            return Err(Error::Format(format!(
                "snapshot declares {} particles but holds {}",
                n,
                ens.len()
            )));
        }
        ens.validate()?;
        Ok(ens)
    }
}

/// Samples a thermal equilibrium ensemble of a harmonic trap centered at
/// `x_shift`: positions N(x_shift, kBT/mω0²), momenta N(0, mkBT), transverse
/// energies exponential with mean kBT (two degrees of freedom).
pub fn sample_ensemble(
    params: &PhysicalParams,
    x_shift: f64,
    n: usize,
    seed: u64,
) -> Result<Ensemble> {
    params.validate()?;
    if n == 0 {
        return Err(Error::invalid("ensemble size must be at least 1"));
    }
    if !x_shift.is_finite() {
        return Err(Error::invalid("x_shift must be finite"));
    }
    let mut rng = stream(seed, &[]);
    let pos = Normal::new(x_shift, params.sigma_x()).map_err(|e| Error::invalid(e.to_string()))?;
    let mom = Normal::new(0.0, params.sigma_p()).map_err(|e| Error::invalid(e.to_string()))?;
    let perp =
        Exp::new(1.0 / params.thermal_energy()).map_err(|e| Error::invalid(e.to_string()))?;
    let mut ens = Ensemble {
        x: Vec::with_capacity(n),
        p: Vec::with_capacity(n),
        e_perp: Vec::with_capacity(n),
        time: 0.0,
        seed,
        draw_count: 1,
        params: params.clone(),
    };
    for _ in 0..n {
        ens.x.push(pos.sample(&mut rng));
        ens.p.push(mom.sample(&mut rng));
        ens.e_perp.push(perp.sample(&mut rng));
    }
    Ok(ens)
}

/// Advances every particle by velocity-Verlet for `t_total` (whole steps of
/// `dt` plus one shorter final step). Particles are independent, so the loop
/// parallelizes per particle with bitwise-reproducible results.
pub fn integrate(ens: &Ensemble, pot: &Potential1D, dt: f64, t_total: f64) -> Result<Ensemble> {
    ens.validate()?;
    let omega0 = ens.params.omega0;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt must be positive and finite"));
    }
    if dt > 2.0 * std::f64::consts::PI / (50.0 * omega0) {
        return Err(Error::invalid(format!(
            "dt = {dt:e} exceeds 2π/(50ω0) = {:e}: fewer than 50 steps per period",
            2.0 * std::f64::consts::PI / (50.0 * omega0)
        )));
    }
    if !(t_total >= 0.0) || !t_total.is_finite() {
        return Err(Error::invalid("t_total must be nonnegative and finite"));
    }
    let m = ens.params.mass;
    let n_full = (t_total / dt).floor() as u64;
    let rem = t_total - n_full as f64 * dt;
    let rem = if rem > 1e-9 * dt { Some(rem) } else { None };

    let moved: Vec<(f64, f64)> = ens
        .x
        .par_iter()
        .zip(ens.p.par_iter())
        .map(|(&x0, &p0)| {
            let mut x = x0;
            let mut v = p0 / m;
            let mut a = pot.eval(x).1 / m;
            let step = |x: &mut f64, v: &mut f64, a: &mut f64, h: f64| {
                *x += *v * h + 0.5 * *a * h * h;
                let a_new = pot.eval(*x).1 / m;
                *v += 0.5 * (*a + a_new) * h;
                *a = a_new;
            };
            for _ in 0..n_full {
                step(&mut x, &mut v, &mut a, dt);
            }
            if let Some(h) = rem {
                step(&mut x, &mut v, &mut a, h);
            }
            (x, m * v)
        })
        .collect();

    let mut out = ens.clone();
    for (i, (x, p)) in moved.into_iter().enumerate() {
        out.x[i] = x;
        out.p[i] = p;
    }
    out.time += t_total;
    Ok(out)
}

/// Rotates the scaled phase space of every particle by +θ:
/// q̄ → q̄cosθ − p̄sinθ, p̄ → p̄cosθ + q̄sinθ.
pub fn phase_rotation(ens: &Ensemble, theta: f64) -> Ensemble {
    let scale = ens.params.momentum_scale();
    let (s, c) = theta.sin_cos();
    let mut out = ens.clone();
    for i in 0..out.len() {
        let q = ens.x[i];
        let pb = ens.p[i] / scale;
        out.x[i] = q * c - pb * s;
        out.p[i] = (pb * c + q * s) * scale;
    }
    out
}

/// Advances each particle's phase-space angle by −(ω0 + δω(E))·t at fixed
/// radius, with E = p²/2m + V(x) (corrugation included) looked up in the
/// frequency-shift curve. The fast surrogate for `integrate` over long holds.
pub fn angle_evolution(
    ens: &Ensemble,
    pot: &Potential1D,
    curve: &FrequencyShiftCurve,
    t: f64,
) -> Result<Ensemble> {
    ens.validate()?;
    if !t.is_finite() {
        return Err(Error::invalid("evolution time must be finite"));
    }
    let omega0 = ens.params.omega0;
    let scale = ens.params.momentum_scale();
    let m = ens.params.mass;
    let mut out = ens.clone();
    for i in 0..ens.len() {
        let energy = ens.p[i] * ens.p[i] / (2.0 * m) + pot.value(ens.x[i]);
        let shift = curve.eval(energy)?;
        let q = ens.x[i];
        let pb = ens.p[i] / scale;
        let r = q.hypot(pb);
        let theta = pb.atan2(q) - omega0 * (1.0 + shift) * t;
        out.x[i] = r * theta.cos();
        out.p[i] = r * theta.sin() * scale;
    }
    out.time += t;
    Ok(out)
}

/// Spread (max − min) of the corrugation-induced angular velocities δω(E)
/// across the ensemble [rad/s]. Multiplied by the hold time this is the
/// accumulated angular dispersion Δθ of the evolving distribution.
pub fn angular_dispersion_rate(
    ens: &Ensemble,
    pot: &Potential1D,
    curve: &FrequencyShiftCurve,
) -> Result<f64> {
    ens.validate()?;
    let m = ens.params.mass;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..ens.len() {
        let energy = ens.p[i] * ens.p[i] / (2.0 * m) + pot.value(ens.x[i]);
        let shift = curve.eval(energy)?;
        lo = lo.min(shift);
        hi = hi.max(shift);
    }
    Ok((hi - lo) * ens.params.omega0)
}

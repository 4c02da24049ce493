//! Discrete Wigner transform of a 1D wave function.

use super::WaveFunction1D;
use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::tomography::{GridSpec, PhaseSpaceGrid};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

/// W(x, p) = (1/2πħ) ∫ dη ψ*(x + η/2) ψ(x − η/2) e^{ipη/ħ}, evaluated with
/// η on the doubled lattice (step 2Δx) so both arguments stay on grid points.
///
/// The result is a signed phase-space density over (q, p̄ = p/mω₀): q cells
/// are centered on the wave-function lattice, p̄ cells on the conjugate
/// lattice with Δp = πħ/(nΔx), and both marginals match |ψ|² exactly up to
/// rounding. Momenta occupied beyond ±πħ/(2Δx) would alias; the π/4 band
/// limit enforced at state construction keeps occupation well inside.
pub fn wigner_from_wavefunction(psi: &WaveFunction1D) -> Result<PhaseSpaceGrid> {
    let n = psi.n();
    if n % 2 != 0 {
        return Err(Error::invalid("Wigner transform needs an even point count"));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization(format!("wave-function norm = {norm}")));
    }
    let dx = psi.dx();
    let scale = psi.params.momentum_scale();
    let dp_bar = std::f64::consts::PI * HBAR / (n as f64 * dx * scale);
    // (1/2πħ)·(dη = 2Δx) into a (q, p̄) density: extra factor mω₀.
    let prefactor = dx / (std::f64::consts::PI * HBAR) * scale;
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let half = n / 2;

    // Column iq of the output: W(x_iq, p̄) for every p̄, ascending.
    let columns: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|iq| {
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            let reach = iq.min(n - 1 - iq) as isize;
            for m in -reach..=reach {
                let j = m.rem_euclid(n as isize) as usize;
                let a = psi.psi[(iq as isize + m) as usize];
                let b = psi.psi[(iq as isize - m) as usize];
                buf[j] = a.conj() * b;
            }
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(&mut buf, &mut scratch);
            let peak = buf.iter().map(|c| c.re.abs()).fold(0.0f64, f64::max);
            let leak = buf.iter().map(|c| c.im.abs()).fold(0.0f64, f64::max);
            if leak > 1e-10 * peak.max(1e-300) {
                return Err(Error::Normalization(format!(
                    "imaginary residue {leak:.3e} in Wigner row (peak {peak:.3e})"
                )));
            }
            // FFT order → ascending momentum: output l ↔ frequency l − n·[l ≥ n/2].
            let mut col = vec![0.0; n];
            for (ip, c) in col.iter_mut().enumerate() {
                let l = (ip + half) % n;
                *c = prefactor * buf[l].re;
            }
            Ok(col)
        })
        .collect();

    let spec = GridSpec {
        nq: n,
        np: n,
        qmin: psi.xmin - 0.5 * dx,
        qmax: psi.xmax + 0.5 * dx,
        pmin: -(half as f64 + 0.5) * dp_bar,
        pmax: (half as f64 - 0.5) * dp_bar,
    };
    let mut values = vec![0.0; n * n];
    for (iq, col) in columns.into_iter().enumerate() {
        let col = col?;
        for (ip, v) in col.into_iter().enumerate() {
            values[ip * n + iq] = v;
        }
    }
    Ok(PhaseSpaceGrid { spec, values, signed: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PhysicalParams;
    use crate::potential::Potential1D;
    use crate::quantum::{evolve_schrodinger, init_gaussian, init_superposition, max_stable_dt};

    const UM: f64 = 1e-6;

    fn ground_sigma(p: &PhysicalParams) -> f64 {
        (HBAR / (p.mass * p.omega0)).sqrt()
    }

    #[test]
    fn ground_state_wigner_peaks_at_phase_space_purity_bound() {
        let p = PhysicalParams::rb87_default();
        let wf = init_gaussian(&p, ground_sigma(&p), 0.0, 256, 20.0 * UM).unwrap();
        let w = wigner_from_wavefunction(&wf).unwrap();
        let mut max = f64::NEG_INFINITY;
        let mut arg = (0, 0);
        for ip in 0..w.np() {
            for iq in 0..w.nq() {
                let v = w.at(iq, ip);
                if v > max {
                    max = v;
                    arg = (iq, ip);
                }
            }
        }
        let min = w.values().iter().cloned().fold(f64::INFINITY, f64::min);
        // Pure-state maximum 1/πħ, converted to the scaled (q, p̄) density.
        // The q lattice has no cell exactly at the origin (even n), so compare
        // against the closed form at the argmax cell center.
        let bound = p.mass * p.omega0 / (std::f64::consts::PI * HBAR);
        let sig2 = 0.5 * HBAR / (p.mass * p.omega0);
        let (qc, pc) = (w.q_center(arg.0), w.p_center(arg.1));
        let expect = bound * (-(qc * qc + pc * pc) / (2.0 * sig2)).exp();
        assert!((max / expect - 1.0).abs() < 1e-6, "peak {max} vs closed form {expect}");
        assert!(max < bound * (1.0 + 1e-9) && max > 0.995 * bound, "peak {max} vs bound {bound}");
        assert!(min > -1e-9 * max, "ground-state Wigner should be nonnegative, min {min}");
        let mass = w.total_mass();
        assert!((mass - 1.0).abs() < 1e-6, "total mass {mass}");
    }

    #[test]
    fn superposition_wigner_shows_interference_fringes_at_zero_momentum() {
        let p = PhysicalParams::rb87_default();
        let sigma = ground_sigma(&p);
        let k = std::f64::consts::PI * 1e6;
        let wf = init_superposition(&p, sigma, k, 512, 20.0 * UM).unwrap();
        let w = wigner_from_wavefunction(&wf).unwrap();
        let max = w.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // Row nearest p = 0 carries the cross term ∝ cos(2kx): deep negatives.
        let ip0 = (0..w.np())
            .min_by(|&a, &b| {
                w.p_center(a).abs().partial_cmp(&w.p_center(b).abs()).unwrap()
            })
            .unwrap();
        let row: Vec<f64> = (0..w.nq()).map(|iq| w.at(iq, ip0)).collect();
        let row_min = row.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(row_min < -0.5 * max, "fringe min {row_min} vs global max {max}");
        // Fringe wavelength π/k: nearest sign flips around x = 0 separated by ≈ π/2k.
        let iq0 = (0..w.nq())
            .min_by(|&a, &b| w.q_center(a).abs().partial_cmp(&w.q_center(b).abs()).unwrap())
            .unwrap();
        let mut flip = None;
        for step in 1..w.nq() - iq0 {
            if row[iq0 + step].signum() != row[iq0].signum() {
                flip = Some(step);
                break;
            }
        }
        let expect = std::f64::consts::FRAC_PI_4 / k / w.dq();
        let got = flip.expect("no sign flip found") as f64;
        assert!(
            (got - expect).abs() <= expect.ceil(),
            "first sign flip after {got} cells, expected ≈ {expect}"
        );
    }

    #[test]
    fn wigner_marginals_match_position_and_momentum_densities() {
        let p = PhysicalParams::rb87_default();
        let sigma = ground_sigma(&p);
        let k = std::f64::consts::PI * 1e6;
        let wf = init_superposition(&p, sigma, k, 512, 20.0 * UM).unwrap();
        let w = wigner_from_wavefunction(&wf).unwrap();
        let n = wf.n();
        let dens = wf.position_density();
        // Position marginal: Σ_p W·Δp̄ = |ψ(x)|² exactly (up to rounding).
        let dp = (w.spec().pmax - w.spec().pmin) / w.np() as f64;
        let mut l1 = 0.0;
        for iq in 0..n {
            let marg: f64 = (0..n).map(|ip| w.at(iq, ip)).sum::<f64>() * dp;
            l1 += (marg - dens[iq]).abs() * w.dq();
        }
        assert!(l1 < 1e-6, "position-marginal L1 {l1}");
        // Momentum marginal at the shared (even) lattice points.
        let (ks, kdens) = wf.momentum_density();
        let scale = p.mass * p.omega0;
        let mut l1k = 0.0;
        let mut massk = 0.0;
        for (kv, kd) in ks.iter().zip(&kdens) {
            // Every plain-FFT wavenumber lands on the (twice finer) p̄ lattice.
            let pbar = HBAR * kv / scale;
            let ip_f = pbar / dp + (n / 2) as f64;
            let ip = ip_f.round();
            assert!((ip_f - ip).abs() < 1e-6, "off-lattice momentum point {ip_f}");
            if ip < 0.0 || ip >= n as f64 {
                continue;
            }
            let ip = ip as usize;
            let marg: f64 = (0..n).map(|iq| w.at(iq, ip)).sum::<f64>() * w.dq();
            // Convert |ψ̃(k)|² (per rad/m) to per-p̄ density. Plain-FFT
            // wavenumbers land on every other row of the twice-finer p̄
            // lattice, so their quadrature weight is 2Δp̄.
            let expect = kd * scale / HBAR;
            l1k += (marg - expect).abs() * 2.0 * dp;
            massk += expect * 2.0 * dp;
        }
        assert!((massk - 1.0).abs() < 1e-6);
        assert!(l1k < 1e-6, "momentum-marginal L1 {l1k}");
    }

    #[test]
    fn harmonic_evolution_rotates_the_wigner_function() {
        let p = PhysicalParams::rb87_default();
        let pot = Potential1D::harmonic(p, 0.0).unwrap();
        let x0 = 5.0 * UM;
        let wf0 = init_gaussian(&p, ground_sigma(&p), x0, 256, 20.0 * UM).unwrap();
        let dt = 0.8 * max_stable_dt(&wf0, &pot);
        let angle = 0.7;
        let wf1 = evolve_schrodinger(&wf0, &pot, dt, angle / p.omega0).unwrap();
        let w1 = wigner_from_wavefunction(&wf1).unwrap();
        // Closed form: the coherent-state blob rigidly rotated clockwise.
        let sig2 = 0.5 * HBAR / (p.mass * p.omega0);
        let (qc, pc) = (x0 * angle.cos(), -x0 * angle.sin());
        let peak = p.mass * p.omega0 / (std::f64::consts::PI * HBAR);
        let mut num = 0.0;
        let mut den = 0.0;
        for ip in 0..w1.np() {
            for iq in 0..w1.nq() {
                let dq = w1.q_center(iq) - qc;
                let dpv = w1.p_center(ip) - pc;
                let expect = peak * (-(dq * dq + dpv * dpv) / (2.0 * sig2)).exp();
                let diff = w1.at(iq, ip) - expect;
                num += diff * diff;
                den += expect * expect;
            }
        }
        assert!((num / den).sqrt() < 1e-3, "closed-form L2 {}", (num / den).sqrt());
        // Same statement through grid rotation (bilinear resampling tolerance).
        let w0 = wigner_from_wavefunction(&wf0).unwrap();
        let rot = w0.rotated(-angle);
        let mut num_r = 0.0;
        for ip in 0..w1.np() {
            for iq in 0..w1.nq() {
                let diff = w1.at(iq, ip) - rot.at(iq, ip);
                num_r += diff * diff;
            }
        }
        assert!((num_r / den).sqrt() < 2e-2, "rotation L2 {}", (num_r / den).sqrt());
    }
}

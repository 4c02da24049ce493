//! Stochastic binary collisions: particles are binned into longitudinal
//! cells, every pair in a cell collides with probability σ_el·v_rel·dt/V,
//! and collisions redistribute the pair's relative energy isotropically in
//! 3D before projecting back onto (longitudinal velocity, transverse energy).
//!
//! The cell volume is V = cell_size · A_perp with A_perp = 2πkBT/(mω_perp²),
//! the thermal transverse cross-sectional area; this reproduces the measured
//! per-atom collision rate of a few per second at the reference conditions.

use super::Ensemble;
use crate::error::{Error, Result};
use crate::rng::stream;
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Bookkeeping from one collision sweep.
#[derive(Debug, Clone, Copy, Default)]
pub struct CollisionStats {
    pub events: u64,
    pub pairs_tested: u64,
    pub max_pair_probability: f64,
}

// One pair collision. COM longitudinal velocity is kept bitwise (the second
// momentum is reconstructed from the conserved total), the relative momentum
// magnitude is preserved and redirected along n̂, and the transverse share is
// split equally. Returns (v_i, v_j, e_i, e_j).
fn collide(
    v_i: f64,
    v_j: f64,
    e_i: f64,
    e_j: f64,
    mass: f64,
    n: [f64; 3],
) -> (f64, f64, f64, f64) {
    let mu = 0.5 * mass;
    let dvx = v_i - v_j;
    let p_rel_sq = mu * mu * dvx * dvx + mu * (e_i + e_j);
    let p_rel = p_rel_sq.sqrt();
    let pool = p_rel_sq / (2.0 * mu);
    let com_perp = 0.5 * (e_i + e_j);
    let p_total = mass * v_i + mass * v_j;
    let dvx_new = p_rel * n[0] / mu;
    let p_i_new = 0.5 * p_total + mu * dvx_new;
    let p_j_new = p_total - p_i_new;
    let long_new = pool * n[0] * n[0];
    let trans_new = (pool - long_new).max(0.0);
    let e_each = 0.5 * (com_perp + trans_new);
    (p_i_new / mass, p_j_new / mass, e_each, e_each)
}

struct CellOutcome {
    indices: Vec<usize>,
    v: Vec<f64>,
    e: Vec<f64>,
    /// Slots that collided at least once; only these are written back, so
    /// uncollided particles keep their momenta bitwise (p/m·m rounds).
    changed: Vec<bool>,
    stats: CollisionStats,
}

/// One collision sweep of duration `dt`. Cells are processed independently
/// with RNG streams keyed by (seed, cell index), so the result is identical
/// for any thread count. Per-pair probabilities ≥ 0.1 violate the scheme's
/// validity and are an error.
pub fn collision_step(
    ens: &Ensemble,
    dt: f64,
    cell_size: f64,
    seed: u64,
) -> Result<(Ensemble, CollisionStats)> {
    ens.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt must be positive and finite"));
    }
    if !(cell_size > 0.0) || !cell_size.is_finite() {
        return Err(Error::invalid("cell_size must be positive and finite"));
    }
    let p = &ens.params;
    let a_perp = 2.0 * std::f64::consts::PI * p.thermal_energy()
        / (p.mass * p.omega_perp * p.omega_perp);
    let volume = cell_size * a_perp;
    let rate_factor = p.sigma_el * dt / volume;
    let mass = p.mass;

    let mut cells: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &x) in ens.x.iter().enumerate() {
        cells.entry((x / cell_size).floor() as i64).or_default().push(i);
    }
    let cells: Vec<(i64, Vec<usize>)> = cells.into_iter().collect();

    let outcomes: Vec<Result<CellOutcome>> = cells
        .into_par_iter()
        .map(|(cell_id, indices)| {
            let mut rng = stream(seed, &[cell_id as u64]);
            let mut v: Vec<f64> = indices.iter().map(|&i| ens.p[i] / mass).collect();
            let mut e: Vec<f64> = indices.iter().map(|&i| ens.e_perp[i]).collect();
            let mut changed = vec![false; indices.len()];
            let mut stats = CollisionStats::default();
            for a in 0..indices.len() {
                for b in (a + 1)..indices.len() {
                    let dvx = v[a] - v[b];
                    let v_rel = (dvx * dvx + 2.0 * (e[a] + e[b]) / mass).sqrt();
                    let prob = rate_factor * v_rel;
                    stats.pairs_tested += 1;
                    stats.max_pair_probability = stats.max_pair_probability.max(prob);
                    if prob >= 0.1 {
                        return Err(Error::invalid(format!(
                            "pair collision probability {prob:.3} ≥ 0.1; reduce dt or grow cells"
                        )));
                    }
                    if rng.gen::<f64>() < prob {
                        let n: [f64; 3] = UnitSphere.sample(&mut rng);
                        let (vi, vj, ei, ej) = collide(v[a], v[b], e[a], e[b], mass, n);
                        v[a] = vi;
                        v[b] = vj;
                        e[a] = ei;
                        e[b] = ej;
                        changed[a] = true;
                        changed[b] = true;
                        stats.events += 1;
                    }
                }
            }
            Ok(CellOutcome { indices, v, e, changed, stats })
        })
        .collect();

    let mut out = ens.clone();
    let mut total = CollisionStats::default();
    for outcome in outcomes {
        let cell = outcome?;
        for (slot, &i) in cell.indices.iter().enumerate() {
            if cell.changed[slot] {
                out.p[i] = cell.v[slot] * mass;
                out.e_perp[i] = cell.e[slot];
            }
        }
        total.events += cell.stats.events;
        total.pairs_tested += cell.stats.pairs_tested;
        total.max_pair_probability = total.max_pair_probability.max(cell.stats.max_pair_probability);
    }
    Ok((out, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::sample_ensemble;
    use crate::params::PhysicalParams;

    #[test]
    fn zero_cross_section_changes_nothing() {
        let mut p = PhysicalParams::rb87_default();
        p.sigma_el = 0.0;
        let ens = sample_ensemble(&p, 0.0, 500, 3).unwrap();
        let (out, stats) = collision_step(&ens, 1e-3, 5e-6, 7).unwrap();
        assert_eq!(out.p, ens.p);
        assert_eq!(out.e_perp, ens.e_perp);
        assert_eq!(stats.events, 0);
        assert!(stats.pairs_tested > 0);
    }

    #[test]
    fn forced_collision_conserves_momentum_bitwise_for_opposite_pair() {
        let mass = PhysicalParams::rb87_default().mass;
        let mut rng = stream(99, &[]);
        for _ in 0..200 {
            let n: [f64; 3] = UnitSphere.sample(&mut rng);
            let v = 3.317e-3;
            let (vi, vj, _, _) = collide(v, -v, 1e-30, 2e-30, mass, n);
            assert_eq!(mass * vi + mass * vj, 0.0, "momentum not exactly zero");
        }
    }

    #[test]
    fn collision_kernel_conserves_pair_energy_to_rounding() {
        let mass = PhysicalParams::rb87_default().mass;
        let mut rng = stream(5, &[]);
        for _ in 0..1000 {
            let vi = 1e-2 * (rng.gen::<f64>() - 0.5);
            let vj = 1e-2 * (rng.gen::<f64>() - 0.5);
            let ei = 1e-29 * rng.gen::<f64>();
            let ej = 1e-29 * rng.gen::<f64>();
            let n: [f64; 3] = UnitSphere.sample(&mut rng);
            let (vi2, vj2, ei2, ej2) = collide(vi, vj, ei, ej, mass, n);
            let before = 0.5 * mass * (vi * vi + vj * vj) + ei + ej;
            let after = 0.5 * mass * (vi2 * vi2 + vj2 * vj2) + ei2 + ej2;
            assert!(
                (after - before).abs() <= 1e-12 * before,
                "energy {before:e} -> {after:e}"
            );
            assert!(ei2 >= 0.0 && ej2 >= 0.0);
        }
    }

    #[test]
    fn paper_conditions_reproduce_2_per_second_rate() {
        // N = 3000 at 160 nK in the 2π×110 Hz transverse trap: the measured
        // per-atom collision rate should be ≈2 s⁻¹ within factor 1.5.
        let p = PhysicalParams::rb87_default();
        let ens = sample_ensemble(&p, 0.0, 3000, 42).unwrap();
        let dt = 1e-3;
        let steps = 250;
        let mut current = ens;
        let mut events = 0;
        for s in 0..steps {
            let (next, stats) = collision_step(&current, dt, 5e-6, 1000 + s).unwrap();
            events += stats.events;
            current = next;
        }
        let per_atom = 2.0 * events as f64 / (3000.0 * dt * steps as f64);
        assert!(
            (1.33..3.0).contains(&per_atom),
            "per-atom rate = {per_atom:.2} s⁻¹ ({events} events)"
        );
    }

    #[test]
    fn sweep_is_deterministic_in_seed() {
        let p = PhysicalParams::rb87_default();
        let ens = sample_ensemble(&p, 0.0, 2000, 11).unwrap();
        let (a, sa) = collision_step(&ens, 1e-3, 5e-6, 5).unwrap();
        let (b, sb) = collision_step(&ens, 1e-3, 5e-6, 5).unwrap();
        assert_eq!(a.p, b.p);
        assert_eq!(a.e_perp, b.e_perp);
        assert_eq!(sa.events, sb.events);
        let (c, _) = collision_step(&ens, 1e-3, 5e-6, 6).unwrap();
        assert!(c.p != a.p || c.e_perp != a.e_perp);
    }

    #[test]
    fn oversized_pair_probability_is_rejected() {
        let mut p = PhysicalParams::rb87_default();
        p.sigma_el = 1e-6;
        let ens = sample_ensemble(&p, 0.0, 100, 2).unwrap();
        assert!(collision_step(&ens, 1e-3, 5e-6, 1).is_err());
    }
}

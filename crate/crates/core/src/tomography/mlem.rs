//! Multiplicative maximum-likelihood reconstruction (expectation-maximization
//! for Poisson projection data): P ← (P/s)·backproject(measured/forward(P)),
//! with sensitivity s = backproject(1). Forward and back projections use the
//! same sparse line weights, so they are exact transposes of each other.

use super::{line_entries, GridSpec, PhaseSpaceGrid, Sinogram};
use crate::error::{Error, Result};
use rayon::prelude::*;

// Forward projection of grid values through the sparse line operator; one row
// per angle, unnormalized (units: grid value × length).
fn forward(values: &[f64], spec: &GridSpec, angles: &[f64], xs: &[f64]) -> Vec<Vec<f64>> {
    angles
        .par_iter()
        .map(|&theta| {
            let mut row = Vec::new();
            xs.iter()
                .map(|&x| {
                    line_entries(spec, theta, x, &mut row);
                    row.iter().map(|&(i, w)| w * values[i as usize]).sum()
                })
                .collect()
        })
        .collect()
}

// Transpose of `forward`: scatters per-angle data back onto the grid.
// Per-angle accumulators are summed in angle order, so the result does not
// depend on thread scheduling.
fn backward(data: &[Vec<f64>], spec: &GridSpec, angles: &[f64], xs: &[f64]) -> Vec<f64> {
    let partials: Vec<Vec<f64>> = angles
        .par_iter()
        .zip(data.par_iter())
        .map(|(&theta, row_data)| {
            let mut acc = vec![0.0; spec.nq * spec.np];
            let mut row = Vec::new();
            for (&x, &y) in xs.iter().zip(row_data) {
                line_entries(spec, theta, x, &mut row);
                for &(i, w) in &row {
                    acc[i as usize] += w * y;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; spec.nq * spec.np];
    for part in partials {
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    total
}

/// Forward projections of a grid at the sinogram's angles and x-grid
/// (unnormalized line integrals); used to monitor data fit.
pub fn forward_model(grid: &PhaseSpaceGrid, sino: &Sinogram) -> Vec<Vec<f64>> {
    forward(&grid.values, &grid.spec, sino.angles(), sino.xs())
}

/// Kullback–Leibler divergence Σ m·ln(m/f) − m + f over all bins, with the
/// convention that m = 0 bins contribute only +f.
pub fn kl_divergence(measured: &[Vec<f64>], fitted: &[Vec<f64>]) -> f64 {
    let mut kl = 0.0;
    for (mr, fr) in measured.iter().zip(fitted) {
        for (&m, &f) in mr.iter().zip(fr) {
            if m > 0.0 {
                kl += m * (m / f.max(1e-300)).ln() - m + f;
            } else {
                kl += f;
            }
        }
    }
    kl
}

/// Expectation-maximization reconstruction from a uniform positive start.
/// The output is strictly nonnegative and normalized to unit mass; forward
/// projections approach the data monotonically in KL divergence.
pub fn mlem_reconstruct(sino: &Sinogram, n_iter: usize, spec: GridSpec) -> Result<PhaseSpaceGrid> {
    spec.validate()?;
    if n_iter == 0 {
        return Err(Error::invalid("n_iter must be ≥ 1"));
    }
    if sino.angles().len() < 2 {
        return Err(Error::invalid("need at least 2 projection angles"));
    }
    let angles = sino.angles();
    let xs = sino.xs();
    let n_cells = spec.nq * spec.np;
    let ones: Vec<Vec<f64>> = vec![vec![1.0; xs.len()]; angles.len()];
    let sensitivity = backward(&ones, &spec, angles, xs);
    let mut p = vec![1.0; n_cells];
    for (v, &s) in p.iter_mut().zip(&sensitivity) {
        if s == 0.0 {
            *v = 0.0;
        }
    }
    for _ in 0..n_iter {
        let fitted = forward(&p, &spec, angles, xs);
        let ratio: Vec<Vec<f64>> = sino
            .values()
            .iter()
            .zip(&fitted)
            .map(|(mr, fr)| {
                mr.iter()
                    .zip(fr)
                    .map(|(&m, &f)| if f > 0.0 { m / f } else { 0.0 })
                    .collect()
            })
            .collect();
        let update = backward(&ratio, &spec, angles, xs);
        for i in 0..n_cells {
            if sensitivity[i] > 0.0 {
                p[i] *= update[i] / sensitivity[i];
            }
        }
    }
    PhaseSpaceGrid::from_values(spec, p, false)?.normalized()
}

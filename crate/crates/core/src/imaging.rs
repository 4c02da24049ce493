//! Synthetic absorption imaging: ensemble → 2D optical-density image →
//! column-integrated profile → sinogram ingestion.

use crate::dynamics::Ensemble;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::tomography::Sinogram;
use rand_distr::{Distribution, Normal};
use std::collections::BTreeMap;
use std::io::{BufWriter, Write};
use std::path::Path;

/// 2D optical-density image on square pixels. Row index runs along the
/// transverse (integrated-out) axis, column index along the trap axis.
#[derive(Debug, Clone)]
pub struct DensityImage {
    /// pixels[row][col], optical-density units.
    pub pixels: Vec<Vec<f64>>,
    pub pixel_size: f64,
    /// Physical x of the left edge of column 0.
    pub x0: f64,
    /// Physical y of the bottom edge of row 0.
    pub y0: f64,
}

impl DensityImage {
    pub fn nrows(&self) -> usize {
        self.pixels.len()
    }

    pub fn ncols(&self) -> usize {
        self.pixels.first().map_or(0, |r| r.len())
    }

    /// Column-center x coordinates.
    pub fn xs(&self) -> Vec<f64> {
        (0..self.ncols()).map(|j| self.x0 + (j as f64 + 0.5) * self.pixel_size).collect()
    }

    /// Binary 8-bit PGM, linear map [0, max OD] → [0, 255], top row = +y.
    pub fn save_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let (nr, nc) = (self.nrows(), self.ncols());
        if nr == 0 || nc == 0 {
            return Err(Error::invalid("cannot export an empty image"));
        }
        let max = self.pixels.iter().flatten().cloned().fold(0.0f64, f64::max);
        let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
        let f = std::fs::File::create(path)?;
        let mut w = BufWriter::new(f);
        writeln!(w, "P5")?;
        writeln!(w, "# pixel_size_m={} od_per_level={}", self.pixel_size, max / 255.0)?;
        writeln!(w, "{nc} {nr}")?;
        writeln!(w, "255")?;
        for row in self.pixels.iter().rev() {
            let bytes: Vec<u8> =
                row.iter().map(|&v| (v.max(0.0) * scale).round().min(255.0) as u8).collect();
            w.write_all(&bytes)?;
        }
        w.flush()?;
        Ok(())
    }
}

// Normalized Gaussian tap weights out to 4σ.
fn gaussian_taps(sigma_px: f64) -> Vec<f64> {
    let r = (4.0 * sigma_px).ceil() as i64;
    let mut k: Vec<f64> =
        (-r..=r).map(|i| (-0.5 * (i as f64 / sigma_px).powi(2)).exp()).collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

// In-place separable convolution along one axis with half-sample-reflect
// boundary (mass-conserving).
fn blur_axis(img: &mut [Vec<f64>], taps: &[f64], along_rows: bool) {
    let nr = img.len();
    let nc = img[0].len();
    let r = (taps.len() / 2) as i64;
    let reflect = |i: i64, n: i64| -> usize {
        let mut i = i;
        loop {
            if i < 0 {
                i = -1 - i;
            } else if i >= n {
                i = 2 * n - 1 - i;
            } else {
                return i as usize;
            }
        }
    };
    if along_rows {
        let mut line = vec![0.0; nc];
        for row in img.iter_mut() {
            for (j, l) in line.iter_mut().enumerate() {
                *l = taps
                    .iter()
                    .enumerate()
                    .map(|(t, &k)| k * row[reflect(j as i64 + t as i64 - r, nc as i64)])
                    .sum();
            }
            row.copy_from_slice(&line);
        }
    } else {
        let mut line = vec![0.0; nr];
        for j in 0..nc {
            for (i, l) in line.iter_mut().enumerate() {
                *l = taps
                    .iter()
                    .enumerate()
                    .map(|(t, &k)| k * img[reflect(i as i64 + t as i64 - r, nr as i64)][j])
                    .sum();
            }
            for (i, l) in line.iter().enumerate() {
                img[i][j] = *l;
            }
        }
    }
}

/// Renders an ensemble as an absorption image: each particle keeps its
/// longitudinal x, draws a transverse coordinate thermally from the
/// transverse oscillator, and deposits weight 1/N into its pixel. The
/// histogram is then blurred by a Gaussian point-spread function of width
/// `psf_sigma` and, if `noise_rms > 0`, overlaid with white Gaussian noise.
pub fn render_absorption_image(
    ens: &Ensemble,
    psf_sigma: f64,
    pixel: f64,
    noise_rms: f64,
    seed: u64,
) -> Result<DensityImage> {
    ens.validate()?;
    if !(pixel > 0.0) || !pixel.is_finite() {
        return Err(Error::invalid("pixel size must be positive and finite"));
    }
    if !(psf_sigma >= 0.0) || !psf_sigma.is_finite() {
        return Err(Error::invalid("psf_sigma must be nonnegative and finite"));
    }
    if !(noise_rms >= 0.0) || !noise_rms.is_finite() {
        return Err(Error::invalid("noise_rms must be nonnegative and finite"));
    }
    let p = &ens.params;
    let sigma_y = (p.thermal_energy() / p.mass).sqrt() / p.omega_perp;
    let pad = 4.0 * psf_sigma + 2.0 * pixel;
    let xlo = ens.x.iter().cloned().fold(f64::INFINITY, f64::min);
    let xhi = ens.x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let x0 = ((xlo - pad) / pixel).floor() * pixel;
    let ncol = (((xhi + pad) - x0) / pixel).ceil() as usize;
    let half_rows = ((4.0 * sigma_y + pad) / pixel).ceil() as usize;
    let nrow = 2 * half_rows;
    let y0 = -(half_rows as f64) * pixel;

    let mut pixels = vec![vec![0.0; ncol]; nrow];
    let mut rng = stream(seed, &[0]);
    let transverse = Normal::new(0.0, sigma_y).map_err(|e| Error::invalid(e.to_string()))?;
    let w = 1.0 / ens.x.len() as f64;
    for &x in &ens.x {
        let y: f64 = transverse.sample(&mut rng);
        let col = (((x - x0) / pixel).floor() as usize).min(ncol - 1);
        let row = ((((y - y0) / pixel).floor() as i64).max(0) as usize).min(nrow - 1);
        pixels[row][col] += w;
    }
    if psf_sigma > 0.0 {
        let taps = gaussian_taps(psf_sigma / pixel);
        blur_axis(&mut pixels, &taps, true);
        blur_axis(&mut pixels, &taps, false);
    }
    if noise_rms > 0.0 {
        let mut noise_rng = stream(seed, &[1]);
        let noise = Normal::new(0.0, noise_rms).map_err(|e| Error::invalid(e.to_string()))?;
        for row in &mut pixels {
            for v in row.iter_mut() {
                *v += noise.sample(&mut noise_rng);
            }
        }
    }
    Ok(DensityImage { pixels, pixel_size: pixel, x0, y0 })
}

/// A column-integrated longitudinal density profile.
#[derive(Debug, Clone)]
pub struct ColumnDensity {
    /// Column-center coordinates.
    pub xs: Vec<f64>,
    /// Density, unit sum×Δx.
    pub values: Vec<f64>,
    pub dx: f64,
    /// Fraction of absolute mass that was negative (noise) and clamped.
    pub clipped_fraction: f64,
}

/// Sums the image along the transverse axis, clamps noise-induced negatives
/// at zero, and normalizes to unit sum×Δx.
pub fn column_integrate(img: &DensityImage) -> Result<ColumnDensity> {
    let (nr, nc) = (img.nrows(), img.ncols());
    if nr == 0 || nc == 0 {
        return Err(Error::invalid("empty image"));
    }
    let mut values = vec![0.0; nc];
    for row in &img.pixels {
        for (j, &v) in row.iter().enumerate() {
            values[j] += v;
        }
    }
    let neg: f64 = values.iter().filter(|v| **v < 0.0).map(|v| -v).sum();
    let pos: f64 = values.iter().filter(|v| **v > 0.0).map(|v| *v).sum();
    if pos <= 0.0 {
        return Err(Error::invalid("image has no positive column mass"));
    }
    let norm = pos * img.pixel_size;
    for v in &mut values {
        *v = v.max(0.0) / norm;
    }
    Ok(ColumnDensity {
        xs: img.xs(),
        values,
        dx: img.pixel_size,
        clipped_fraction: neg / (neg + pos),
    })
}

/// One measured profile tagged with its projection angle.
#[derive(Debug, Clone)]
pub struct Profile {
    pub theta: f64,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

/// Averages repeated profiles per angle, sorts by angle, normalizes each
/// average, and assembles a Sinogram. All profiles must share one x-grid.
pub fn ingest_projection_stack(profiles: &[Profile]) -> Result<Sinogram> {
    if profiles.is_empty() {
        return Err(Error::invalid("no profiles to ingest"));
    }
    let xs = &profiles[0].xs;
    let mut groups: BTreeMap<u64, (f64, Vec<f64>, usize)> = BTreeMap::new();
    for (i, pr) in profiles.iter().enumerate() {
        if !pr.theta.is_finite() || pr.theta < 0.0 {
            return Err(Error::invalid(format!("profile {i}: bad angle {}", pr.theta)));
        }
        if pr.values.len() != pr.xs.len() {
            return Err(Error::invalid(format!(
                "profile {i}: {} values on {} grid points",
                pr.values.len(),
                pr.xs.len()
            )));
        }
        if pr.xs.len() != xs.len() || pr.xs.iter().zip(xs).any(|(a, b)| a != b) {
            return Err(Error::GridMismatch(format!(
                "profile {i} (angle {}) uses a different x-grid",
                pr.theta
            )));
        }
        // Nonnegative angle bits order like the floats themselves.
        let entry =
            groups.entry(pr.theta.to_bits()).or_insert_with(|| (pr.theta, vec![0.0; xs.len()], 0));
        for (acc, &v) in entry.1.iter_mut().zip(&pr.values) {
            *acc += v;
        }
        entry.2 += 1;
    }
    if groups.len() < 2 {
        return Err(Error::invalid("need at least 2 distinct angles"));
    }
    let mut angles = Vec::with_capacity(groups.len());
    let mut rows = Vec::with_capacity(groups.len());
    let dx = xs[1] - xs[0];
    for (_, (theta, mut sum, count)) in groups {
        let total: f64 = sum.iter().sum::<f64>() * dx / count as f64;
        if total <= 0.0 {
            return Err(Error::Normalization(format!("profiles at angle {theta} sum to zero")));
        }
        for v in &mut sum {
            *v /= count as f64 * total;
        }
        angles.push(theta);
        rows.push(sum);
    }
    Sinogram::new(angles, xs.clone(), rows, true)
}

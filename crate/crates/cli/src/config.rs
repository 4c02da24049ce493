//! Flat `key = value` experiment configuration with `[section]` headers.
//!
//! Every key has a default except `experiment.kind`, so a two-line file is a
//! valid run. Unknown keys are rejected to catch typos. All quantities are
//! converted to SI on load; the raw file bytes are hashed (FNV-1a, 64 bit)
//! into the run report so artifacts can be traced to an exact configuration.

use anyhow::{bail, Context, Result};
use phasetomo_core::PhysicalParams;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

const UM: f64 = 1e-6;
const NM_KB: f64 = 1e-9; // nK → K

/// The six runnable pipelines; subcommands mirror these one-to-one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ClassicalOscillation,
    HarmonicControl,
    QuantumWigner,
    Squeezing,
    CorrugationScan,
    PeriodAnalysis,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::ClassicalOscillation => "classical_oscillation",
            ExperimentKind::HarmonicControl => "harmonic_control",
            ExperimentKind::QuantumWigner => "quantum_wigner",
            ExperimentKind::Squeezing => "squeezing",
            ExperimentKind::CorrugationScan => "corrugation_scan",
            ExperimentKind::PeriodAnalysis => "period_analysis",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "classical_oscillation" => ExperimentKind::ClassicalOscillation,
            "harmonic_control" => ExperimentKind::HarmonicControl,
            "quantum_wigner" => ExperimentKind::QuantumWigner,
            "squeezing" => ExperimentKind::Squeezing,
            "corrugation_scan" => ExperimentKind::CorrugationScan,
            "period_analysis" => ExperimentKind::PeriodAnalysis,
            other => bail!("unknown experiment kind {other:?}"),
        })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct RunSection {
    /// Oscillation / hold time [s].
    pub t1: f64,
    /// Verlet step [s].
    pub dt: f64,
    pub n_angles: usize,
    pub collisions: bool,
    /// Collision cell length [m].
    pub cell_size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrugationKind {
    None,
    Synth,
}

#[derive(Debug, Clone)]
pub struct PotentialSection {
    pub corrugation: CorrugationKind,
    pub corrugation_scale: f64,
    /// Rescale the corrugation so the frequency-shift span over the ensemble
    /// energy band equals the reference dispersion width 0.024·ω0.
    pub normalize_span: bool,
    /// Quartic length scale w [m]; 0 disables the quartic term.
    pub quartic_scale: f64,
}

#[derive(Debug, Clone)]
pub struct EnsembleSection {
    pub n: usize,
    pub seed: u64,
    /// Release displacement [m].
    pub shift: f64,
}

#[derive(Debug, Clone)]
pub struct ImagingSection {
    pub psf_sigma: f64,
    pub pixel: f64,
    /// White-noise rms as a fraction of the noiseless image peak, so the
    /// signal-to-noise ratio is the same for compact and dispersed clouds.
    pub noise_frac_of_peak: f64,
    /// Shots averaged per projection angle.
    pub repeats: usize,
}

#[derive(Debug, Clone)]
pub struct TomographySection {
    pub k_c: f64,
    pub grid_n: usize,
    pub grid_half: f64,
    pub mlem_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct QuantumSection {
    pub n_points: usize,
    pub half_width: f64,
    /// Wavenumber of the ±k superposition [rad/m].
    pub momentum: f64,
    pub n_angles: usize,
    pub t_f: f64,
    pub k_c: f64,
    pub sample_half: f64,
    pub sample_points: usize,
    pub out_n: usize,
    pub out_half: f64,
}

#[derive(Debug, Clone)]
pub struct SqueezingSection {
    pub quartic_scale: f64,
    pub shift: f64,
    pub t_max: f64,
    pub n_points: usize,
    pub half_width: f64,
    pub dt: f64,
    pub sample_offset: f64,
    pub record_dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireDefect {
    /// Independent sinusoidal modulation of both edges.
    EdgeModulation,
    /// In-phase transverse shift of the whole wire (lithography stitch).
    Stitch,
}

#[derive(Debug, Clone)]
pub struct WireSection {
    pub defect: WireDefect,
    pub wavelength: f64,
    pub amplitude: f64,
    pub distance: f64,
    pub current: f64,
    pub scan_distances: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodMode {
    Quartic,
    Corrugation,
}

#[derive(Debug, Clone)]
pub struct PeriodSection {
    pub mode: PeriodMode,
    pub quartic_scale: f64,
    pub x_max: f64,
    pub corrugation_scale: f64,
    pub energy_points: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub physical: PhysicalParams,
    pub run: RunSection,
    pub potential: PotentialSection,
    pub ensemble: EnsembleSection,
    pub imaging: ImagingSection,
    pub tomography: TomographySection,
    pub quantum: QuantumSection,
    pub squeezing: SqueezingSection,
    pub wire: WireSection,
    pub period: PeriodSection,
    pub out_dir: PathBuf,
    /// FNV-1a hash of the raw config bytes.
    pub config_hash: u64,
}

/// FNV-1a 64-bit hash.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Key-value view of a config file; tracks which keys were consumed so
/// unknown (misspelled) keys can be reported.
struct Reader {
    map: BTreeMap<String, String>,
    used: std::collections::BTreeSet<String>,
}

impl Reader {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .with_context(|| format!("line {}: unterminated section header", lineno + 1))?;
                section = name.trim().to_string();
                if section.is_empty() {
                    bail!("line {}: empty section name", lineno + 1);
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                bail!("line {}: empty key or value", lineno + 1);
            }
            if section.is_empty() {
                bail!("line {}: key {key:?} before any [section]", lineno + 1);
            }
            let full = format!("{section}.{key}");
            if map.insert(full.clone(), value.to_string()).is_some() {
                bail!("duplicate key {full}");
            }
        }
        Ok(Reader { map, used: Default::default() })
    }

    fn raw(&mut self, key: &str) -> Option<&str> {
        self.used.insert(key.to_string());
        self.map.get(key).map(|s| s.as_str())
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse::<f64>().with_context(|| format!("{key}: bad number {v:?}")),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse::<usize>().with_context(|| format!("{key}: bad integer {v:?}")),
        }
    }

    fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse::<u64>().with_context(|| format!("{key}: bad integer {v:?}")),
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => bail!("{key}: expected true or false, got {v:?}"),
        }
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_string()
    }

    fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|p| p.trim().parse::<f64>().with_context(|| format!("{key}: bad list entry")))
                .collect(),
        }
    }

    fn finish(self) -> Result<()> {
        let unknown: Vec<&String> =
            self.map.keys().filter(|k| !self.used.contains(*k)).collect();
        if !unknown.is_empty() {
            bail!(
                "unknown config key(s): {}",
                unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            );
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<ExperimentConfig> {
        let bytes = std::fs::read(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let text = String::from_utf8(bytes.clone()).context("config is not UTF-8")?;
        let cfg = Self::from_str_hashed(&text, fnv1a(&bytes))?;
        Ok(cfg)
    }

    pub fn from_str_hashed(text: &str, config_hash: u64) -> Result<ExperimentConfig> {
        let mut r = Reader::parse(text)?;

        let kind = match r.raw("experiment.kind") {
            Some(v) => ExperimentKind::parse(v)?,
            None => bail!("missing required key experiment.kind"),
        };

        let base = PhysicalParams::rb87_default();
        let two_pi = 2.0 * std::f64::consts::PI;
        let physical = PhysicalParams {
            mass: r.f64("physical.mass_kg", base.mass)?,
            omega0: two_pi * r.f64("physical.frequency_hz", base.omega0 / two_pi)?,
            omega_perp: two_pi
                * r.f64("physical.transverse_frequency_hz", base.omega_perp / two_pi)?,
            temperature: NM_KB * r.f64("physical.temperature_nk", base.temperature / NM_KB)?,
            sigma_el: r.f64("physical.scattering_cross_section_m2", base.sigma_el)?,
        };

        let run = RunSection {
            t1: 1e-3 * r.f64("experiment.t1_ms", 500.0)?,
            dt: 1e-6 * r.f64("experiment.dt_us", 10.0)?,
            n_angles: r.usize("experiment.n_angles", 13)?,
            collisions: r.bool("experiment.collisions", false)?,
            cell_size: UM * r.f64("experiment.cell_size_um", 5.0)?,
        };

        let potential = PotentialSection {
            corrugation: match r.string("potential.corrugation", "none").as_str() {
                "none" => CorrugationKind::None,
                "synth" => CorrugationKind::Synth,
                other => bail!("potential.corrugation: expected none or synth, got {other:?}"),
            },
            corrugation_scale: r.f64("potential.corrugation_scale", 1.0)?,
            normalize_span: r.bool("potential.normalize_dispersion_span", true)?,
            quartic_scale: UM * r.f64("potential.quartic_scale_um", 0.0)?,
        };

        let ensemble = EnsembleSection {
            n: r.usize("ensemble.n", 20_000)?,
            seed: r.u64("ensemble.seed", 1)?,
            shift: UM * r.f64("ensemble.shift_um", 85.0)?,
        };

        let imaging = ImagingSection {
            psf_sigma: UM * r.f64("imaging.psf_sigma_um", 3.0)?,
            pixel: UM * r.f64("imaging.pixel_um", 3.0)?,
            noise_frac_of_peak: r.f64("imaging.noise_frac_of_peak", 0.01)?,
            repeats: r.usize("imaging.repeats_per_angle", 1)?,
        };

        // The ±160 µm default window holds an 85 µm-displaced thermal cloud
        // (arc radius ≈ 85 µm + 4σ ≈ 150 µm) without clipping.
        let tomography = TomographySection {
            k_c: r.f64("tomography.k_c_per_um", 0.43)? / UM,
            grid_n: r.usize("tomography.grid_n", 160)?,
            grid_half: UM * r.f64("tomography.grid_half_um", 160.0)?,
            mlem_iterations: r.usize("tomography.mlem_iterations", 20)?,
        };

        let quantum = QuantumSection {
            n_points: r.usize("quantum.n_points", 512)?,
            half_width: UM * r.f64("quantum.half_width_um", 20.0)?,
            momentum: r.f64("quantum.momentum_per_um", std::f64::consts::PI)? / UM,
            n_angles: r.usize("quantum.n_angles", 60)?,
            t_f: 1e-3 * r.f64("quantum.t_f_ms", 30.0)?,
            k_c: r.f64("quantum.k_c_per_um", 8.0)? / UM,
            sample_half: UM * r.f64("quantum.sample_half_um", 16.0)?,
            sample_points: r.usize("quantum.sample_points", 257)?,
            out_n: r.usize("quantum.out_n", 200)?,
            out_half: UM * r.f64("quantum.out_half_um", 12.5)?,
        };

        let squeezing = SqueezingSection {
            quartic_scale: UM * r.f64("squeezing.quartic_scale_um", 100.0)?,
            shift: UM * r.f64("squeezing.shift_um", 15.0)?,
            t_max: 1e-3 * r.f64("squeezing.t_max_ms", 150.0)?,
            n_points: r.usize("squeezing.n_points", 2048)?,
            half_width: UM * r.f64("squeezing.half_width_um", 120.0)?,
            dt: 1e-9 * r.f64("squeezing.dt_ns", 0.0)?,
            sample_offset: 1e-3 * r.f64("squeezing.sample_offset_ms", 3.0)?,
            record_dt: 1e-3 * r.f64("squeezing.record_dt_ms", 0.25)?,
        };

        let wire = WireSection {
            defect: match r.string("wire.defect", "edge_modulation").as_str() {
                "edge_modulation" => WireDefect::EdgeModulation,
                "stitch" => WireDefect::Stitch,
                other => bail!("wire.defect: expected edge_modulation or stitch, got {other:?}"),
            },
            wavelength: UM * r.f64("wire.wavelength_um", 5.0)?,
            amplitude: 1e-9 * r.f64("wire.amplitude_nm", 250.0)?,
            distance: UM * r.f64("wire.distance_um", 20.0)?,
            current: 1e-3 * r.f64("wire.current_ma", 5.0)?,
            scan_distances: r
                .f64_list("wire.scan_distances_um", &[10.0, 20.0, 30.0, 40.0])?
                .into_iter()
                .map(|d| d * UM)
                .collect(),
        };

        let period = PeriodSection {
            mode: match r.string("period.mode", "quartic").as_str() {
                "quartic" => PeriodMode::Quartic,
                "corrugation" => PeriodMode::Corrugation,
                other => bail!("period.mode: expected quartic or corrugation, got {other:?}"),
            },
            quartic_scale: UM * r.f64("period.quartic_scale_um", 100.0)?,
            x_max: UM * r.f64("period.x_max_um", 15.0)?,
            corrugation_scale: r.f64("period.corrugation_scale", 1.0)?,
            energy_points: r.usize("period.energy_points", 25)?,
        };

        let out_dir = PathBuf::from(r.string("output.dir", "out"));
        r.finish()?;

        let cfg = ExperimentConfig {
            kind,
            physical,
            run,
            potential,
            ensemble,
            imaging,
            tomography,
            quantum,
            squeezing,
            wire,
            period,
            out_dir,
            config_hash,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Structural invariants shared by every pipeline; per-pipeline limits are
    /// enforced by the modules themselves.
    pub fn validate(&self) -> Result<()> {
        self.physical.validate().map_err(|e| anyhow::anyhow!("physical: {e}"))?;
        for (name, t) in [
            ("experiment.t1_ms", self.run.t1),
            ("experiment.dt_us", self.run.dt),
            ("quantum.t_f_ms", self.quantum.t_f),
            ("squeezing.t_max_ms", self.squeezing.t_max),
            ("squeezing.sample_offset_ms", self.squeezing.sample_offset),
            ("squeezing.record_dt_ms", self.squeezing.record_dt),
        ] {
            if !(t >= 0.0) || !t.is_finite() {
                bail!("{name} must be a nonnegative time, got {t:e} s");
            }
        }
        if self.run.n_angles < 2 || self.quantum.n_angles < 2 {
            bail!("projection schedules need at least 2 angles in [0, π)");
        }
        if self.ensemble.n == 0 {
            bail!("ensemble.n must be at least 1");
        }
        if self.potential.corrugation_scale < 0.0 || self.potential.quartic_scale < 0.0 {
            bail!("potential scales must be nonnegative");
        }
        if self.imaging.noise_frac_of_peak < 0.0 {
            bail!("imaging.noise_frac_of_peak must be nonnegative");
        }
        if self.imaging.repeats == 0 {
            bail!("imaging.repeats_per_angle must be at least 1");
        }
        if !(self.tomography.k_c > 0.0) || !(self.quantum.k_c > 0.0) {
            bail!("kernel cutoff k_c must be positive");
        }
        if self.wire.scan_distances.is_empty() {
            bail!("wire.scan_distances_um must not be empty");
        }
        Ok(())
    }

    /// Projection angles j·π/n, j = 0..n — always within [0, π).
    pub fn projection_angles(&self) -> Vec<f64> {
        (0..self.run.n_angles)
            .map(|j| j as f64 * std::f64::consts::PI / self.run.n_angles as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::from_str_hashed(
            "[experiment]\nkind = harmonic_control\n",
            7,
        )
        .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::HarmonicControl);
        assert_eq!(cfg.run.n_angles, 13);
        assert!((cfg.run.t1 - 0.5).abs() < 1e-12);
        assert!((cfg.physical.omega0 - 2.0 * std::f64::consts::PI * 38.0).abs() < 1e-9);
        assert_eq!(cfg.config_hash, 7);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = ExperimentConfig::from_str_hashed(
            "[experiment]\nkind = squeezing\nt1_msec = 10\n",
            0,
        )
        .unwrap_err();
        assert!(err.to_string().contains("experiment.t1_msec"), "{err}");
    }

    #[test]
    fn missing_kind_is_rejected() {
        assert!(ExperimentConfig::from_str_hashed("[experiment]\nt1_ms = 10\n", 0).is_err());
    }

    #[test]
    fn comments_sections_and_units_are_parsed() {
        let text = "\
# a comment line
[experiment]
kind = classical_oscillation   # trailing comment
t1_ms = 250
[potential]
corrugation = synth
[ensemble]
shift_um = 42.5
";
        let cfg = ExperimentConfig::from_str_hashed(text, 0).unwrap();
        assert!((cfg.run.t1 - 0.25).abs() < 1e-12);
        assert_eq!(cfg.potential.corrugation, CorrugationKind::Synth);
        assert!((cfg.ensemble.shift - 42.5e-6).abs() < 1e-18);
    }

    #[test]
    fn fnv1a_matches_reference_vectors() {
        // Published FNV-1a test vectors.
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn angles_stay_in_half_turn() {
        let cfg = ExperimentConfig::from_str_hashed(
            "[experiment]\nkind = harmonic_control\nn_angles = 7\n",
            0,
        )
        .unwrap();
        let angles = cfg.projection_angles();
        assert_eq!(angles.len(), 7);
        for w in angles.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(*angles.last().unwrap() < std::f64::consts::PI);
    }

    #[test]
    fn duplicate_key_is_rejected() {
        assert!(ExperimentConfig::from_str_hashed(
            "[experiment]\nkind = squeezing\nkind = squeezing\n",
            0
        )
        .is_err());
    }
}

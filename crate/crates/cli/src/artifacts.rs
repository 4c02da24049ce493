//! Output-directory management and artifact encoders.
//!
//! Every file lands via write-to-temp-then-rename so a crash never leaves a
//! half-written artifact, and a failed run removes everything it had already
//! produced. The report is a fixed-order `key = value` listing with no
//! timestamps, so identical configurations reproduce identical bytes.

use anyhow::{Context, Result};
use phasetomo_core::tomography::PhaseSpaceGrid;
use std::path::{Path, PathBuf};

/// A run's output directory; tracks finished artifacts for error cleanup.
pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<OutDir> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("cannot create output dir {}", root.display()))?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Write raw bytes atomically under `name`.
    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        self.write_with(name, |tmp| {
            std::fs::write(tmp, bytes).map_err(anyhow::Error::from)
        })
    }

    /// Run a saver against a temp path, then rename into place.
    pub fn write_with(
        &mut self,
        name: &str,
        save: impl FnOnce(&Path) -> Result<()>,
    ) -> Result<()> {
        let final_path = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        save(&tmp).with_context(|| format!("writing {name}"))?;
        std::fs::rename(&tmp, &final_path)
            .with_context(|| format!("finalizing {name}"))?;
        self.written.push(final_path);
        Ok(())
    }

    /// Remove everything this run produced (called when a run fails partway).
    pub fn remove_artifacts(&self) {
        for p in &self.written {
            let _ = std::fs::remove_file(p);
        }
    }

    pub fn artifact_names(&self) -> Vec<String> {
        self.written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect()
    }
}

/// Ordered `key = value` run report.
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    /// Header rows every pipeline shares: experiment kind, config hash, seed,
    /// and crate versions (no timestamps — reruns must be byte-identical).
    pub fn new(kind: &str, config_hash: u64, seed: u64) -> Report {
        let mut r = Report { lines: Vec::new() };
        r.push_str("experiment", kind);
        r.push_str("config_hash", &format!("{config_hash:016x}"));
        r.push_str("seed", &seed.to_string());
        r.push_str("core_version", phasetomo_core::VERSION);
        r.push_str("cli_version", env!("CARGO_PKG_VERSION"));
        r
    }

    pub fn push_str(&mut self, key: &str, value: &str) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push_str(key, &format!("{value:.9e}"));
    }

    pub fn push_usize(&mut self, key: &str, value: usize) {
        self.push_str(key, &value.to_string());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// 8-bit P5 PGM heatmap of a phase-space grid.
///
/// Row order puts +p̄ at the top so the image reads like a standard
/// phase-space plot. Signed grids map [−max|v|, +max|v|] onto [0, 255] with
/// mid-gray zero; nonnegative grids map [0, max] onto [0, 255]. The comment
/// line records the axes and the value of one gray step.
pub fn grid_heatmap_pgm(grid: &PhaseSpaceGrid) -> Vec<u8> {
    let (nq, np) = (grid.nq(), grid.np());
    let vmax = grid.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let signed = grid.is_signed();
    let spec = grid.spec();
    let mut out = Vec::with_capacity(nq * np + 128);
    out.extend_from_slice(format!("P5\n# q [{:e}, {:e}] m, p-bar [{:e}, {:e}] m, ", spec.qmin, spec.qmax, spec.pmin, spec.pmax).as_bytes());
    if signed {
        out.extend_from_slice(
            format!("signed, gray step {:e}\n", 2.0 * vmax / 255.0).as_bytes(),
        );
    } else {
        out.extend_from_slice(format!("gray step {:e}\n", vmax / 255.0).as_bytes());
    }
    out.extend_from_slice(format!("{nq} {np}\n255\n").as_bytes());
    for ip in (0..np).rev() {
        for iq in 0..nq {
            let v = grid.at(iq, ip);
            let g = if vmax == 0.0 {
                if signed { 128.0 } else { 0.0 }
            } else if signed {
                (v / vmax).clamp(-1.0, 1.0) * 127.5 + 127.5
            } else {
                (v / vmax).clamp(0.0, 1.0) * 255.0
            };
            out.push(g.round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

/// Two-column tab-separated table with a `#`-prefixed header line.
pub fn table(header: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> Vec<u8> {
    let mut s = format!("# {header}\n");
    for (a, b) in rows {
        s.push_str(&format!("{a:.9e}\t{b:.9e}\n"));
    }
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use phasetomo_core::tomography::GridSpec;

    #[test]
    fn report_is_ordered_and_timestamp_free() {
        let mut r = Report::new("squeezing", 0xabcd, 42);
        r.push_f64("ratio", 0.7);
        let text = r.render();
        assert!(text.starts_with("experiment = squeezing\nconfig_hash = 000000000000abcd\n"));
        assert!(text.contains("seed = 42\n"));
        assert!(text.ends_with("ratio = 7.000000000e-1\n"));
        assert_eq!(r.get("ratio"), Some("7.000000000e-1"));
    }

    #[test]
    fn heatmap_has_pgm_header_and_full_payload() {
        use phasetomo_core::dynamics::sample_ensemble;
        use phasetomo_core::PhysicalParams;
        let p = PhysicalParams::rb87_default();
        let ens = sample_ensemble(&p, 0.0, 2000, 3).unwrap();
        let grid =
            PhaseSpaceGrid::from_ensemble(&ens, GridSpec::square(64, 80e-6)).unwrap();
        let png = grid_heatmap_pgm(&grid);
        assert!(png.starts_with(b"P5\n# "));
        let header_end = png
            .windows(4)
            .position(|w| w == b"255\n")
            .map(|i| i + 4)
            .unwrap();
        assert_eq!(png.len() - header_end, 64 * 64);
        // Center of a thermal cloud must be the brightest region.
        assert_eq!(*png[header_end..].iter().max().unwrap(), 255u8);
    }

    #[test]
    fn atomic_writes_leave_no_temp_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutDir::create(dir.path()).unwrap();
        out.write_bytes("a.txt", b"hello").unwrap();
        out.write_bytes("b.txt", b"world").unwrap();
        let names: Vec<String> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names.len(), 2);
        assert!(!names.iter().any(|n| n.contains(".tmp")));
        out.remove_artifacts();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}

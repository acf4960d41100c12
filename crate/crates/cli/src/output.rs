//! Result files: fringe CSVs, the run manifest and atomic writes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ab_core::{EikonalReport, FringePattern};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const WARNINGS: &str = "warnings.txt";
pub const PARTIAL_SUFFIX: &str = ".partial";

/// Write through a sibling temporary file and rename it into place.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
    }
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fringes_csv(pattern: &FringePattern) -> String {
    let mut s = String::from("y,intensity\n");
    for (y, i) in pattern.screen_y.iter().zip(&pattern.intensity) {
        let _ = writeln!(s, "{},{}", fmt_f64(*y), fmt_f64(*i));
    }
    s
}

/// `(y, intensity)` columns of a fringe CSV.
pub fn read_fringes_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("y,intensity") {
        return Err(CliError::Io(format!("{}: missing `y,intensity` header", path.display())));
    }
    let (mut ys, mut is) = (Vec::new(), Vec::new());
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let parse = |s: Option<&str>| s.and_then(|v| v.trim().parse::<f64>().ok());
        let mut cols = line.split(',');
        match (parse(cols.next()), parse(cols.next()), cols.next()) {
            (Some(y), Some(i), None) => {
                ys.push(y);
                is.push(i);
            }
            _ => {
                return Err(CliError::Io(format!(
                    "{}: malformed row {}",
                    path.display(),
                    n + 2
                )))
            }
        }
    }
    Ok((ys, is))
}

/// `x,y,density` for every grid node, row-major in `y`.
pub fn snapshot_csv(psi: &ab_core::quantum_solver::Wavefunction) -> String {
    let g = psi.grid;
    let mut s = String::from("x,y,density\n");
    for j in 0..g.ny {
        for i in 0..g.nx {
            let _ = writeln!(
                s,
                "{},{},{}",
                fmt_f64(g.x(i)),
                fmt_f64(g.y(j)),
                fmt_f64(psi.at(i, j).norm_sqr())
            );
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub status: String,
    pub config_sha256: String,
    /// Paths relative to the output directory.
    pub outputs: Vec<String>,
    pub elapsed_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ab_phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fringe_period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eikonal: Option<EikonalReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl RunRecord {
    pub fn new(command: &str, config_sha256: &str) -> Self {
        RunRecord {
            command: command.into(),
            mode: None,
            status: "ok".into(),
            config_sha256: config_sha256.into(),
            outputs: Vec::new(),
            elapsed_s: 0.0,
            ab_phase: None,
            fringe_period: None,
            eikonal: None,
            steps: None,
        }
    }

    pub fn with_pattern(mut self, p: &FringePattern) -> Self {
        self.ab_phase = Some(p.ab_phase);
        self.fringe_period = Some(p.fringe_period);
        self.eikonal = Some(p.eikonal);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Manifest {
    pub version: String,
    /// Hash of the most recent config written into this directory.
    pub config_sha256: String,
    pub runs: BTreeMap<String, RunRecord>,
    /// Run id → warning text.
    pub eikonal_warnings: BTreeMap<String, String>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Option<Manifest>, CliError> {
        let path = dir.join(MANIFEST);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// Record `runs` on top of whatever the directory already holds and
    /// rewrite the manifest and warnings file.
    pub fn merge_into(
        dir: &Path,
        config_sha256: &str,
        runs: Vec<(String, RunRecord)>,
    ) -> Result<Manifest, CliError> {
        let mut m = Manifest::load(dir)?.unwrap_or_default();
        m.version = crate::VERSION.into();
        m.config_sha256 = config_sha256.into();
        for (id, rec) in runs {
            m.eikonal_warnings.remove(&id);
            // The short-wavelength caveat is about the ray picture only.
            let classical = rec.mode.as_deref() == Some("classical");
            if let Some(e) = rec.eikonal.filter(|e| classical && !e.valid) {
                m.eikonal_warnings.insert(id.clone(), eikonal_warning(&e));
            }
            m.runs.insert(id, rec);
        }
        let json = serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n";
        atomic_write(&dir.join(MANIFEST), json.as_bytes())?;
        let mut w = String::new();
        for (id, text) in &m.eikonal_warnings {
            let _ = writeln!(w, "{id}: {text}");
        }
        atomic_write(&dir.join(WARNINGS), w.as_bytes())?;
        Ok(m)
    }

    /// The run that produced `file` (relative path), if recorded.
    pub fn run_for_output(&self, file: &str) -> Option<&RunRecord> {
        self.runs.values().find(|r| r.outputs.iter().any(|o| o == file))
    }
}

pub fn eikonal_warning(e: &EikonalReport) -> String {
    format!(
        "short-wavelength condition not met: kL = {:.4} < {} (L = {}); the ray picture is qualitative here",
        e.kl, e.threshold, e.scale
    )
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn rel(dir: &Path, file: &Path) -> String {
    file.strip_prefix(dir)
        .unwrap_or(file)
        .to_string_lossy()
        .replace('\\', "/")
}

pub fn partial_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(PARTIAL_SUFFIX);
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let ys = vec![-1.0, 0.1 + 0.2, std::f64::consts::PI];
        let is = vec![1.0 / 3.0, 0.0, 1e-300];
        let p = FringePattern {
            screen_y: ys.clone(),
            intensity: is.clone(),
            fringe_period: 1.0,
            ab_phase: 0.0,
            eikonal: ab_core::eikonal_check_wavenumber(1.0, 1.0, 100.0).unwrap(),
        };
        let path = dir.path().join("f.csv");
        atomic_write(&path, fringes_csv(&p).as_bytes()).unwrap();
        let (y2, i2) = read_fringes_csv(&path).unwrap();
        assert_eq!(ys, y2);
        assert_eq!(is, i2);
        let text = fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

//! On-disk formats.
//!
//! Traces are CSV with header `t,rho00,rho11,rho22,rhoXX,source,run,shots`,
//! preceded by a `# config_hash=<hex>` line. Counts, calibration and
//! mitigation records are pretty-printed JSON documents carrying a
//! top-level `config_hash`.

use std::fs;
use std::path::{Path, PathBuf};

use qhe_core::gem::{CalibrationMatrix, ImprovementReport, MitigationResult};
use qhe_core::model::PopulationSample;
use qhe_core::qsim::Counts;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const THEORY_FILE: &str = "theory.csv";
pub const SIMULATE_FILE: &str = "simulate.csv";
pub const EXPERIMENT_FILE: &str = "experiment.csv";
pub const COUNTS_FILE: &str = "counts.json";
pub const MITIGATED_FILE: &str = "mitigated.csv";
pub const CALIBRATION_FILE: &str = "calibration.json";
pub const MITIGATION_FILE: &str = "mitigation.json";
pub const MANIFEST_FILE: &str = "manifest.json";

const HASH_PREFIX: &str = "# config_hash=";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub t: f64,
    pub run: u32,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsFile {
    pub config_hash: String,
    pub records: Vec<CountsRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub t: f64,
    #[serde(flatten)]
    pub matrix: CalibrationMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub config_hash: String,
    pub entries: Vec<CalibrationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationEntry {
    pub t: f64,
    pub result: MitigationResult,
    /// Distances to the ideal-circuit distribution at the same `t`.
    pub versus_ideal: ImprovementReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationFile {
    pub config_hash: String,
    pub entries: Vec<MitigationEntry>,
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, bytes).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn malformed(path: &Path, reason: impl ToString) -> CliError {
    CliError::MalformedInput { path: path.to_path_buf(), reason: reason.to_string() }
}

pub fn write_trace(path: &Path, config_hash: &str, samples: &[PopulationSample]) -> Result<()> {
    let mut buf = format!("{HASH_PREFIX}{config_hash}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for s in samples {
            w.serialize(s).map_err(|e| malformed(path, e))?;
        }
        w.flush().map_err(|source| CliError::Write { path: path.to_path_buf(), source })?;
    }
    write_bytes(path, &buf)
}

pub fn read_trace(path: &Path) -> Result<(String, Vec<PopulationSample>)> {
    let text = fs::read_to_string(path).map_err(|source| CliError::MissingInput { path: path.to_path_buf(), source })?;
    let hash = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix(HASH_PREFIX))
        .ok_or_else(|| malformed(path, "missing config hash line"))?
        .trim()
        .to_string();
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let samples = r.deserialize().collect::<std::result::Result<Vec<PopulationSample>, _>>().map_err(|e| malformed(path, e))?;
    Ok((hash, samples))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("records serialize");
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::MissingInput { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| malformed(path, e))
}

/// Fails with a hash mismatch unless `found == expected`.
pub fn check_hash(path: &Path, expected: &str, found: &str) -> Result<()> {
    if expected != found {
        return Err(CliError::HashMismatch {
            path: path.to_path_buf(),
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qhe_core::model::Source;

    #[test]
    fn trace_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let samples = vec![
            PopulationSample::exact(0.0, [1.0, 0.0, 0.0], Source::Theory),
            PopulationSample::from_register(0.5, [0.9, 0.05, 0.04, 0.01], Source::SimNoisy, 3, 8192),
        ];
        write_trace(&path, "abcdef0123456789", &samples).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# config_hash=abcdef0123456789\nt,rho00,rho11,rho22,rhoXX,source,run,shots\n"));
        assert!(text.contains(",sim-noisy,3,8192"));
        let (hash, back) = read_trace(&path).unwrap();
        assert_eq!(hash, "abcdef0123456789");
        assert_eq!(back, samples);
    }

    #[test]
    fn missing_trace_is_missing_input() {
        let err = read_trace(Path::new("/nonexistent/trace.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}

use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::{
    self, CalibrationFile, CountsFile, MitigationFile, CALIBRATION_FILE, COUNTS_FILE, EXPERIMENT_FILE, MITIGATED_FILE,
    MITIGATION_FILE, SIMULATE_FILE, THEORY_FILE,
};
use crate::pipeline;

pub fn cmd_theory(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let path = out.join(THEORY_FILE);
    io::write_trace(&path, &cfg.hash(), &pipeline::theory(cfg)?)?;
    Ok(vec![path])
}

pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let path = out.join(SIMULATE_FILE);
    io::write_trace(&path, &cfg.hash(), &pipeline::simulate(cfg)?)?;
    Ok(vec![path])
}

pub fn cmd_experiment(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let hash = cfg.hash();
    let (rows, records) = pipeline::experiment(cfg)?;
    let trace = out.join(EXPERIMENT_FILE);
    let counts = out.join(COUNTS_FILE);
    io::write_trace(&trace, &hash, &rows)?;
    io::write_json(&counts, &CountsFile { config_hash: hash, records })?;
    Ok(vec![trace, counts])
}

/// Mitigates the counts in `raw_dir`. With `calibration`, reuses the
/// matrices of an earlier run instead of rebuilding them.
pub fn cmd_mitigate(cfg: &RunConfig, out: &Path, raw_dir: &Path, calibration: Option<&Path>) -> Result<Vec<PathBuf>> {
    let hash = cfg.hash();
    let counts_path = raw_dir.join(COUNTS_FILE);
    let counts: CountsFile = io::read_json(&counts_path)?;
    io::check_hash(&counts_path, &hash, &counts.config_hash)?;
    let supplied = match calibration {
        Some(path) => {
            let file: CalibrationFile = io::read_json(path)?;
            io::check_hash(path, &hash, &file.config_hash)?;
            Some((file.entries, path.to_path_buf()))
        }
        None => None,
    };
    let result = pipeline::mitigate(
        cfg,
        &counts.records,
        &counts_path,
        supplied.as_ref().map(|(e, p)| (e.as_slice(), p.as_path())),
    )?;
    let trace = out.join(MITIGATED_FILE);
    let cal = out.join(CALIBRATION_FILE);
    let mit = out.join(MITIGATION_FILE);
    io::write_trace(&trace, &hash, &result.rows)?;
    io::write_json(&cal, &CalibrationFile { config_hash: hash.clone(), entries: result.calibration })?;
    io::write_json(&mit, &MitigationFile { config_hash: hash, entries: result.entries })?;
    Ok(vec![trace, cal, mit])
}

/// Maps a missing-directory error to a missing-input diagnostic.
pub fn require_dir(path: &Path) -> Result<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::MissingInput {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        })
    }
}

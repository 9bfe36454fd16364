//! Figure-data bundle.
//!
//! | file | content |
//! |------|---------|
//! | `fig3a.csv` | theory and ideal circuit, base config |
//! | `fig3b.csv` | theory and noisy circuit |
//! | `fig3c.csv` | theory and mitigated circuit |
//! | `fig4{a,b,c}.csv` | initial state ε0, ε1, ε2 on a 0.25 grid: theory, ideal, mitigated |
//! | `fig5{a,b,c}.csv` | initial state ε0, ε1, ε2: rate equation and driven master equation at `ω = ω2 − ω1` |
//!
//! Each file carries the hash of the config that produced it, and
//! `manifest.json` lists them all.

use std::path::{Path, PathBuf};

use qhe_core::model::{PopulationSample, Source};
use serde::{Deserialize, Serialize};

use crate::config::{InitialState, RunConfig};
use crate::error::{CliError, Result};
use crate::io::{self, EXPERIMENT_FILE, MANIFEST_FILE, MITIGATED_FILE, SIMULATE_FILE, THEORY_FILE};
use crate::pipeline;

pub const FIG4_INCREMENT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureEntry {
    pub file: String,
    pub config_hash: String,
    pub initial_state: InitialState,
    pub t_increment: f64,
    pub omega_drive: f64,
    pub sources: Vec<Source>,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEntry {
    pub path: PathBuf,
    pub config_hash: String,
}

/// Gap between the rate equation and the driven master equation in `ρ11`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveTrend {
    pub initial_state: InitialState,
    pub omega_drive: f64,
    /// Largest `|ρ11 simplified − ρ11 full|` for `t ≤ 3`.
    pub max_gap_early: f64,
    pub t_of_max_gap: f64,
    /// The gap at the final grid time.
    pub final_gap: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub inputs: Vec<InputEntry>,
    pub figures: Vec<FigureEntry>,
    pub fig5_trend: Vec<DriveTrend>,
}

fn figure(
    out: &Path,
    name: &str,
    cfg: &RunConfig,
    rows: Vec<PopulationSample>,
    figures: &mut Vec<FigureEntry>,
) -> Result<()> {
    let hash = cfg.hash();
    io::write_trace(&out.join(name), &hash, &rows)?;
    let mut sources: Vec<Source> = rows.iter().map(|r| r.source).collect();
    sources.sort();
    sources.dedup();
    figures.push(FigureEntry {
        file: name.to_string(),
        config_hash: hash,
        initial_state: cfg.initial_state,
        t_increment: cfg.t_increment,
        omega_drive: cfg.engine().omega_drive,
        sources,
        rows: rows.len(),
    });
    Ok(())
}

fn of_source(rows: &[PopulationSample], source: Source) -> impl Iterator<Item = PopulationSample> + '_ {
    rows.iter().copied().filter(move |r| r.source == source)
}

fn merged(theory: &[PopulationSample], other: &[PopulationSample], source: Source) -> Vec<PopulationSample> {
    of_source(theory, Source::Theory).chain(of_source(other, source)).collect()
}

/// Loads traces from earlier runs. All must carry `expected` as their hash.
fn load_inputs(dirs: &[PathBuf], expected: &str) -> Result<(Vec<PopulationSample>, Vec<InputEntry>)> {
    let mut rows = Vec::new();
    let mut inputs = Vec::new();
    for dir in dirs {
        crate::commands::require_dir(dir)?;
        for name in [THEORY_FILE, SIMULATE_FILE, EXPERIMENT_FILE, MITIGATED_FILE] {
            let path = dir.join(name);
            if !path.exists() {
                continue;
            }
            let (hash, samples) = io::read_trace(&path)?;
            inputs.push(InputEntry { path: path.clone(), config_hash: hash.clone() });
            rows.extend(samples);
        }
    }
    if inputs.is_empty() {
        return Err(CliError::MissingInput {
            path: dirs.first().cloned().unwrap_or_default(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no trace files found"),
        });
    }
    for input in &inputs {
        io::check_hash(&input.path, expected, &input.config_hash)?;
    }
    Ok((rows, inputs))
}

/// Noisy and mitigated traces for `cfg`, computed in memory.
fn noisy_and_mitigated(cfg: &RunConfig) -> Result<(Vec<PopulationSample>, Vec<PopulationSample>)> {
    let (noisy, records) = pipeline::experiment(cfg)?;
    let mitigated = pipeline::mitigate(cfg, &records, Path::new(io::COUNTS_FILE), None)?;
    Ok((noisy, mitigated.rows))
}

pub fn drive_trend(cfg: &RunConfig, rows: &[PopulationSample]) -> DriveTrend {
    let simple: Vec<_> = of_source(rows, Source::Theory).collect();
    let full: Vec<_> = of_source(rows, Source::TheoryFull).collect();
    let gaps: Vec<(f64, f64)> = simple.iter().zip(&full).map(|(s, f)| (s.t, (s.rho11 - f.rho11).abs())).collect();
    let (t_of_max_gap, max_gap_early) = gaps
        .iter()
        .filter(|(t, _)| *t <= 3.0 + 1e-12)
        .fold((0.0, 0.0), |best, &(t, g)| if g > best.1 { (t, g) } else { best });
    let (t_final, final_gap) = gaps.last().copied().unwrap_or((0.0, 0.0));
    DriveTrend {
        initial_state: cfg.initial_state,
        omega_drive: cfg.engine().omega_drive,
        max_gap_early,
        t_of_max_gap,
        final_gap,
        t_final,
    }
}

pub fn cmd_report(base: &RunConfig, out: &Path, from: &[PathBuf]) -> Result<Manifest> {
    let hash = base.hash();
    let mut figures = Vec::new();

    let (fig3_rows, inputs) = if from.is_empty() {
        let theory = pipeline::theory(base)?;
        let ideal = pipeline::simulate(base)?;
        let (noisy, mitigated) = noisy_and_mitigated(base)?;
        ([theory, ideal, noisy, mitigated].concat(), Vec::new())
    } else {
        load_inputs(from, &hash)?
    };
    for (name, source) in [("fig3a.csv", Source::SimIdeal), ("fig3b.csv", Source::SimNoisy), ("fig3c.csv", Source::SimMitigated)] {
        figure(out, name, base, merged(&fig3_rows, &fig3_rows, source), &mut figures)?;
    }

    for (name, init) in ["fig4a.csv", "fig4b.csv", "fig4c.csv"].into_iter().zip(InitialState::ALL) {
        let cfg = RunConfig { initial_state: init, t_increment: FIG4_INCREMENT, ..base.clone() };
        let theory = pipeline::theory(&cfg)?;
        let ideal = pipeline::simulate(&cfg)?;
        let (_, mitigated) = noisy_and_mitigated(&cfg)?;
        let rows = [merged(&theory, &ideal, Source::SimIdeal), mitigated].concat();
        figure(out, name, &cfg, rows, &mut figures)?;
    }

    let mut fig5_trend = Vec::new();
    let drive = base.engine.omega2 - base.engine.omega1;
    for (name, init) in ["fig5a.csv", "fig5b.csv", "fig5c.csv"].into_iter().zip(InitialState::ALL) {
        let cfg = RunConfig { initial_state: init, omega_drive: Some(drive), ..base.clone() };
        let rows = pipeline::theory(&cfg)?;
        fig5_trend.push(drive_trend(&cfg, &rows));
        figure(out, name, &cfg, rows, &mut figures)?;
    }

    let manifest = Manifest { config_hash: hash, inputs, figures, fig5_trend };
    io::write_json(&out.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

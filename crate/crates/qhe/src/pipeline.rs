//! The four data-producing stages. Each returns in-memory records; the
//! command layer writes them. Grid points are evaluated in parallel on the
//! current rayon pool and collected in grid order.

use std::path::Path;

use qhe_core::circuit::{
    build_calibration_circuits, build_engine_circuit, measure_populations, register_populations, sample_circuit,
    EngineLayout,
};
use qhe_core::gem::{build_calibration_matrix, improvement_report, CalibrationMatrix, N_OUTCOMES};
use qhe_core::model::{integrate_full, integrate_simplified, DensityMatrix3, PopulationSample, Source};
use qhe_core::qsim::{derive_seed, Circuit, NoiseModel};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::{CalibrationEntry, CountsRecord, MitigationEntry};

/// Seed streams, one per stage.
const STREAM_SIMULATE: u64 = 1;
const STREAM_EXPERIMENT: u64 = 2;
const STREAM_CALIBRATION: u64 = 3;

/// Rate-equation trace on the dense grid, plus the driven master equation
/// when `omega_drive > 0`.
pub fn theory(cfg: &RunConfig) -> Result<Vec<PopulationSample>> {
    let engine = cfg.engine();
    let grid = cfg.theory_grid();
    let rho0 = cfg.initial_state.populations();
    let mut rows = integrate_simplified(&engine, rho0, &grid)?.samples;
    if engine.omega_drive > 0.0 {
        let (full, _) = integrate_full(&engine, &DensityMatrix3::diagonal(rho0)?, &grid)?;
        rows.extend(full.samples);
    }
    Ok(rows)
}

fn engine_circuit(cfg: &RunConfig, t: f64) -> Result<Circuit> {
    Ok(build_engine_circuit(&cfg.engine(), &cfg.plan(t), cfg.initial_state.index())?)
}

/// Exact ideal-circuit distribution at every grid point.
pub fn ideal_reference(cfg: &RunConfig) -> Result<Vec<[f64; N_OUTCOMES]>> {
    cfg.time_grid().par_iter().map(|&t| Ok(register_populations(&engine_circuit(cfg, t)?, None)?)).collect()
}

/// Ideal circuit: one exact row per grid point (run 0, shots 0) followed by
/// one sampled row per run.
pub fn simulate(cfg: &RunConfig) -> Result<Vec<PopulationSample>> {
    let grid = cfg.time_grid();
    let per_point: Vec<Vec<PopulationSample>> = grid
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let c = engine_circuit(cfg, t)?;
            let mut rows = vec![PopulationSample::from_register(t, register_populations(&c, None)?, Source::SimIdeal, 0, 0)];
            for run in 1..=cfg.runs {
                let seed = derive_seed(cfg.seed, &[STREAM_SIMULATE, k as u64, run as u64]);
                let counts = sample_circuit(&c, None, cfg.shots, seed)?;
                let f = counts.frequencies(2)?;
                rows.push(PopulationSample::from_register(t, [f[0], f[1], f[2], f[3]], Source::SimIdeal, run, cfg.shots));
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// Noisy circuit sampled `runs` times per grid point.
pub fn experiment(cfg: &RunConfig) -> Result<(Vec<PopulationSample>, Vec<CountsRecord>)> {
    let noise = cfg.noise_model();
    let grid = cfg.time_grid();
    let per_point: Vec<Vec<CountsRecord>> = grid
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let c = engine_circuit(cfg, t)?;
            (1..=cfg.runs)
                .map(|run| {
                    let seed = derive_seed(cfg.seed, &[STREAM_EXPERIMENT, k as u64, run as u64]);
                    Ok(CountsRecord { t, run, counts: sample_circuit(&c, Some(&noise), cfg.shots, seed)? })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let records: Vec<CountsRecord> = per_point.into_iter().flatten().collect();
    let rows = records
        .iter()
        .map(|r| {
            let f = r.counts.frequencies(2)?;
            Ok(PopulationSample::from_register(r.t, [f[0], f[1], f[2], f[3]], Source::SimNoisy, r.run, r.counts.shots))
        })
        .collect::<Result<_>>()?;
    Ok((rows, records))
}

/// `M_Q` for the engine circuit at `t` under `noise`.
pub fn calibrate(cfg: &RunConfig, noise: &NoiseModel, k: usize, t: f64) -> Result<CalibrationMatrix> {
    let engine = engine_circuit(cfg, t)?;
    let (c1, c2) = build_calibration_circuits(&engine)?;
    let run = |c: &Circuit, shots: u64, seed: u64| Ok(measure_populations(c, Some(noise), shots, seed)?);
    let seed = derive_seed(cfg.seed, &[STREAM_CALIBRATION, k as u64]);
    Ok(build_calibration_matrix(
        run,
        &c1,
        &c2,
        &EngineLayout::STANDARD,
        cfg.calibration_shots(),
        seed,
        cfg.calibration_repetitions,
    )?)
}

fn same_t(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + b.abs())
}

/// Mean measured distribution per grid point over all runs.
pub fn average_runs(cfg: &RunConfig, records: &[CountsRecord], path: &Path) -> Result<Vec<([f64; N_OUTCOMES], u64)>> {
    let grid = cfg.time_grid();
    let mut sums = vec![([0.0; N_OUTCOMES], 0u64, 0u32); grid.len()];
    for r in records {
        let k = grid.iter().position(|&t| same_t(r.t, t)).ok_or_else(|| CliError::MalformedInput {
            path: path.to_path_buf(),
            reason: format!("t = {} is not on the configured grid", r.t),
        })?;
        let f = r.counts.frequencies(2)?;
        for i in 0..N_OUTCOMES {
            sums[k].0[i] += f[i];
        }
        sums[k].1 += r.counts.shots;
        sums[k].2 += 1;
    }
    sums.into_iter()
        .zip(&grid)
        .map(|((s, shots, n), t)| {
            if n == 0 {
                return Err(CliError::MalformedInput {
                    path: path.to_path_buf(),
                    reason: format!("no counts recorded at t = {t}"),
                });
            }
            Ok((s.map(|x| x / n as f64), shots))
        })
        .collect()
}

pub struct Mitigated {
    pub rows: Vec<PopulationSample>,
    pub calibration: Vec<CalibrationEntry>,
    pub entries: Vec<MitigationEntry>,
}

/// Mitigates run-averaged raw data at every grid point.
///
/// Calibration matrices are rebuilt under the run's noise model unless
/// `calibration` supplies one per grid point.
pub fn mitigate(
    cfg: &RunConfig,
    records: &[CountsRecord],
    counts_path: &Path,
    calibration: Option<(&[CalibrationEntry], &Path)>,
) -> Result<Mitigated> {
    let grid = cfg.time_grid();
    let raw = average_runs(cfg, records, counts_path)?;
    let ideal = ideal_reference(cfg)?;
    let noise = cfg.noise_model();
    if let Some((entries, path)) = calibration {
        if entries.len() != grid.len() || entries.iter().zip(&grid).any(|(e, &t)| !same_t(e.t, t)) {
            return Err(CliError::MalformedInput {
                path: path.to_path_buf(),
                reason: "calibration entries do not match the configured grid".into(),
            });
        }
    }
    let results: Vec<(PopulationSample, CalibrationEntry, MitigationEntry)> = grid
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let matrix = match calibration {
                Some((entries, _)) => entries[k].matrix.clone(),
                None => calibrate(cfg, &noise, k, t)?,
            };
            let (v, shots) = raw[k];
            let result = matrix.mitigate(&v)?;
            let versus_ideal = improvement_report(&v, &result.x, &ideal[k])?;
            let row = PopulationSample::from_register(t, result.x, Source::SimMitigated, 0, shots);
            Ok((row, CalibrationEntry { t, matrix }, MitigationEntry { t, result, versus_ideal }))
        })
        .collect::<Result<_>>()?;
    let mut out = Mitigated { rows: Vec::new(), calibration: Vec::new(), entries: Vec::new() };
    for (row, cal, entry) in results {
        out.rows.push(row);
        out.calibration.push(cal);
        out.entries.push(entry);
    }
    Ok(out)
}

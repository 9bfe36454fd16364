//! Run configuration.
//!
//! A config is one JSON document. Every field is optional; defaults give the
//! reference engine on the grid `0, 0.5, …, 5` with two GAD steps per point,
//! five runs of 8192 shots each.
//!
//! ```json
//! {
//!   "engine": { "omega0": 0, "omega1": 1, "omega2": 2.5, "lambda": 0.5,
//!               "omega_drive": 0, "beta_h": 1, "beta_c": 5,
//!               "gamma_h20": 1, "gamma_c10": 1 },
//!   "t_max": 5, "t_increment": 0.5, "n_steps": 2,
//!   "shots": 8192, "runs": 5, "seed": 2024,
//!   "noise": "noise.json",
//!   "initial_state": "eps0",
//!   "p_qubit_mode": "reprepare-each-step"
//! }
//! ```
//!
//! `noise` is either an inline noise model or a path relative to the config
//! file. The config hash is computed from the resolved config (noise inlined,
//! command-line overrides applied), so it identifies what was actually run.

use std::fs;
use std::path::{Path, PathBuf};

use qhe_core::circuit::{PQubitMode, StepPlan};
use qhe_core::model::EngineParams;
use qhe_core::qsim::NoiseModel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Spacing of the dense theory grid.
pub const THEORY_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    #[default]
    Eps0,
    Eps1,
    Eps2,
}

impl InitialState {
    pub const ALL: [InitialState; 3] = [InitialState::Eps0, InitialState::Eps1, InitialState::Eps2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn populations(self) -> [f64; 3] {
        let mut p = [0.0; 3];
        p[self.index()] = 1.0;
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Inline(NoiseModel),
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub engine: EngineParams,
    pub t_max: f64,
    pub t_increment: f64,
    pub n_steps: usize,
    pub shots: u64,
    pub runs: u32,
    pub seed: u64,
    pub noise: Option<NoiseSpec>,
    pub initial_state: InitialState,
    pub p_qubit_mode: PQubitMode,
    /// Overrides `engine.omega_drive` when present.
    pub omega_drive: Option<f64>,
    /// Shots per calibration column; defaults to `shots`, 0 means exact.
    pub calibration_shots: Option<u64>,
    /// Evaluations of each calibration column, averaged.
    pub calibration_repetitions: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            engine: EngineParams::standard(),
            t_max: 5.0,
            t_increment: 0.5,
            n_steps: 2,
            shots: 8192,
            runs: 5,
            seed: 2024,
            noise: None,
            initial_state: InitialState::Eps0,
            p_qubit_mode: PQubitMode::default(),
            omega_drive: None,
            calibration_shots: None,
            calibration_repetitions: 1,
        }
    }
}

/// Command-line overrides of config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub shots: Option<u64>,
    pub runs: Option<u32>,
    pub noise: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::MissingInput { path: path.to_path_buf(), source })
}

fn load_noise(path: &Path) -> Result<NoiseModel> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::MalformedConfig { path: path.to_path_buf(), reason: e.to_string() })
}

impl RunConfig {
    /// Reads a config file, applies overrides and inlines the noise model.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = read(path)?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::MalformedConfig { path: path.to_path_buf(), reason: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(NoiseSpec::Path(p)) = &cfg.noise {
            cfg.noise = Some(NoiseSpec::Inline(load_noise(&base.join(p))?));
        }
        cfg.apply(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(n) = o.steps {
            self.n_steps = n;
        }
        if let Some(s) = o.shots {
            self.shots = s;
        }
        if let Some(r) = o.runs {
            self.runs = r;
        }
        if let Some(p) = &o.noise {
            self.noise = Some(NoiseSpec::Inline(load_noise(p)?));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::InvalidConfig(m.to_string()));
        if !self.t_max.is_finite() || self.t_max < 0.0 {
            return bad("t_max must be finite and non-negative");
        }
        if !self.t_increment.is_finite() || self.t_increment <= 0.0 {
            return bad("t_increment must be positive");
        }
        if self.n_steps == 0 {
            return bad("n_steps must be at least 1");
        }
        if self.shots == 0 {
            return bad("shots must be positive");
        }
        if self.runs == 0 {
            return bad("runs must be at least 1");
        }
        if self.calibration_repetitions == 0 {
            return bad("calibration_repetitions must be at least 1");
        }
        if let Some(w) = self.omega_drive {
            if !w.is_finite() || w < 0.0 {
                return bad("omega_drive must be finite and non-negative");
            }
        }
        match &self.noise {
            Some(NoiseSpec::Inline(n)) => n.validate().map_err(|e| CliError::InvalidConfig(e.to_string()))?,
            Some(NoiseSpec::Path(_)) => return bad("noise path was not resolved"),
            None => {}
        }
        self.engine().validate().map_err(|e| CliError::InvalidConfig(e.to_string()))
    }

    pub fn engine(&self) -> EngineParams {
        match self.omega_drive {
            Some(w) => self.engine.with_drive(w),
            None => self.engine,
        }
    }

    /// Measurement grid `k · t_increment ≤ t_max`.
    pub fn time_grid(&self) -> Vec<f64> {
        uniform_grid(self.t_max, self.t_increment)
    }

    pub fn theory_grid(&self) -> Vec<f64> {
        uniform_grid(self.t_max, THEORY_STEP)
    }

    pub fn plan(&self, t: f64) -> StepPlan {
        StepPlan::new(t, self.n_steps).with_mode(self.p_qubit_mode)
    }

    /// The configured noise model, or the default synthetic one.
    pub fn noise_model(&self) -> NoiseModel {
        match &self.noise {
            Some(NoiseSpec::Inline(n)) => n.clone(),
            _ => NoiseModel::default_synthetic(qhe_core::circuit::EngineLayout::N_QUBITS),
        }
    }

    pub fn calibration_shots(&self) -> u64 {
        self.calibration_shots.unwrap_or(self.shots)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        // serde_json's default map is ordered, so object keys come out sorted.
        let value = serde_json::to_value(self).expect("config serializes");
        let digest = Sha256::digest(value.to_string().as_bytes());
        hex::encode(&digest[..8])
    }
}

fn uniform_grid(t_max: f64, step: f64) -> Vec<f64> {
    let n = (t_max / step + 1e-9).floor() as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

use std::path::PathBuf;

use qhe_core::circuit::CircuitError;
use qhe_core::gem::GemError;
use qhe_core::model::ModelError;
use qhe_core::qsim::QsimError;

/// Exit status for command-line usage errors.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    MissingInput { path: PathBuf, source: std::io::Error },
    #[error("malformed config {}: {reason}", path.display())]
    MalformedConfig { path: PathBuf, reason: String },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{} was produced by config {found}, expected {expected}", path.display())]
    HashMismatch { path: PathBuf, expected: String, found: String },
    #[error("malformed input {}: {reason}", path.display())]
    MalformedInput { path: PathBuf, reason: String },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Gem(#[from] GemError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingInput { .. } => 2,
            CliError::MalformedConfig { .. } | CliError::InvalidConfig(_) => 3,
            CliError::HashMismatch { .. } => 4,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::MissingInput { .. } => "missing_input",
            CliError::MalformedConfig { .. } => "malformed_config",
            CliError::InvalidConfig(_) => "invalid_config",
            CliError::HashMismatch { .. } => "hash_mismatch",
            CliError::MalformedInput { .. } => "malformed_input",
            CliError::Write { .. } => "write_failed",
            CliError::Model(_) => "model",
            CliError::Circuit(_) => "circuit",
            CliError::Gem(_) => "mitigation",
            CliError::Qsim(_) => "simulation",
        }
    }

    /// One-line JSON diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

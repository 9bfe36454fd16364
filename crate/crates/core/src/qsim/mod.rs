//! Exact density-matrix simulation of small qubit registers.

mod gate;
mod noise;
mod sampling;
mod state;

use alloc::string::String;

pub use gate::{ry_matrix, x_matrix, Circuit, Condition, GateOp, Polarity, QubitRole};
pub use noise::{
    apply_depolarizing, apply_readout, apply_relaxation, depolarizing_kraus, evolve, flip_confusion,
    relaxation_kraus, Confusion, NoiseModel, IDEAL_READOUT,
};
pub use sampling::{bit_string, derive_seed, observed_distribution, sample_counts, sample_distribution, Counts};
pub use state::{apply_gate, marginal_populations, reset_kraus, RegisterState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QsimError {
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} used twice by one gate")]
    RepeatedQubit(usize),
    #[error("gate angle is not finite")]
    NonFiniteAngle,
    #[error("operator dimension {found} does not match register dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("readout confusion rows must be stochastic")]
    InvalidConfusion,
    #[error("depolarizing on {0} qubits is not supported")]
    UnsupportedArity(usize),
    #[error("invalid register state: {0}")]
    InvalidState(&'static str),
    #[error("circuit labels, roles or system qubits do not match the register")]
    LayoutMismatch,
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("counts sum to {total} but shots = {shots}")]
    CountsMismatch { shots: u64, total: u64 },
    #[error("unknown outcome bit string `{0}`")]
    UnknownOutcome(String),
}

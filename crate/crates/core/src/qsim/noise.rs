use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::gate::{Circuit, GateOp};
use super::state::{apply_gate, RegisterState};
use super::QsimError;
use crate::linalg::{CMatrix, C64, ZERO};

/// Row-stochastic readout confusion matrix: `m[true][observed]`.
pub type Confusion = [[f64; 2]; 2];

pub const IDEAL_READOUT: Confusion = [[1.0, 0.0], [0.0, 1.0]];

/// Symmetric bit-flip confusion.
pub fn flip_confusion(p: f64) -> Confusion {
    [[1.0 - p, p], [p, 1.0 - p]]
}

/// Synthetic device noise.
///
/// Each one-qubit gate (and each reset) is followed by depolarizing with
/// `p_dep1`; each controlled gate by two-qubit depolarizing with `p_dep2` on
/// its control/target pair (plus `p_dep1` on a condition qubit). Every
/// barrier-delimited layer ends with amplitude damping `p_relax` on all
/// qubits. `readout[q]` is the confusion of register qubit `q`; missing
/// entries read out ideally.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NoiseModel {
    pub p_dep1: f64,
    pub p_dep2: f64,
    pub p_relax: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub readout: Vec<Confusion>,
}

impl NoiseModel {
    /// No gate noise and perfect readout.
    pub fn ideal() -> Self {
        Self { p_dep1: 0.0, p_dep2: 0.0, p_relax: 0.0, readout: Vec::new() }
    }

    /// Default stand-in for device imperfections on an `n_qubits` register.
    pub fn default_synthetic(n_qubits: usize) -> Self {
        Self { p_dep1: 0.001, p_dep2: 0.01, p_relax: 0.005, readout: vec![flip_confusion(0.02); n_qubits] }
    }

    /// Perfect gates, symmetric readout flips on every qubit.
    pub fn readout_only(n_qubits: usize, flip: f64) -> Self {
        Self { readout: vec![flip_confusion(flip); n_qubits], ..Self::ideal() }
    }

    pub fn validate(&self) -> Result<(), QsimError> {
        for p in [self.p_dep1, self.p_dep2, self.p_relax] {
            if !(0.0..=1.0).contains(&p) {
                return Err(QsimError::InvalidProbability(p));
            }
        }
        for m in &self.readout {
            for row in m {
                if row.iter().any(|x| !(0.0..=1.0).contains(x)) || (row[0] + row[1] - 1.0).abs() > 1e-12 {
                    return Err(QsimError::InvalidConfusion);
                }
            }
        }
        Ok(())
    }

    pub fn readout_for(&self, qubit: usize) -> Confusion {
        self.readout.get(qubit).copied().unwrap_or(IDEAL_READOUT)
    }

    pub fn has_gate_noise(&self) -> bool {
        self.p_dep1 > 0.0 || self.p_dep2 > 0.0 || self.p_relax > 0.0
    }
}

fn pauli(i: usize) -> CMatrix {
    let i_ = C64::new(0.0, 1.0);
    match i {
        0 => CMatrix::identity(2),
        1 => CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]),
        2 => CMatrix::from_rows(2, vec![ZERO, -i_, i_, ZERO]),
        _ => CMatrix::diagonal(&[1.0, -1.0]),
    }
}

/// Pauli Kraus set of `n`-qubit depolarizing, `n ∈ {1, 2}`:
/// `(1-p) ρ + p I/2^n Tr ρ`.
pub fn depolarizing_kraus(n: usize, p: f64) -> Vec<CMatrix> {
    assert!(n == 1 || n == 2, "depolarizing defined for one or two qubits");
    let count = 1usize << (2 * n);
    let w_rest = p / count as f64;
    let w_id = 1.0 - p + w_rest;
    (0..count)
        .map(|idx| {
            let m = if n == 1 { pauli(idx) } else { pauli(idx / 4).kron(&pauli(idx % 4)) };
            let w = if idx == 0 { w_id } else { w_rest };
            m.scale(C64::new(w.sqrt(), 0.0))
        })
        .collect()
}

/// Amplitude damping toward `|0>` with decay probability `p`.
pub fn relaxation_kraus(p: f64) -> [CMatrix; 2] {
    [
        CMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - p).sqrt()]),
        CMatrix::from_real(2, &[0.0, p.sqrt(), 0.0, 0.0]),
    ]
}

/// Depolarizing on one or two qubits.
pub fn apply_depolarizing(state: &RegisterState, qubits: &[usize], p: f64) -> Result<RegisterState, QsimError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QsimError::InvalidProbability(p));
    }
    if qubits.is_empty() || qubits.len() > 2 {
        return Err(QsimError::UnsupportedArity(qubits.len()));
    }
    for &q in qubits {
        if q >= state.n_qubits() {
            return Err(QsimError::QubitOutOfRange { qubit: q, n_qubits: state.n_qubits() });
        }
    }
    Ok(state.depolarize(qubits, p))
}

pub fn apply_relaxation(state: &RegisterState, qubit: usize, p: f64) -> Result<RegisterState, QsimError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QsimError::InvalidProbability(p));
    }
    if qubit >= state.n_qubits() {
        return Err(QsimError::QubitOutOfRange { qubit, n_qubits: state.n_qubits() });
    }
    if p == 0.0 {
        return Ok(state.clone());
    }
    Ok(state.apply_kraus(&[qubit], &relaxation_kraus(p)))
}

fn relax_all(state: RegisterState, p: f64) -> Result<RegisterState, QsimError> {
    (0..state.n_qubits()).try_fold(state, |s, q| apply_relaxation(&s, q, p))
}

fn gate_noise(state: RegisterState, op: &GateOp, noise: &NoiseModel) -> Result<RegisterState, QsimError> {
    match *op {
        GateOp::Barrier => Ok(state),
        GateOp::Ry { target, .. } | GateOp::X { target } | GateOp::Reset { target } => {
            apply_depolarizing(&state, &[target], noise.p_dep1)
        }
        GateOp::Cx { condition, control, target } | GateOp::Cry { condition, control, target, .. } => {
            let mut s = apply_depolarizing(&state, &[control, target], noise.p_dep2)?;
            if let Some(c) = condition {
                s = apply_depolarizing(&s, &[c.qubit], noise.p_dep1)?;
            }
            Ok(s)
        }
    }
}

/// Runs the circuit on `initial` by exact channel composition.
pub fn evolve(c: &Circuit, initial: &RegisterState, noise: Option<&NoiseModel>) -> Result<RegisterState, QsimError> {
    if initial.n_qubits() != c.n_qubits {
        return Err(QsimError::DimensionMismatch { expected: 1 << c.n_qubits, found: initial.matrix().dim() });
    }
    if let Some(n) = noise {
        n.validate()?;
    }
    let mut state = initial.clone();
    let mut layer_has_ops = false;
    for op in &c.ops {
        state = apply_gate(&state, op)?;
        let Some(noise) = noise else { continue };
        if matches!(op, GateOp::Barrier) {
            state = relax_all(state, noise.p_relax)?;
            layer_has_ops = false;
        } else {
            state = gate_noise(state, op, noise)?;
            layer_has_ops = true;
        }
    }
    if let Some(noise) = noise {
        if layer_has_ops {
            state = relax_all(state, noise.p_relax)?;
        }
    }
    Ok(state)
}

/// Applies per-qubit readout confusion to a distribution over measured
/// qubits (first confusion is the leftmost bit).
pub fn apply_readout(dist: &[f64], confusions: &[Confusion]) -> Vec<f64> {
    let k = confusions.len();
    assert_eq!(dist.len(), 1 << k, "distribution size does not match measured qubits");
    let mut out = vec![0.0; dist.len()];
    for (truth, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (obs, o) in out.iter_mut().enumerate() {
            let mut w = p;
            for (m, conf) in confusions.iter().enumerate() {
                let shift = k - 1 - m;
                w *= conf[(truth >> shift) & 1][(obs >> shift) & 1];
            }
            *o += w;
        }
    }
    out
}

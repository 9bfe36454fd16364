use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::gate::GateOp;
use super::QsimError;
use crate::linalg::{CMatrix, C64, ZERO};

/// Density matrix of an `n`-qubit register.
///
/// Basis index bits are read with qubit 0 as the most significant bit, so the
/// ket label `|q0 q1 … q(n-1)>` is the binary expansion of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState {
    n_qubits: usize,
    rho: CMatrix,
}

impl RegisterState {
    /// `|0…0><0…0|`
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `|index><index|`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1 << n_qubits;
        assert!(index < dim, "basis index out of range");
        Self { n_qubits, rho: CMatrix::projector(dim, index) }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self { n_qubits, rho: CMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)) }
    }

    /// Wraps an arbitrary `2^n × 2^n` operator. Channels are linear, so
    /// non-physical inputs (e.g. `|i><j|` for process tomography) are
    /// allowed; use [`RegisterState::check`] to test physicality.
    pub fn from_matrix(n_qubits: usize, rho: CMatrix) -> Result<Self, QsimError> {
        if rho.dim() != 1 << n_qubits {
            return Err(QsimError::DimensionMismatch { expected: 1 << n_qubits, found: rho.dim() });
        }
        Ok(Self { n_qubits, rho })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// Hermitian within 1e-10, trace 1 within 1e-9, no eigenvalue below -1e-8.
    pub fn check(&self) -> Result<(), QsimError> {
        if self.rho.hermiticity_error() > 1e-10 {
            return Err(QsimError::InvalidState("not Hermitian"));
        }
        if (self.trace() - 1.0).abs() > 1e-9 {
            return Err(QsimError::InvalidState("trace differs from 1"));
        }
        if !self.rho.is_psd_within(1e-8) {
            return Err(QsimError::InvalidState("negative eigenvalue"));
        }
        Ok(())
    }

    /// `ρ ⊗ σ`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &RegisterState) -> RegisterState {
        RegisterState { n_qubits: self.n_qubits + other.n_qubits, rho: self.rho.kron(&other.rho) }
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Index offsets of the `2^k` local basis states of `qubits`.
    fn offsets(&self, qubits: &[usize]) -> Vec<usize> {
        let k = qubits.len();
        (0..1usize << k)
            .map(|s| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| (s >> (k - 1 - m)) & 1 == 1)
                    .map(|(_, &q)| self.mask(q))
                    .sum()
            })
            .collect()
    }

    /// Register indices with all bits of `qubits` cleared.
    fn bases(&self, qubits: &[usize]) -> Vec<usize> {
        let used: usize = qubits.iter().map(|&q| self.mask(q)).sum();
        (0..1usize << self.n_qubits).filter(|i| i & used == 0).collect()
    }

    /// `O ρ O†` for an operator `O` acting on `qubits`.
    pub(crate) fn conjugate_local(&self, qubits: &[usize], op: &CMatrix) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        let offsets = self.offsets(qubits);
        let bases = self.bases(qubits);
        let k = offsets.len();
        debug_assert_eq!(op.dim(), k);
        let mut a = self.rho.clone();
        let mut buf = vec![ZERO; k];
        // Left multiplication: columns of ρ.
        for col in 0..dim {
            for &b in &bases {
                for (s, &off) in offsets.iter().enumerate() {
                    buf[s] = a[(b + off, col)];
                }
                for (r, &off) in offsets.iter().enumerate() {
                    let mut acc = ZERO;
                    for s in 0..k {
                        acc += op[(r, s)] * buf[s];
                    }
                    a[(b + off, col)] = acc;
                }
            }
        }
        // Right multiplication by O†: rows of Oρ.
        for row in 0..dim {
            for &b in &bases {
                for (s, &off) in offsets.iter().enumerate() {
                    buf[s] = a[(row, b + off)];
                }
                for (c, &off) in offsets.iter().enumerate() {
                    let mut acc = ZERO;
                    for s in 0..k {
                        acc += buf[s] * op[(c, s)].conj();
                    }
                    a[(row, b + off)] = acc;
                }
            }
        }
        a
    }

    /// `Σ_k K_k ρ K_k†` with the Kraus set acting on `qubits`.
    pub fn apply_kraus(&self, qubits: &[usize], kraus: &[CMatrix]) -> RegisterState {
        let mut out = CMatrix::zeros(self.rho.dim());
        for k in kraus {
            out.add_scaled(&self.conjugate_local(qubits, k), 1.0);
        }
        RegisterState { n_qubits: self.n_qubits, rho: out }
    }

    /// Replaces the state of `qubits` with the maximally mixed state with
    /// probability `p`: `(1-p) ρ + p I/2^k ⊗ Tr_qubits ρ`.
    pub(crate) fn depolarize(&self, qubits: &[usize], p: f64) -> RegisterState {
        if p == 0.0 {
            return self.clone();
        }
        let offsets = self.offsets(qubits);
        let bases = self.bases(qubits);
        let k = offsets.len() as f64;
        let mut out = self.rho.scale(C64::new(1.0 - p, 0.0));
        for &bi in &bases {
            for &bj in &bases {
                let partial: C64 = offsets.iter().map(|&o| self.rho[(bi + o, bj + o)]).sum();
                let v = partial * (p / k);
                for &o in &offsets {
                    out[(bi + o, bj + o)] += v;
                }
            }
        }
        RegisterState { n_qubits: self.n_qubits, rho: out }
    }

    /// Reduced density matrix of `qubits`, in the listed order.
    pub fn reduced(&self, qubits: &[usize]) -> CMatrix {
        let offsets = self.offsets(qubits);
        let rest: Vec<usize> = (0..self.n_qubits).filter(|q| !qubits.contains(q)).collect();
        let rest_offsets = self.offsets(&rest);
        CMatrix::from_fn(offsets.len(), |i, j| {
            rest_offsets.iter().map(|&r| self.rho[(offsets[i] + r, offsets[j] + r)]).sum()
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rho.diagonal_real()
    }
}

/// Applies one instruction. `RESET` traces the qubit out and re-prepares
/// `|0>`; `BARRIER` is the identity.
pub fn apply_gate(state: &RegisterState, g: &GateOp) -> Result<RegisterState, QsimError> {
    g.validate(state.n_qubits)?;
    Ok(match g {
        GateOp::Barrier => state.clone(),
        GateOp::Reset { target } => state.apply_kraus(&[*target], &reset_kraus()),
        unitary => {
            let u = unitary.local_unitary().expect("unitary gate");
            RegisterState { n_qubits: state.n_qubits, rho: state.conjugate_local(&unitary.qubits(), &u) }
        }
    })
}

/// `{|0><0|, |0><1|}`
pub fn reset_kraus() -> [CMatrix; 2] {
    [CMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]), CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0])]
}

/// Marginal distribution of `qubits` in the computational basis; the first
/// listed qubit is the leftmost bit of the outcome index.
pub fn marginal_populations(state: &RegisterState, qubits: &[usize]) -> Vec<f64> {
    state.reduced(qubits).diagonal_real()
}

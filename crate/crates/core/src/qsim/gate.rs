use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::QsimError;
use crate::linalg::{CMatrix, ONE, ZERO};

/// Which computational value of a condition qubit enables a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Polarity {
    OnOne,
    OnZero,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::OnOne => "on-1",
            Polarity::OnZero => "on-0",
        }
    }

    fn enabled_bit(self) -> usize {
        match self {
            Polarity::OnOne => 1,
            Polarity::OnZero => 0,
        }
    }
}

/// Extra control on a probability qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Condition {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Condition {
    pub fn on_one(qubit: usize) -> Self {
        Self { qubit, polarity: Polarity::OnOne }
    }

    pub fn on_zero(qubit: usize) -> Self {
        Self { qubit, polarity: Polarity::OnZero }
    }
}

/// One instruction of a register program. Angles are in radians and follow
/// `RY(a) = exp(-i a Y / 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum GateOp {
    Ry { target: usize, angle: f64 },
    X { target: usize },
    Cx { condition: Option<Condition>, control: usize, target: usize },
    Cry { condition: Option<Condition>, control: usize, target: usize, angle: f64 },
    Reset { target: usize },
    Barrier,
}

impl GateOp {
    pub fn ry(target: usize, angle: f64) -> Self {
        GateOp::Ry { target, angle }
    }

    pub fn x(target: usize) -> Self {
        GateOp::X { target }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        GateOp::Cx { condition: None, control, target }
    }

    pub fn cry(control: usize, target: usize, angle: f64) -> Self {
        GateOp::Cry { condition: None, control, target, angle }
    }

    pub fn with_condition(self, cond: Condition) -> Self {
        match self {
            GateOp::Cx { control, target, .. } => GateOp::Cx { condition: Some(cond), control, target },
            GateOp::Cry { control, target, angle, .. } => GateOp::Cry { condition: Some(cond), control, target, angle },
            other => other,
        }
    }

    /// Qubits touched, condition first, then control, then target.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::Ry { target, .. } | GateOp::X { target } | GateOp::Reset { target } => vec![target],
            GateOp::Cx { condition, control, target } | GateOp::Cry { condition, control, target, .. } => {
                let mut q = Vec::with_capacity(3);
                if let Some(c) = condition {
                    q.push(c.qubit);
                }
                q.push(control);
                q.push(target);
                q
            }
            GateOp::Barrier => Vec::new(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, GateOp::Reset { .. } | GateOp::Barrier)
    }

    pub fn validate(&self, n_qubits: usize) -> Result<(), QsimError> {
        let qubits = self.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= n_qubits {
                return Err(QsimError::QubitOutOfRange { qubit: q, n_qubits });
            }
            if qubits[..i].contains(&q) {
                return Err(QsimError::RepeatedQubit(q));
            }
        }
        if let GateOp::Ry { angle, .. } | GateOp::Cry { angle, .. } = self {
            if !angle.is_finite() {
                return Err(QsimError::NonFiniteAngle);
            }
        }
        Ok(())
    }

    /// Inverse gate. Reset and barrier are returned unchanged.
    pub fn inverse(&self) -> Self {
        match *self {
            GateOp::Ry { target, angle } => GateOp::Ry { target, angle: -angle },
            GateOp::Cry { condition, control, target, angle } => GateOp::Cry { condition, control, target, angle: -angle },
            other => other,
        }
    }

    /// Unitary restricted to [`GateOp::qubits`], first listed qubit most
    /// significant. `None` for non-unitary instructions.
    pub fn local_unitary(&self) -> Option<CMatrix> {
        match *self {
            GateOp::Ry { angle, .. } => Some(ry_matrix(angle)),
            GateOp::X { .. } => Some(x_matrix()),
            GateOp::Cx { condition, .. } => Some(controlled(&x_matrix(), condition)),
            GateOp::Cry { condition, angle, .. } => Some(controlled(&ry_matrix(angle), condition)),
            GateOp::Reset { .. } | GateOp::Barrier => None,
        }
    }

    /// Number of register qubits the gate acts on, excluding barriers.
    pub fn arity(&self) -> usize {
        self.qubits().len()
    }
}

pub fn ry_matrix(angle: f64) -> CMatrix {
    let (s, c) = (0.5 * angle).sin_cos();
    CMatrix::from_real(2, &[c, -s, s, c])
}

pub fn x_matrix() -> CMatrix {
    CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

/// Embeds a one-qubit `u` as the target of a control (and optional
/// condition) qubit.
fn controlled(u: &CMatrix, condition: Option<Condition>) -> CMatrix {
    let with_control = CMatrix::from_fn(4, |i, j| {
        if i >> 1 != j >> 1 {
            ZERO
        } else if i >> 1 == 0 {
            if i == j {
                ONE
            } else {
                ZERO
            }
        } else {
            u[(i & 1, j & 1)]
        }
    });
    match condition {
        None => with_control,
        Some(c) => {
            let on = c.polarity.enabled_bit();
            CMatrix::from_fn(8, |i, j| {
                if i >> 2 != j >> 2 {
                    ZERO
                } else if i >> 2 == on {
                    with_control[(i & 3, j & 3)]
                } else if i == j {
                    ONE
                } else {
                    ZERO
                }
            })
        }
    }
}

/// Role of a qubit in a register layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum QubitRole {
    System,
    Ancilla,
    Probability,
    Other,
}

/// An ordered gate program over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<GateOp>,
    /// The two measured qubits; the first is the leftmost bit of outcomes.
    pub system_qubits: [usize; 2],
    pub labels: Vec<String>,
    pub roles: Vec<QubitRole>,
}

impl Circuit {
    /// Empty circuit with generic labels `r0, r1, …`.
    pub fn new(n_qubits: usize, system_qubits: [usize; 2]) -> Self {
        use core::fmt::Write;
        let labels = (0..n_qubits)
            .map(|i| {
                let mut s = String::new();
                let _ = write!(s, "r{i}");
                s
            })
            .collect();
        let roles = (0..n_qubits)
            .map(|i| if system_qubits.contains(&i) { QubitRole::System } else { QubitRole::Other })
            .collect();
        Self { n_qubits, ops: Vec::new(), system_qubits, labels, roles }
    }

    pub fn push(&mut self, op: GateOp) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn extend<I: IntoIterator<Item = GateOp>>(&mut self, ops: I) -> &mut Self {
        self.ops.extend(ops);
        self
    }

    /// Same register and labels, different program.
    pub fn with_ops(&self, ops: Vec<GateOp>) -> Self {
        Self { ops, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), QsimError> {
        if self.labels.len() != self.n_qubits || self.roles.len() != self.n_qubits {
            return Err(QsimError::LayoutMismatch);
        }
        let [a, b] = self.system_qubits;
        if a == b || a >= self.n_qubits || b >= self.n_qubits {
            return Err(QsimError::LayoutMismatch);
        }
        self.ops.iter().try_for_each(|op| op.validate(self.n_qubits))
    }

    pub fn count(&self, pred: impl Fn(&GateOp) -> bool) -> usize {
        self.ops.iter().filter(|op| pred(op)).count()
    }

    pub fn label(&self, q: usize) -> &str {
        &self.labels[q]
    }

    pub fn qubit_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

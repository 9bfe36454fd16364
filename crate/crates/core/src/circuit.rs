//! The six-qubit engine circuit and its calibration circuits.
//!
//! Logical mapping of the engine levels onto the system qubits `(q0, q1)`:
//! `|ε0> = |00>`, `|ε1> = |01>`, `|ε2> = |10>`. The fourth state `|11>` is
//! unphysical for the engine and is reported as `ρXX`.
//!
//! Each bath step is a generalized amplitude damping (GAD) channel on one
//! system qubit, dilated onto an ancilla and a probability qubit. The
//! probability qubit is rotated to `cos(α/2)|0> + sin(α/2)|1>` with
//! `cos²(α/2) = p`; its `|0>` branch drives damping and its `|1>` branch
//! drives raising (the damping dilation conjugated by `X` on the system).
//!
//! # Text format
//!
//! ```text
//! # qubits q0 q1 a0 a1 p0 p1
//! # roles system system ancilla ancilla probability probability
//! # system q0 q1
//! X q1
//! RY p0 0.5192472648256224
//! CRY p0:on-0 q0 a0 1.3440047802611398
//! CX a0 q0
//! CX p0:on-1 a0 q0
//! RESET a0
//! BARRIER
//! ```
//!
//! One instruction per line; operands are qubit labels, an optional
//! `label:on-0` / `label:on-1` condition precedes the control, and angles are
//! printed with the shortest representation that parses back to the same
//! `f64`. Lines starting with `#` other than the three headers are comments.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::model::{derive_params, DerivedParams, EngineParams, ModelError};
use crate::qsim::{
    evolve, marginal_populations, observed_distribution, sample_counts, Circuit, Condition, Confusion, Counts, GateOp,
    NoiseModel, Polarity, QsimError, QubitRole, RegisterState,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("initial state index {0} is not an engine level (expected 0, 1 or 2)")]
    InvalidInitialState(usize),
    #[error("step plan needs n_steps >= 1 and a finite t_total >= 0")]
    InvalidPlan,
    #[error("cross coupling `{0}` is nonzero; the GAD circuit realizes only the resonant couplings")]
    CrossCouplingUnsupported(&'static str),
    #[error("circuit has no two-block split for calibration")]
    NoTwoBlockSplit,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Register indices of the six engine qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineLayout {
    pub q0: usize,
    pub q1: usize,
    pub a0: usize,
    pub a1: usize,
    pub p0: usize,
    pub p1: usize,
}

impl Default for EngineLayout {
    fn default() -> Self {
        Self::STANDARD
    }
}

impl EngineLayout {
    pub const STANDARD: EngineLayout = EngineLayout { q0: 0, q1: 1, a0: 2, a1: 3, p0: 4, p1: 5 };
    pub const N_QUBITS: usize = 6;

    fn entries(&self) -> [(usize, &'static str, QubitRole); 6] {
        [
            (self.q0, "q0", QubitRole::System),
            (self.q1, "q1", QubitRole::System),
            (self.a0, "a0", QubitRole::Ancilla),
            (self.a1, "a1", QubitRole::Ancilla),
            (self.p0, "p0", QubitRole::Probability),
            (self.p1, "p1", QubitRole::Probability),
        ]
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut seen = [false; Self::N_QUBITS];
        for (q, _, _) in self.entries() {
            if q >= Self::N_QUBITS || seen[q] {
                return Err(QsimError::LayoutMismatch.into());
            }
            seen[q] = true;
        }
        Ok(())
    }

    /// Empty six-qubit circuit with engine labels and roles.
    pub fn empty_circuit(&self) -> Circuit {
        let mut c = Circuit::new(Self::N_QUBITS, [self.q0, self.q1]);
        for (q, label, role) in self.entries() {
            c.labels[q] = label.to_string();
            c.roles[q] = role;
        }
        c
    }

    fn bath_qubits(&self, bath: Bath) -> (usize, usize, usize) {
        match bath {
            Bath::Hot => (self.q0, self.a0, self.p0),
            Bath::Cold => (self.q1, self.a1, self.p1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bath {
    Hot,
    Cold,
}

/// Handling of the probability qubits between steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PQubitMode {
    /// Rotate `p0`, `p1` once before the first step.
    PrepareOnce,
    /// Reset and re-rotate `p0`, `p1` before every step, so each step is an
    /// independent GAD channel.
    #[default]
    ReprepareEachStep,
}

impl PQubitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PQubitMode::PrepareOnce => "prepare-once",
            PQubitMode::ReprepareEachStep => "reprepare-each-step",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub t_total: f64,
    pub n_steps: usize,
    pub mode: PQubitMode,
}

impl StepPlan {
    pub fn new(t_total: f64, n_steps: usize) -> Self {
        Self { t_total, n_steps, mode: PQubitMode::default() }
    }

    pub fn with_mode(mut self, mode: PQubitMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn dt(&self) -> f64 {
        self.t_total / self.n_steps as f64
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.n_steps == 0 || !self.t_total.is_finite() || self.t_total < 0.0 {
            return Err(CircuitError::InvalidPlan);
        }
        Ok(())
    }
}

/// X gates preparing `|ε_index>` from `|00>`.
pub fn encode_initial(eps_index: usize, layout: &EngineLayout) -> Result<Vec<GateOp>, CircuitError> {
    match eps_index {
        0 => Ok(Vec::new()),
        1 => Ok(vec![GateOp::x(layout.q1)]),
        2 => Ok(vec![GateOp::x(layout.q0)]),
        other => Err(CircuitError::InvalidInitialState(other)),
    }
}

/// X gates preparing computational basis state `j` (`0..4`, `q0` leftmost)
/// of the system qubits.
pub fn basis_preparation(j: usize, layout: &EngineLayout) -> Vec<GateOp> {
    let mut ops = Vec::new();
    if j & 0b10 != 0 {
        ops.push(GateOp::x(layout.q0));
    }
    if j & 0b01 != 0 {
        ops.push(GateOp::x(layout.q1));
    }
    ops
}

/// GAD dilation on `(system, ancilla, probability)` with CRY angle `2θ`.
///
/// With the ancilla in `|0>`, the system channel is
/// `p·AD(sin²θ) + (1-p)·AR(sin²θ)` where `p` is the `|0>` weight of the
/// probability qubit.
pub fn gad_fragment(system: usize, ancilla: usize, prob: usize, theta: f64) -> Vec<GateOp> {
    let on0 = Condition::on_zero(prob);
    let on1 = Condition::on_one(prob);
    vec![
        GateOp::cry(system, ancilla, 2.0 * theta).with_condition(on0),
        GateOp::cx(ancilla, system),
        GateOp::cx(prob, system),
        GateOp::cry(system, ancilla, 2.0 * theta).with_condition(on1),
        GateOp::cx(ancilla, system).with_condition(on1),
        GateOp::cx(prob, system),
    ]
}

pub fn build_gad(bath: Bath, d: &DerivedParams, layout: &EngineLayout) -> Vec<GateOp> {
    let (q, a, p) = layout.bath_qubits(bath);
    let theta = match bath {
        Bath::Hot => d.theta_hd,
        Bath::Cold => d.theta_cd,
    };
    gad_fragment(q, a, p, theta)
}

pub fn build_gad_hot(d: &DerivedParams) -> Vec<GateOp> {
    build_gad(Bath::Hot, d, &EngineLayout::STANDARD)
}

pub fn build_gad_cold(d: &DerivedParams) -> Vec<GateOp> {
    build_gad(Bath::Cold, d, &EngineLayout::STANDARD)
}

fn reject_cross_couplings(p: &EngineParams) -> Result<(), CircuitError> {
    if p.gamma_h10 != 0.0 {
        return Err(CircuitError::CrossCouplingUnsupported("gamma_h10"));
    }
    if p.gamma_c20 != 0.0 {
        return Err(CircuitError::CrossCouplingUnsupported("gamma_c20"));
    }
    Ok(())
}

/// Engine circuit on the standard layout.
pub fn build_engine_circuit(params: &EngineParams, plan: &StepPlan, init: usize) -> Result<Circuit, CircuitError> {
    build_engine_circuit_on(params, plan, init, &EngineLayout::STANDARD)
}

pub fn build_engine_circuit_on(
    params: &EngineParams,
    plan: &StepPlan,
    init: usize,
    layout: &EngineLayout,
) -> Result<Circuit, CircuitError> {
    plan.validate()?;
    layout.validate()?;
    reject_cross_couplings(params)?;
    let d = derive_params(params, plan.dt())?;
    let mut c = layout.empty_circuit();
    c.extend(encode_initial(init, layout)?);
    let prep = [GateOp::ry(layout.p0, d.alpha_h), GateOp::ry(layout.p1, d.alpha_c)];
    c.extend(prep);
    for step in 0..plan.n_steps {
        if step > 0 {
            c.push(GateOp::Barrier);
            if plan.mode == PQubitMode::ReprepareEachStep {
                c.extend([GateOp::Reset { target: layout.p0 }, GateOp::Reset { target: layout.p1 }]);
                c.extend(prep);
            }
        }
        c.extend(build_gad(Bath::Hot, &d, layout));
        c.extend(build_gad(Bath::Cold, &d, layout));
        if step + 1 < plan.n_steps {
            c.extend([GateOp::Reset { target: layout.a0 }, GateOp::Reset { target: layout.a1 }]);
        }
    }
    Ok(c)
}

/// `(ρ00, ρ11, ρ22, ρXX)` from relative frequencies of `00, 01, 10, 11`.
pub fn populations_from_counts(c: &Counts) -> Result<[f64; 4], CircuitError> {
    let f = c.frequencies(2)?;
    Ok([f[0], f[1], f[2], f[3]])
}

/// Exact system-qubit distribution `(ρ00, ρ11, ρ22, ρXX)` of a circuit run
/// from `|0…0>`, before readout.
pub fn register_populations(c: &Circuit, noise: Option<&NoiseModel>) -> Result<[f64; 4], CircuitError> {
    let out = evolve(c, &RegisterState::zero(c.n_qubits), noise)?;
    let m = marginal_populations(&out, &c.system_qubits);
    Ok([m[0], m[1], m[2], m[3]])
}

fn system_readout(c: &Circuit, noise: Option<&NoiseModel>) -> Vec<Confusion> {
    match noise {
        Some(n) if !n.readout.is_empty() => c.system_qubits.iter().map(|&q| n.readout_for(q)).collect(),
        _ => Vec::new(),
    }
}

/// Exact distribution of measured outcomes `00, 01, 10, 11` of the system
/// qubits, including gate noise and readout confusion.
pub fn observed_populations(c: &Circuit, noise: Option<&NoiseModel>) -> Result<[f64; 4], CircuitError> {
    let out = evolve(c, &RegisterState::zero(c.n_qubits), noise)?;
    let m = observed_distribution(&out, &c.system_qubits, &system_readout(c, noise))?;
    Ok([m[0], m[1], m[2], m[3]])
}

/// Runs the circuit and samples `shots` system-qubit measurements.
pub fn sample_circuit(c: &Circuit, noise: Option<&NoiseModel>, shots: u64, seed: u64) -> Result<Counts, CircuitError> {
    let out = evolve(c, &RegisterState::zero(c.n_qubits), noise)?;
    let labels = [c.label(c.system_qubits[0]), c.label(c.system_qubits[1])];
    Ok(sample_counts(&out, &c.system_qubits, &labels, shots, &system_readout(c, noise), seed)?)
}

/// Observed outcome distribution from `shots` samples, or the exact one
/// when `shots == 0`.
pub fn measure_populations(
    c: &Circuit,
    noise: Option<&NoiseModel>,
    shots: u64,
    seed: u64,
) -> Result<[f64; 4], CircuitError> {
    if shots == 0 {
        observed_populations(c, noise)
    } else {
        populations_from_counts(&sample_circuit(c, noise, shots, seed)?)
    }
}

fn is_gad_gate(op: &GateOp) -> bool {
    matches!(op, GateOp::Cx { .. } | GateOp::Cry { .. })
}

/// The contiguous controlled-gate block of each barrier-delimited step.
fn gad_blocks(engine: &Circuit) -> Result<Vec<Vec<GateOp>>, CircuitError> {
    let mut blocks = Vec::new();
    for segment in engine.ops.split(|op| matches!(op, GateOp::Barrier)) {
        let start = segment.iter().position(is_gad_gate).ok_or(CircuitError::NoTwoBlockSplit)?;
        let len = segment[start..].iter().take_while(|op| is_gad_gate(op)).count();
        if segment[start + len..].iter().any(is_gad_gate) {
            return Err(CircuitError::NoTwoBlockSplit);
        }
        blocks.push(segment[start..start + len].to_vec());
    }
    if blocks.len() < 2 {
        return Err(CircuitError::NoTwoBlockSplit);
    }
    Ok(blocks)
}

fn inverse_of(block: &[GateOp]) -> impl Iterator<Item = GateOp> + '_ {
    block.iter().rev().map(GateOp::inverse)
}

/// Half-circuit identity circuits `(C1, C2)` for readout calibration.
///
/// The engine is cut at its middle barrier. `C1` runs the first half's GAD
/// blocks and then their inverse; `C2` runs the inverse of the second half's
/// blocks and then the blocks. Both start with the probability-qubit
/// rotations of the engine, have no resets, and contain one barrier at the
/// cut. Basis preparation is left to the caller.
pub fn build_calibration_circuits(engine: &Circuit) -> Result<(Circuit, Circuit), CircuitError> {
    engine.validate()?;
    let blocks = gad_blocks(engine)?;
    let prob: Vec<usize> =
        (0..engine.n_qubits).filter(|&q| engine.roles[q] == QubitRole::Probability).collect();
    let prep: Vec<GateOp> = engine
        .ops
        .iter()
        .take_while(|op| !is_gad_gate(op))
        .filter(|op| matches!(op, GateOp::Ry { target, .. } if prob.contains(target)))
        .copied()
        .collect();
    let half = blocks.len().div_ceil(2);
    let first: Vec<GateOp> = blocks[..half].concat();
    let second: Vec<GateOp> = blocks[half..].concat();

    let mut c1 = engine.with_ops(prep.clone());
    c1.extend(first.iter().copied()).push(GateOp::Barrier).extend(inverse_of(&first));
    let mut c2 = engine.with_ops(prep);
    c2.extend(inverse_of(&second)).push(GateOp::Barrier).extend(second.iter().copied());
    Ok((c1, c2))
}

fn format_op(c: &Circuit, op: &GateOp, out: &mut String) {
    let l = |q: usize| c.label(q);
    let cond = |cd: &Option<Condition>| match cd {
        Some(cd) => format!("{}:{} ", l(cd.qubit), cd.polarity.as_str()),
        None => String::new(),
    };
    let _ = match op {
        GateOp::Ry { target, angle } => writeln!(out, "RY {} {}", l(*target), angle),
        GateOp::X { target } => writeln!(out, "X {}", l(*target)),
        GateOp::Cx { condition, control, target } => {
            writeln!(out, "CX {}{} {}", cond(condition), l(*control), l(*target))
        }
        GateOp::Cry { condition, control, target, angle } => {
            writeln!(out, "CRY {}{} {} {}", cond(condition), l(*control), l(*target), angle)
        }
        GateOp::Reset { target } => writeln!(out, "RESET {}", l(*target)),
        GateOp::Barrier => writeln!(out, "BARRIER"),
    };
}

fn role_name(r: QubitRole) -> &'static str {
    match r {
        QubitRole::System => "system",
        QubitRole::Ancilla => "ancilla",
        QubitRole::Probability => "probability",
        QubitRole::Other => "other",
    }
}

/// Serializes to the line-oriented text format described in the module docs.
pub fn to_text(c: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qubits {}", c.labels.join(" "));
    let roles: Vec<&str> = c.roles.iter().map(|&r| role_name(r)).collect();
    let _ = writeln!(out, "# roles {}", roles.join(" "));
    let _ = writeln!(out, "# system {} {}", c.label(c.system_qubits[0]), c.label(c.system_qubits[1]));
    for op in &c.ops {
        format_op(c, op, &mut out);
    }
    out
}

/// Parses the text format. The `# qubits` and `# system` headers are
/// required and must precede the first instruction.
pub fn parse_text(text: &str) -> Result<Circuit, CircuitError> {
    let mut labels: Option<Vec<String>> = None;
    let mut roles: Option<Vec<QubitRole>> = None;
    let mut system: Option<[String; 2]> = None;
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |reason: &str| CircuitError::Parse { line: line_no, reason: reason.to_string() };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            match words.next() {
                Some("qubits") => labels = Some(words.map(String::from).collect()),
                Some("roles") => {
                    let parsed: Option<Vec<QubitRole>> = words
                        .map(|w| match w {
                            "system" => Some(QubitRole::System),
                            "ancilla" => Some(QubitRole::Ancilla),
                            "probability" => Some(QubitRole::Probability),
                            "other" => Some(QubitRole::Other),
                            _ => None,
                        })
                        .collect();
                    roles = Some(parsed.ok_or_else(|| err("unknown qubit role"))?);
                }
                Some("system") => {
                    let w: Vec<&str> = words.collect();
                    if w.len() != 2 {
                        return Err(err("`# system` needs exactly two labels"));
                    }
                    system = Some([w[0].to_string(), w[1].to_string()]);
                }
                _ => {}
            }
            continue;
        }
        let labels = labels.as_ref().ok_or_else(|| err("instruction before `# qubits` header"))?;
        let qubit = |w: &str| labels.iter().position(|l| l == w).ok_or_else(|| err("unknown qubit label"));
        let angle = |w: &str| w.parse::<f64>().map_err(|_| err("malformed angle"));
        let condition = |w: &str| -> Result<Condition, CircuitError> {
            let (label, pol) = w.split_once(':').ok_or_else(|| err("malformed condition"))?;
            let polarity = match pol {
                "on-1" => Polarity::OnOne,
                "on-0" => Polarity::OnZero,
                _ => return Err(err("condition polarity must be on-0 or on-1")),
            };
            Ok(Condition { qubit: qubit(label)?, polarity })
        };
        let w: Vec<&str> = line.split_whitespace().collect();
        let op = match (w[0], &w[1..]) {
            ("RY", [t, a]) => GateOp::ry(qubit(t)?, angle(a)?),
            ("X", [t]) => GateOp::x(qubit(t)?),
            ("CX", [c, t]) => GateOp::cx(qubit(c)?, qubit(t)?),
            ("CX", [cd, c, t]) => GateOp::cx(qubit(c)?, qubit(t)?).with_condition(condition(cd)?),
            ("CRY", [c, t, a]) => GateOp::cry(qubit(c)?, qubit(t)?, angle(a)?),
            ("CRY", [cd, c, t, a]) => GateOp::cry(qubit(c)?, qubit(t)?, angle(a)?).with_condition(condition(cd)?),
            ("RESET", [t]) => GateOp::Reset { target: qubit(t)? },
            ("BARRIER", []) => GateOp::Barrier,
            _ => return Err(err("unrecognized instruction")),
        };
        op.validate(labels.len()).map_err(|e| CircuitError::Parse { line: line_no, reason: e.to_string() })?;
        ops.push(op);
    }
    let labels = labels.ok_or(CircuitError::Parse { line: 0, reason: "missing `# qubits` header".into() })?;
    let system = system.ok_or(CircuitError::Parse { line: 0, reason: "missing `# system` header".into() })?;
    let find = |s: &str| {
        labels
            .iter()
            .position(|l| l == s)
            .ok_or(CircuitError::Parse { line: 0, reason: format!("unknown system qubit `{s}`") })
    };
    let system_qubits = [find(&system[0])?, find(&system[1])?];
    let mut c = Circuit::new(labels.len(), system_qubits);
    c.labels = labels;
    if let Some(r) = roles {
        c.roles = r;
    }
    c.ops = ops;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_circuit(t: f64, init: usize, mode: PQubitMode) -> Circuit {
        build_engine_circuit(&EngineParams::standard(), &StepPlan::new(t, 2).with_mode(mode), init).unwrap()
    }

    #[test]
    fn encoding_follows_logical_mapping() {
        let l = EngineLayout::STANDARD;
        assert!(encode_initial(0, &l).unwrap().is_empty());
        assert_eq!(encode_initial(1, &l).unwrap(), vec![GateOp::x(1)]);
        assert_eq!(encode_initial(2, &l).unwrap(), vec![GateOp::x(0)]);
        assert_eq!(encode_initial(3, &l), Err(CircuitError::InvalidInitialState(3)));
    }

    #[test]
    fn zero_time_keeps_encoding() {
        for init in 0..3 {
            let pops = register_populations(&standard_circuit(0.0, init, PQubitMode::default()), None).unwrap();
            let mut expected = [0.0; 4];
            expected[[0, 1, 2][init]] = 1.0;
            for k in 0..4 {
                assert!((pops[k] - expected[k]).abs() < 1e-12, "init {init}: {pops:?}");
            }
        }
    }

    #[test]
    fn reset_count_in_prepare_once_mode() {
        for n in 1..5 {
            let plan = StepPlan::new(5.0, n).with_mode(PQubitMode::PrepareOnce);
            let c = build_engine_circuit(&EngineParams::standard(), &plan, 0).unwrap();
            assert_eq!(c.n_qubits, 6);
            assert_eq!(c.count(|op| matches!(op, GateOp::Reset { .. })), 2 * (n - 1));
        }
    }

    #[test]
    fn cross_couplings_rejected() {
        let p = EngineParams { gamma_c20: 0.1, ..EngineParams::standard() };
        assert_eq!(
            build_engine_circuit(&p, &StepPlan::new(1.0, 2), 0),
            Err(CircuitError::CrossCouplingUnsupported("gamma_c20"))
        );
    }

    #[test]
    fn counts_decode_to_populations() {
        let mut counts = alloc::collections::BTreeMap::new();
        counts.insert("10".to_string(), 4096);
        counts.insert("01".to_string(), 4096);
        let c = Counts { shots: 8192, bit_order: "q0q1".into(), counts };
        assert_eq!(populations_from_counts(&c).unwrap(), [0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn calibration_circuits_are_identities() {
        let engine = standard_circuit(5.0, 0, PQubitMode::default());
        let (c1, c2) = build_calibration_circuits(&engine).unwrap();
        for c in [&c1, &c2] {
            assert_eq!(c.count(|op| matches!(op, GateOp::Reset { .. })), 0);
            for j in 0..4 {
                let mut prepared = c.with_ops(basis_preparation(j, &EngineLayout::STANDARD));
                prepared.extend(c.ops.iter().copied());
                let pops = register_populations(&prepared, None).unwrap();
                assert!((pops[j] - 1.0).abs() < 1e-10, "basis {j}: {pops:?}");
            }
        }
    }

    #[test]
    fn single_step_has_no_split() {
        let c = build_engine_circuit(&EngineParams::standard(), &StepPlan::new(1.0, 1), 0).unwrap();
        assert_eq!(build_calibration_circuits(&c), Err(CircuitError::NoTwoBlockSplit));
    }

    #[test]
    fn text_round_trip() {
        let c = standard_circuit(3.5, 1, PQubitMode::ReprepareEachStep);
        let text = to_text(&c);
        assert!(text.starts_with("# qubits q0 q1 a0 a1 p0 p1\n"));
        assert!(text.contains("CRY p0:on-0 q0 a0 "));
        assert!(text.contains("CX p1:on-1 a1 q1\n"));
        assert_eq!(parse_text(&text).unwrap(), c);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "# qubits q0 q1\n# system q0 q1\nX q0\nCX q0 q7\n";
        assert!(matches!(parse_text(text), Err(CircuitError::Parse { line: 4, .. })));
        let text = "# qubits q0 q1\n# system q0 q1\nRY q0 abc\n";
        assert!(matches!(parse_text(text), Err(CircuitError::Parse { line: 3, .. })));
        assert!(matches!(parse_text("X q0\n"), Err(CircuitError::Parse { line: 1, .. })));
    }
}

//! Readout calibration from half-circuit identities and constrained
//! least-squares mitigation.
//!
//! Both calibration circuits are ideal identities on the system qubits, so
//! the outcome distribution observed after preparing basis state `j` is the
//! device response to `j`. Column `j` of `M1` (`M2`) holds that response for
//! `C1` (`C2`), and `M_Q = (M1 + M2) / 2`. A raw distribution `v` is
//! mitigated by minimizing `‖v − M_Q x‖²` over the probability simplex.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::circuit::{basis_preparation, CircuitError, EngineLayout};
use crate::linalg::solve_dense;
use crate::qsim::{bit_string, derive_seed, Circuit};

pub const N_OUTCOMES: usize = 4;

/// Projected-gradient norm at which the solver stops.
pub const KKT_TOLERANCE: f64 = 1e-10;

const MAX_ITERATIONS: usize = 200_000;

pub type Matrix4 = [[f64; N_OUTCOMES]; N_OUTCOMES];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GemError {
    #[error("input contains NaN or infinite entries")]
    NonFinite,
    #[error("raw data is not a probability distribution")]
    NotADistribution,
    #[error("vectors have different lengths ({0} and {1})")]
    DimensionMismatch(usize, usize),
    #[error("calibration needs at least one repetition")]
    NoRepetitions,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Averaged response matrix `M_Q` with the per-circuit matrices it came from.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CalibrationMatrix {
    pub m_q: Matrix4,
    pub m1: Matrix4,
    pub m2: Matrix4,
    pub labels: Vec<String>,
    /// Shots per column and repetition; 0 for exact evaluation.
    pub shots: u64,
    pub seed: u64,
    pub repetitions: u32,
}

impl CalibrationMatrix {
    /// Wraps a known response matrix (used as both halves).
    pub fn from_matrix(m: Matrix4) -> Self {
        Self { m_q: m, m1: m, m2: m, labels: outcome_labels(), shots: 0, seed: 0, repetitions: 1 }
    }

    /// Largest deviation of a column sum from 1.
    pub fn column_sum_error(&self) -> f64 {
        (0..N_OUTCOMES)
            .map(|j| ((0..N_OUTCOMES).map(|i| self.m_q[i][j]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &[f64; N_OUTCOMES]) -> [f64; N_OUTCOMES] {
        mat_vec(&self.m_q, x)
    }

    pub fn mitigate(&self, v: &[f64; N_OUTCOMES]) -> Result<MitigationResult, GemError> {
        mitigate(v, &self.m_q)
    }
}

pub fn outcome_labels() -> Vec<String> {
    (0..N_OUTCOMES).map(|i| bit_string(i, 2)).collect()
}

/// Builds `M_Q` from calibration circuits `c1`, `c2`.
///
/// `run(circuit, shots, seed)` returns the observed outcome distribution of
/// a circuit (exact when `shots == 0`). Each column is averaged over
/// `repetitions` evaluations with independent derived seeds.
pub fn build_calibration_matrix<F>(
    mut run: F,
    c1: &Circuit,
    c2: &Circuit,
    layout: &EngineLayout,
    shots: u64,
    seed: u64,
    repetitions: u32,
) -> Result<CalibrationMatrix, GemError>
where
    F: FnMut(&Circuit, u64, u64) -> Result<[f64; N_OUTCOMES], GemError>,
{
    if repetitions == 0 {
        return Err(GemError::NoRepetitions);
    }
    let mut halves = [[[0.0; N_OUTCOMES]; N_OUTCOMES]; 2];
    for (h, c) in [c1, c2].into_iter().enumerate() {
        for j in 0..N_OUTCOMES {
            let mut prepared = c.with_ops(basis_preparation(j, layout));
            prepared.extend(c.ops.iter().copied());
            for rep in 0..repetitions {
                let s = derive_seed(seed, &[h as u64 + 1, j as u64, rep as u64]);
                let dist = run(&prepared, shots, s)?;
                for i in 0..N_OUTCOMES {
                    halves[h][i][j] += dist[i] / repetitions as f64;
                }
            }
        }
    }
    let [m1, m2] = halves;
    let mut m_q = [[0.0; N_OUTCOMES]; N_OUTCOMES];
    for i in 0..N_OUTCOMES {
        for j in 0..N_OUTCOMES {
            m_q[i][j] = 0.5 * (m1[i][j] + m2[i][j]);
        }
    }
    Ok(CalibrationMatrix { m_q, m1, m2, labels: outcome_labels(), shots, seed, repetitions })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MitigationResult {
    pub v: [f64; N_OUTCOMES],
    pub x: [f64; N_OUTCOMES],
    /// `‖v − M x‖²`
    pub residual: f64,
    /// Projected-gradient iterations spent polishing the active-set solution.
    pub iterations: usize,
}

fn mat_vec(m: &Matrix4, x: &[f64; N_OUTCOMES]) -> [f64; N_OUTCOMES] {
    let mut out = [0.0; N_OUTCOMES];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    out
}

/// `‖v − M x‖²`
pub fn objective(v: &[f64; N_OUTCOMES], m: &Matrix4, x: &[f64; N_OUTCOMES]) -> f64 {
    let mx = mat_vec(m, x);
    v.iter().zip(&mx).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn gradient(v: &[f64; N_OUTCOMES], m: &Matrix4, x: &[f64; N_OUTCOMES]) -> [f64; N_OUTCOMES] {
    let mx = mat_vec(m, x);
    let mut g = [0.0; N_OUTCOMES];
    for (j, gj) in g.iter_mut().enumerate() {
        *gj = 2.0 * (0..N_OUTCOMES).map(|i| m[i][j] * (mx[i] - v[i])).sum::<f64>();
    }
    g
}

/// Euclidean projection onto `{x ≥ 0, Σx = 1}`.
pub fn project_simplex(y: &[f64; N_OUTCOMES]) -> [f64; N_OUTCOMES] {
    let mut u = *y;
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            tau = t;
        }
    }
    y.map(|yi| (yi - tau).max(0.0))
}

fn pg_norm(v: &[f64; N_OUTCOMES], m: &Matrix4, x: &[f64; N_OUTCOMES], step: f64) -> f64 {
    let g = gradient(v, m, x);
    let trial: [f64; N_OUTCOMES] = core::array::from_fn(|i| x[i] - step * g[i]);
    let p = project_simplex(&trial);
    x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() / step
}

/// Minimizer of the least-squares objective restricted to the face
/// `support`, if the equality-constrained system is nonsingular.
fn face_solution(v: &[f64; N_OUTCOMES], m: &Matrix4, support: &[usize]) -> Option<[f64; N_OUTCOMES]> {
    let k = support.len();
    let mut a = vec![vec![0.0; k + 1]; k + 1];
    let mut b = vec![0.0; k + 1];
    for (r, &jr) in support.iter().enumerate() {
        for (c, &jc) in support.iter().enumerate() {
            a[r][c] = 2.0 * (0..N_OUTCOMES).map(|i| m[i][jr] * m[i][jc]).sum::<f64>();
        }
        a[r][k] = 1.0;
        a[k][r] = 1.0;
        b[r] = 2.0 * (0..N_OUTCOMES).map(|i| m[i][jr] * v[i]).sum::<f64>();
    }
    b[k] = 1.0;
    let sol = solve_dense(a, b, 1e-13)?;
    let mut x = [0.0; N_OUTCOMES];
    for (r, &j) in support.iter().enumerate() {
        if sol[r] < -1e-12 {
            return None;
        }
        x[j] = sol[r].max(0.0);
    }
    let s: f64 = x.iter().sum();
    Some(x.map(|xi| xi / s))
}

/// Simplex-constrained least squares `argmin ‖v − M x‖²`.
///
/// Every face of the simplex is solved in closed form and the best feasible
/// candidate is polished by projected gradient until the projected-gradient
/// norm drops below [`KKT_TOLERANCE`].
pub fn mitigate(v: &[f64; N_OUTCOMES], m: &Matrix4) -> Result<MitigationResult, GemError> {
    if v.iter().chain(m.iter().flatten()).any(|x| !x.is_finite()) {
        return Err(GemError::NonFinite);
    }
    if v.iter().any(|&x| x < -1e-9) || (v.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
        return Err(GemError::NotADistribution);
    }
    let mut best: Option<([f64; N_OUTCOMES], f64)> = None;
    for mask in 1usize..(1 << N_OUTCOMES) {
        let support: Vec<usize> = (0..N_OUTCOMES).filter(|j| mask >> j & 1 == 1).collect();
        if let Some(x) = face_solution(v, m, &support) {
            let f = objective(v, m, &x);
            if best.is_none_or(|(_, fb)| f < fb) {
                best = Some((x, f));
            }
        }
    }
    let mut x = best.map_or([1.0 / N_OUTCOMES as f64; N_OUTCOMES], |(x, _)| x);

    // Lipschitz constant of the gradient: 2 λmax(MᵀM) ≤ 2 ‖M‖_F².
    let lipschitz = 2.0 * m.iter().flatten().map(|a| a * a).sum::<f64>();
    let step = if lipschitz > 0.0 { 1.0 / lipschitz } else { 1.0 };
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && pg_norm(v, m, &x, step) > KKT_TOLERANCE {
        let g = gradient(v, m, &x);
        x = project_simplex(&core::array::from_fn(|i| x[i] - step * g[i]));
        iterations += 1;
    }
    Ok(MitigationResult { v: *v, x, residual: objective(v, m, &x), iterations })
}

/// Distances of raw and calibrated data to a reference distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ImprovementReport {
    pub l1_raw: f64,
    pub l1_calibrated: f64,
    pub l2_raw: f64,
    pub l2_calibrated: f64,
    /// `l1_raw − l1_calibrated`; positive when calibration helps.
    pub l1_improvement: f64,
    pub l2_improvement: f64,
}

pub fn improvement_report(raw: &[f64], calibrated: &[f64], reference: &[f64]) -> Result<ImprovementReport, GemError> {
    if raw.len() != reference.len() {
        return Err(GemError::DimensionMismatch(raw.len(), reference.len()));
    }
    if calibrated.len() != reference.len() {
        return Err(GemError::DimensionMismatch(calibrated.len(), reference.len()));
    }
    let l1 = |a: &[f64]| a.iter().zip(reference).map(|(x, y)| (x - y).abs()).sum::<f64>();
    let l2 = |a: &[f64]| a.iter().zip(reference).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let (l1_raw, l1_calibrated) = (l1(raw), l1(calibrated));
    let (l2_raw, l2_calibrated) = (l2(raw), l2(calibrated));
    Ok(ImprovementReport {
        l1_raw,
        l1_calibrated,
        l2_raw,
        l2_calibrated,
        l1_improvement: l1_raw - l1_calibrated,
        l2_improvement: l2_raw - l2_calibrated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flip_kron(p: f64) -> Matrix4 {
        let k = [[1.0 - p, p], [p, 1.0 - p]];
        core::array::from_fn(|i| core::array::from_fn(|j| k[i >> 1][j >> 1] * k[i & 1][j & 1]))
    }

    const IDENTITY: Matrix4 = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];

    #[test]
    fn identity_matrix_returns_raw() {
        let v = [0.7, 0.1, 0.15, 0.05];
        let r = mitigate(&v, &IDENTITY).unwrap();
        for i in 0..4 {
            assert!((r.x[i] - v[i]).abs() < 1e-12);
        }
        assert!(r.residual < 1e-24);
    }

    #[test]
    fn exact_preimage_of_basis_state() {
        let m = flip_kron(0.02);
        let v = mat_vec(&m, &[1.0, 0.0, 0.0, 0.0]);
        let r = mitigate(&v, &m).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-12 && r.residual <= 1e-18, "{r:?}");
    }

    #[test]
    fn singular_matrix_still_solves() {
        let m = [[0.5, 0.5, 0.0, 0.0], [0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 0.0, 0.0]];
        let r = mitigate(&[0.2, 0.2, 0.3, 0.3], &m).unwrap();
        assert!((r.x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r.x.iter().all(|&x| x >= 0.0));
        assert!(pg_norm(&r.v, &m, &r.x, 1.0 / 8.0) <= KKT_TOLERANCE);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(mitigate(&[f64::NAN, 0.0, 0.0, 1.0], &IDENTITY), Err(GemError::NonFinite));
        assert_eq!(mitigate(&[0.5, 0.0, 0.0, 0.0], &IDENTITY), Err(GemError::NotADistribution));
    }

    #[test]
    fn projection_onto_simplex() {
        assert_eq!(project_simplex(&[2.0, 0.0, 0.0, 0.0]), [1.0, 0.0, 0.0, 0.0]);
        let p = project_simplex(&[0.5, 0.5, 0.5, 0.5]);
        assert!(p.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn improvement_metrics() {
        let reference = [0.9, 0.05, 0.05, 0.0];
        let raw = [0.8, 0.1, 0.05, 0.05];
        let same = improvement_report(&reference, &reference, &reference).unwrap();
        assert_eq!(same.l1_improvement, 0.0);
        let r = improvement_report(&raw, &reference, &reference).unwrap();
        assert!((r.l1_improvement - 0.2).abs() < 1e-15);
        assert!(improvement_report(&raw[..3], &reference, &reference).is_err());
    }
}

//! Reference dynamics of the three-level engine.
//!
//! The system lives in the dressed basis `{|ε0>, |ε1>, |ε2>}` of the
//! time-independent Hamiltonian. The hot bath drives the `ε0 <-> ε2`
//! transition and the cold bath drives `ε0 <-> ε1`. Units: `ω10 = 1`,
//! `k_B = 1`.
//!
//! Two reference solvers are provided:
//!
//! * [`integrate_simplified`] solves the closed population rate equation with
//!   the exact matrix exponential of the 3×3 rate generator.
//! * [`integrate_full`] integrates the Lindblad equation with the
//!   time-dependent drive `λ e^{iωt}` using fixed-step RK4.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::linalg::{symmetric_eigen, CMatrix, C64};

/// Maximum RK4 step used by [`integrate_full`], in units of `1/ω10`.
pub const FULL_MODEL_MAX_STEP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid engine parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: &'static str },
    #[error("time step must be non-negative and finite, got {0}")]
    NegativeTimeStep(f64),
    #[error("initial populations are not a probability vector")]
    NotAProbabilityVector,
    #[error("initial density matrix is invalid: {0}")]
    InvalidDensityMatrix(&'static str),
    #[error("time grid must be finite, non-negative and ascending")]
    InvalidGrid,
    #[error("steady state is not unique: the {0} transition has no coupling")]
    NonUniqueSteadyState(&'static str),
    #[error("step size underflow while integrating to t = {0}")]
    StepSizeUnderflow(f64),
    #[error("density matrix lost Hermiticity ({drift:e}) at t = {t}")]
    HermiticityDrift { t: f64, drift: f64 },
}

/// Physical constants of the engine, in units of `ω10` (with `ω0 = 0`).
///
/// `gamma_h20` and `gamma_c10` are the resonant couplings. `gamma_h10` and
/// `gamma_c20` are cross couplings (hot bath on `ε10`, cold bath on `ε20`);
/// they default to zero and are only honoured by the reference solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EngineParams {
    #[cfg_attr(feature = "serde", serde(default))]
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub lambda: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub omega_drive: f64,
    pub beta_h: f64,
    pub beta_c: f64,
    pub gamma_h20: f64,
    pub gamma_c10: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub gamma_h10: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub gamma_c20: f64,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self::standard()
    }
}

impl EngineParams {
    /// The reference engine: `β_h = 1`, `β_c = 5`, `ω20 = 2.5`, `λ = 0.5`,
    /// unit resonant couplings.
    pub const fn standard() -> Self {
        Self {
            omega0: 0.0,
            omega1: 1.0,
            omega2: 2.5,
            lambda: 0.5,
            omega_drive: 0.0,
            beta_h: 1.0,
            beta_c: 5.0,
            gamma_h20: 1.0,
            gamma_c10: 1.0,
            gamma_h10: 0.0,
            gamma_c20: 0.0,
        }
    }

    pub fn with_drive(mut self, omega_drive: f64) -> Self {
        self.omega_drive = omega_drive;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("omega0", self.omega0),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("lambda", self.lambda),
            ("omega_drive", self.omega_drive),
            ("beta_h", self.beta_h),
            ("beta_c", self.beta_c),
            ("gamma_h20", self.gamma_h20),
            ("gamma_c10", self.gamma_c10),
            ("gamma_h10", self.gamma_h10),
            ("gamma_c20", self.gamma_c20),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(ModelError::InvalidParams { field, reason: "must be finite" });
            }
        }
        let invalid = |field, reason| Err(ModelError::InvalidParams { field, reason });
        if self.omega1 <= self.omega0 {
            return invalid("omega1", "must exceed omega0");
        }
        if self.omega2 < self.omega1 {
            return invalid("omega2", "must not be below omega1");
        }
        if self.lambda < 0.0 {
            return invalid("lambda", "must be non-negative");
        }
        if self.omega2 == self.omega1 && self.lambda == 0.0 {
            return invalid("omega2", "degenerate upper levels without coupling leave the mixing angle undefined");
        }
        if self.omega_drive < 0.0 {
            return invalid("omega_drive", "must be non-negative");
        }
        if self.beta_h <= 0.0 {
            return invalid("beta_h", "must be positive");
        }
        if self.beta_c < self.beta_h {
            return invalid("beta_c", "cold bath must not be hotter than the hot bath");
        }
        for (field, g) in [
            ("gamma_h20", self.gamma_h20),
            ("gamma_c10", self.gamma_c10),
            ("gamma_h10", self.gamma_h10),
            ("gamma_c20", self.gamma_c20),
        ] {
            if g < 0.0 {
                return invalid(field, "must be non-negative");
            }
        }
        if self.dressing().eps10 <= 0.0 {
            return invalid("lambda", "dressed level ε1 falls below ε0");
        }
        Ok(())
    }

    /// True when only the resonant couplings are active.
    pub fn is_resonant(&self) -> bool {
        self.gamma_h10 == 0.0 && self.gamma_c20 == 0.0
    }

    fn dressing(&self) -> Dressing {
        let mean = 0.5 * (self.omega2 + self.omega1);
        let half_gap = 0.5 * (self.omega2 - self.omega1);
        let root = (half_gap * half_gap + self.lambda * self.lambda).sqrt();
        let theta = if self.lambda == 0.0 {
            0.0
        } else if self.omega2 == self.omega1 {
            FRAC_PI_2
        } else {
            (2.0 * self.lambda / (self.omega2 - self.omega1)).atan()
        };
        let half = 0.5 * theta;
        Dressing {
            eps20: mean + root - self.omega0,
            eps10: mean - root - self.omega0,
            theta,
            c2: half.cos() * half.cos(),
        }
    }

    /// Jump rates of the four dressed transitions.
    pub fn transition_rates(&self) -> TransitionRates {
        let d = self.dressing();
        let boltz = |beta: f64, eps: f64| (-beta * eps).exp();
        TransitionRates {
            down20: d.c2 * (self.gamma_h20 + self.gamma_c20),
            up20: d.c2
                * (self.gamma_h20 * boltz(self.beta_h, d.eps20)
                    + self.gamma_c20 * boltz(self.beta_c, d.eps20)),
            down10: d.c2 * (self.gamma_c10 + self.gamma_h10),
            up10: d.c2
                * (self.gamma_c10 * boltz(self.beta_c, d.eps10)
                    + self.gamma_h10 * boltz(self.beta_h, d.eps10)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Dressing {
    eps20: f64,
    eps10: f64,
    theta: f64,
    c2: f64,
}

/// Total rates on the two dressed transitions, summed over baths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRates {
    /// `ε2 -> ε0`
    pub down20: f64,
    /// `ε0 -> ε2`
    pub up20: f64,
    /// `ε1 -> ε0`
    pub down10: f64,
    /// `ε0 -> ε1`
    pub up10: f64,
}

/// Closed-form gate and rate quantities for one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DerivedParams {
    pub eps20: f64,
    pub eps10: f64,
    pub theta: f64,
    /// `cos²(θ/2)`
    pub c2: f64,
    pub g_hd: f64,
    pub g_hr: f64,
    pub g_cd: f64,
    pub g_cr: f64,
    pub p_hd: f64,
    pub p_cd: f64,
    pub alpha_h: f64,
    pub alpha_c: f64,
    pub theta_hd: f64,
    pub theta_cd: f64,
    pub dt: f64,
}

impl DerivedParams {
    /// Damping strength `η = 1 - exp(-Δt (g_d + g_r))` of the hot GAD step.
    pub fn eta_h(&self) -> f64 {
        let s = self.theta_hd.sin();
        s * s
    }

    pub fn eta_c(&self) -> f64 {
        let s = self.theta_cd.sin();
        s * s
    }
}

/// Evaluates the gate-parameter table for time step `dt`.
///
/// When a bath is uncoupled the damping probability is taken as its limit
/// `1 / (1 + e^{-βε})`, which does not depend on the coupling strength.
pub fn derive_params(p: &EngineParams, dt: f64) -> Result<DerivedParams, ModelError> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(ModelError::NegativeTimeStep(dt));
    }
    p.validate()?;
    let d = p.dressing();
    let gamma_h_neg = p.gamma_h20 * (-p.beta_h * d.eps20).exp();
    let gamma_c_neg = p.gamma_c10 * (-p.beta_c * d.eps10).exp();
    let g_hd = p.gamma_h20 * d.c2;
    let g_hr = gamma_h_neg * d.c2;
    let g_cd = p.gamma_c10 * d.c2;
    let g_cr = gamma_c_neg * d.c2;
    let damping_probability = |gd: f64, gr: f64, beta: f64, eps: f64| {
        if gd + gr > 0.0 {
            gd / (gd + gr)
        } else {
            1.0 / (1.0 + (-beta * eps).exp())
        }
    };
    let p_hd = damping_probability(g_hd, g_hr, p.beta_h, d.eps20);
    let p_cd = damping_probability(g_cd, g_cr, p.beta_c, d.eps10);
    Ok(DerivedParams {
        eps20: d.eps20,
        eps10: d.eps10,
        theta: d.theta,
        c2: d.c2,
        g_hd,
        g_hr,
        g_cd,
        g_cr,
        p_hd,
        p_cd,
        alpha_h: 2.0 * p_hd.sqrt().acos(),
        alpha_c: 2.0 * p_cd.sqrt().acos(),
        theta_hd: (-0.5 * dt * (g_hd + g_hr)).exp().acos(),
        theta_cd: (-0.5 * dt * (g_cd + g_cr)).exp().acos(),
        dt,
    })
}

/// Rate generator `G` of the population equation `dp/dt = G p`.
///
/// `G[i][j]` is the rate `j -> i` for `i != j`; columns sum to zero.
pub fn rate_generator(p: &EngineParams) -> [[f64; 3]; 3] {
    let r = p.transition_rates();
    [
        [-(r.up10 + r.up20), r.down10, r.down20],
        [r.up10, -r.down10, 0.0],
        [r.up20, 0.0, -r.down20],
    ]
}

/// Unique fixed point of the rate equation.
///
/// Both transitions attach to `ε0`, so the fixed point is
/// `π ∝ (d10·d20, u10·d20, u20·d10)`.
pub fn steady_state(p: &EngineParams) -> Result<[f64; 3], ModelError> {
    p.validate()?;
    let r = p.transition_rates();
    if r.down20 + r.up20 == 0.0 {
        return Err(ModelError::NonUniqueSteadyState("ε0 <-> ε2"));
    }
    if r.down10 + r.up10 == 0.0 {
        return Err(ModelError::NonUniqueSteadyState("ε0 <-> ε1"));
    }
    let w = [r.down10 * r.down20, r.up10 * r.down20, r.up20 * r.down10];
    let z: f64 = w.iter().sum();
    Ok([w[0] / z, w[1] / z, w[2] / z])
}

/// Origin of a population sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Source {
    Theory,
    TheoryFull,
    SimIdeal,
    SimNoisy,
    SimMitigated,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Theory => "theory",
            Source::TheoryFull => "theory-full",
            Source::SimIdeal => "sim-ideal",
            Source::SimNoisy => "sim-noisy",
            Source::SimMitigated => "sim-mitigated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "theory" => Source::Theory,
            "theory-full" => Source::TheoryFull,
            "sim-ideal" => Source::SimIdeal,
            "sim-noisy" => Source::SimNoisy,
            "sim-mitigated" => Source::SimMitigated,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PopulationSample {
    pub t: f64,
    pub rho00: f64,
    pub rho11: f64,
    pub rho22: f64,
    #[cfg_attr(feature = "serde", serde(rename = "rhoXX"))]
    pub rho_xx: f64,
    pub source: Source,
    pub run: u32,
    /// Number of shots behind the sample, 0 for exact evaluation.
    pub shots: u64,
}

impl PopulationSample {
    pub fn exact(t: f64, pops: [f64; 3], source: Source) -> Self {
        Self { t, rho00: pops[0], rho11: pops[1], rho22: pops[2], rho_xx: 0.0, source, run: 0, shots: 0 }
    }

    /// Builds a sample from a register distribution ordered `00, 01, 10, 11`,
    /// which is `ε0, ε1, ε2, X`.
    pub fn from_register(t: f64, dist: [f64; 4], source: Source, run: u32, shots: u64) -> Self {
        Self { t, rho00: dist[0], rho11: dist[1], rho22: dist[2], rho_xx: dist[3], source, run, shots }
    }

    pub fn populations(&self) -> [f64; 4] {
        [self.rho00, self.rho11, self.rho22, self.rho_xx]
    }

    pub fn total(&self) -> f64 {
        self.rho00 + self.rho11 + self.rho22 + self.rho_xx
    }
}

/// Time-ordered population samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PopulationTrace {
    pub samples: Vec<PopulationSample>,
}

impl PopulationTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Checks normalization and range of every sample.
    pub fn check_invariants(&self) -> bool {
        self.samples.iter().all(|s| {
            let tol = if s.shots == 0 { 1e-10 } else { 1e-6 };
            (s.total() - 1.0).abs() <= tol
                && s.populations().iter().all(|&x| (-1e-9..=1.0 + 1e-9).contains(&x))
        })
    }
}

/// 3×3 density matrix over the dressed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix3(CMatrix);

impl DensityMatrix3 {
    pub fn new(m: CMatrix) -> Result<Self, ModelError> {
        if m.dim() != 3 {
            return Err(ModelError::InvalidDensityMatrix("dimension must be 3"));
        }
        if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ModelError::InvalidDensityMatrix("non-finite entry"));
        }
        if m.hermiticity_error() > 1e-12 {
            return Err(ModelError::InvalidDensityMatrix("not Hermitian"));
        }
        if (m.trace().re - 1.0).abs() > 1e-10 {
            return Err(ModelError::InvalidDensityMatrix("trace differs from 1"));
        }
        if !m.is_psd_within(1e-9) {
            return Err(ModelError::InvalidDensityMatrix("negative eigenvalue"));
        }
        Ok(Self(m))
    }

    pub fn diagonal(pops: [f64; 3]) -> Result<Self, ModelError> {
        Self::new(CMatrix::diagonal(&pops))
    }

    /// `|εi><εi|`
    pub fn basis(i: usize) -> Self {
        Self(CMatrix::projector(3, i))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }
}

fn check_grid(grid: &[f64]) -> Result<(), ModelError> {
    let ok = grid.iter().all(|t| t.is_finite() && *t >= 0.0) && grid.windows(2).all(|w| w[0] <= w[1]);
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidGrid)
    }
}

fn check_probability(p: &[f64; 3]) -> Result<(), ModelError> {
    let sum: f64 = p.iter().sum();
    if p.iter().any(|x| !x.is_finite() || *x < -1e-12) || (sum - 1.0).abs() > 1e-10 {
        return Err(ModelError::NotAProbabilityVector);
    }
    Ok(())
}

fn mat_vec(g: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (o, row) in out.iter_mut().zip(g) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// Propagator of the population equation.
enum RatePropagator {
    /// `exp(Gt) = D^{1/2} V e^{Λt} Vᵀ D^{-1/2}` with `D = diag(π)`.
    Spectral { sqrt_pi: [f64; 3], values: [f64; 3], vectors: [[f64; 3]; 3] },
    Rk4 { g: [[f64; 3]; 3], max_step: f64 },
}

impl RatePropagator {
    fn new(p: &EngineParams) -> Self {
        let g = rate_generator(p);
        let norm = (0..3).map(|i| g[i][i].abs()).fold(0.0, f64::max);
        let rk4 = RatePropagator::Rk4 { g, max_step: FULL_MODEL_MAX_STEP.min(0.5 / norm.max(1e-300)) };
        let Ok(pi) = steady_state(p) else {
            return rk4;
        };
        let (lo, hi) = pi.iter().fold((f64::MAX, 0.0_f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        // The similarity transform amplifies rounding by sqrt(hi/lo).
        if !(lo > 0.0) || hi / lo > 1e16 {
            return rk4;
        }
        let sqrt_pi = [pi[0].sqrt(), pi[1].sqrt(), pi[2].sqrt()];
        let mut s = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] = g[i][j] * sqrt_pi[j] / sqrt_pi[i];
            }
        }
        let asym = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (s[i][j] - s[j][i]).abs())
            .fold(0.0, f64::max);
        if asym > 1e-12 * norm.max(1.0) {
            return rk4;
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let m = 0.5 * (s[i][j] + s[j][i]);
                s[i][j] = m;
                s[j][i] = m;
            }
        }
        let (values, vectors) = symmetric_eigen(&s);
        RatePropagator::Spectral { sqrt_pi, values, vectors }
    }

    fn apply_spectral(sqrt_pi: &[f64; 3], values: &[f64; 3], vectors: &[[f64; 3]; 3], p0: &[f64; 3], t: f64) -> [f64; 3] {
        let y: [f64; 3] = core::array::from_fn(|i| p0[i] / sqrt_pi[i]);
        let mut coeff = [0.0; 3];
        for k in 0..3 {
            let proj: f64 = (0..3).map(|i| vectors[i][k] * y[i]).sum();
            // The stationary mode has eigenvalue 0 up to rounding; pin it.
            let lam = if values[k].abs() < 1e-14 { 0.0 } else { values[k] };
            coeff[k] = proj * (lam * t).exp();
        }
        core::array::from_fn(|i| sqrt_pi[i] * (0..3).map(|k| vectors[i][k] * coeff[k]).sum::<f64>())
    }
}

fn rk4_populations(g: &[[f64; 3]; 3], p: [f64; 3], h: f64) -> [f64; 3] {
    let add = |a: &[f64; 3], b: &[f64; 3], s: f64| -> [f64; 3] { core::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = mat_vec(g, &p);
    let k2 = mat_vec(g, &add(&p, &k1, 0.5 * h));
    let k3 = mat_vec(g, &add(&p, &k2, 0.5 * h));
    let k4 = mat_vec(g, &add(&p, &k3, h));
    core::array::from_fn(|i| p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Solves the population rate equation from `rho0` at every grid time.
pub fn integrate_simplified(p: &EngineParams, rho0: [f64; 3], grid: &[f64]) -> Result<PopulationTrace, ModelError> {
    p.validate()?;
    check_probability(&rho0)?;
    check_grid(grid)?;
    let propagator = RatePropagator::new(p);
    let mut samples = Vec::with_capacity(grid.len());
    let (mut t_prev, mut state) = (0.0, rho0);
    for &t in grid {
        let pops = match &propagator {
            RatePropagator::Spectral { .. } if t == 0.0 => rho0,
            RatePropagator::Spectral { sqrt_pi, values, vectors } => {
                RatePropagator::apply_spectral(sqrt_pi, values, vectors, &rho0, t)
            }
            RatePropagator::Rk4 { g, max_step } => {
                let span = t - t_prev;
                if span > 0.0 {
                    let n = (span / max_step).ceil().max(1.0) as usize;
                    let h = span / n as f64;
                    for _ in 0..n {
                        state = rk4_populations(g, state, h);
                    }
                }
                t_prev = t;
                state
            }
        };
        samples.push(PopulationSample::exact(t, pops, Source::Theory));
    }
    Ok(PopulationTrace { samples })
}

/// Coherences of the full model in the dressed basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSample {
    pub t: f64,
    pub rho01: C64,
    pub rho02: C64,
    pub rho12: C64,
}

/// Lindblad right-hand side in the dressed basis with a time-dependent drive.
struct FullGenerator {
    /// Dressed energies `(ω0, E-, E+)`.
    energies: [f64; 3],
    /// Real orthogonal dressing rotation restricted to the `{|1>, |2>}` block:
    /// `|ε1> = u[0][0]|1> + u[1][0]|2>`, `|ε2> = u[0][1]|1> + u[1][1]|2>`.
    u: [[f64; 2]; 2],
    lambda: f64,
    omega: f64,
    /// `(from, to, rate)` jump channels `|to><from|`.
    jumps: [(usize, usize, f64); 4],
}

impl FullGenerator {
    fn new(p: &EngineParams) -> Self {
        let d = p.dressing();
        let (s, c) = (0.5 * d.theta).sin_cos();
        let r = p.transition_rates();
        Self {
            energies: [p.omega0, p.omega0 + d.eps10, p.omega0 + d.eps20],
            u: [[c, s], [-s, c]],
            lambda: p.lambda,
            omega: p.omega_drive,
            jumps: [(2, 0, r.down20), (0, 2, r.up20), (1, 0, r.down10), (0, 1, r.up10)],
        }
    }

    /// Hamiltonian in the dressed basis at time `t`.
    fn hamiltonian(&self, t: f64) -> CMatrix {
        let mut h = CMatrix::diagonal(&self.energies);
        if self.omega == 0.0 || self.lambda == 0.0 {
            return h;
        }
        // Bare perturbation relative to the static coupling, restricted to
        // the {|1>, |2>} block: [[0, w], [conj(w), 0]] with w = λ(e^{iωt} - 1).
        let w = C64::new((self.omega * t).cos() - 1.0, (self.omega * t).sin()) * self.lambda;
        let u = &self.u;
        for a in 0..2 {
            for b in 0..2 {
                let v = w * (u[0][a] * u[1][b]) + w.conj() * (u[1][a] * u[0][b]);
                h[(a + 1, b + 1)] += v;
            }
        }
        h
    }

    fn rhs(&self, rho: &CMatrix, t: f64) -> CMatrix {
        let h = self.hamiltonian(t);
        let comm = h.matmul(rho).add(&rho.matmul(&h).scale(C64::new(-1.0, 0.0)));
        let mut out = comm.scale(C64::new(0.0, -1.0));
        for &(from, to, rate) in &self.jumps {
            if rate == 0.0 {
                continue;
            }
            out[(to, to)] += rho[(from, from)] * rate;
            for j in 0..3 {
                out[(from, j)] -= rho[(from, j)] * (0.5 * rate);
                out[(j, from)] -= rho[(j, from)] * (0.5 * rate);
            }
        }
        out
    }

    fn rk4_step(&self, rho: &CMatrix, t: f64, h: f64) -> CMatrix {
        let k1 = self.rhs(rho, t);
        let mut y = rho.clone();
        y.add_scaled(&k1, 0.5 * h);
        let k2 = self.rhs(&y, t + 0.5 * h);
        let mut y = rho.clone();
        y.add_scaled(&k2, 0.5 * h);
        let k3 = self.rhs(&y, t + 0.5 * h);
        let mut y = rho.clone();
        y.add_scaled(&k3, h);
        let k4 = self.rhs(&y, t + h);
        let mut out = rho.clone();
        out.add_scaled(&k1, h / 6.0);
        out.add_scaled(&k2, h / 3.0);
        out.add_scaled(&k3, h / 3.0);
        out.add_scaled(&k4, h / 6.0);
        out
    }
}

/// Integrates the Lindblad equation with the drive `λ e^{iωt}` from `rho0`.
///
/// Jump operators are fixed in the static dressed basis. With
/// `omega_drive = 0` and a diagonal `rho0` this coincides with
/// [`integrate_simplified`].
pub fn integrate_full(
    p: &EngineParams,
    rho0: &DensityMatrix3,
    grid: &[f64],
) -> Result<(PopulationTrace, Vec<CoherenceSample>), ModelError> {
    p.validate()?;
    check_grid(grid)?;
    let gen = FullGenerator::new(p);
    let mut rho = rho0.matrix().clone();
    let mut t_now = 0.0;
    let mut pops = Vec::with_capacity(grid.len());
    let mut coherences = Vec::with_capacity(grid.len());
    for &t in grid {
        let span = t - t_now;
        if span > 0.0 {
            let n = (span / FULL_MODEL_MAX_STEP).ceil().max(1.0);
            if n > 1e9 {
                return Err(ModelError::StepSizeUnderflow(t));
            }
            let n = n as usize;
            let h = span / n as f64;
            if h == 0.0 {
                return Err(ModelError::StepSizeUnderflow(t));
            }
            for k in 0..n {
                rho = gen.rk4_step(&rho, t_now + k as f64 * h, h);
            }
            let drift = rho.hermiticity_error();
            if drift > 1e-8 {
                return Err(ModelError::HermiticityDrift { t, drift });
            }
            t_now = t;
        }
        pops.push(PopulationSample::exact(
            t,
            [rho[(0, 0)].re, rho[(1, 1)].re, rho[(2, 2)].re],
            Source::TheoryFull,
        ));
        coherences.push(CoherenceSample { t, rho01: rho[(0, 1)], rho02: rho[(0, 2)], rho12: rho[(1, 2)] });
    }
    Ok((PopulationTrace { samples: pops }, coherences))
}

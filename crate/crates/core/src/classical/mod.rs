//! Classical spheroidal harmonics system on the `e*(3)` Lie-Poisson space.
//!
//! Coordinates are `(P, L) ∈ ℝ⁶` with the bracket
//!
//! ```text
//! B = -[[0, P̂], [P̂, L̂]],    ẋ = B ∇H
//! ```
//!
//! and Casimirs `C₁ = P·P = 2E`, `C₂ = P·L = 0`. The integrals are
//! `L_z = l_z` and `G = |L|² - a²(p_x² + p_y²)`.
//!
//! Separating the free particle in prolate spheroidal coordinates `(ξ, η, φ)`
//! gives `G(q, p) = (1-q²)(p² - 2a²E) + p_φ²/(1-q²)` for either `(η, p_η)` or
//! `(ξ, p_ξ)`; only the `η` side is used here.

pub mod action;
pub mod critical;
pub mod neumann;
pub mod reduced;

use serde::{Deserialize, Serialize};

pub use action::action_i;
pub use critical::{classify_critical_point, CriticalClassification, CriticalKind};
pub use neumann::{neumann_map, NeumannState};
pub use reduced::{
    critical_values, heteroclinic_q, level_set_components, pinched_torus, reconstruct, reduce,
    reduced_brackets_check, reduced_hamiltonian, BifurcationDiagram, ChartState, CriticalKind2D,
    ReducedState,
};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ClassicalError {
    #[error("energy must be positive and finite, got {0}")]
    Energy(f64),
    #[error("focal half-distance must be non-negative and finite, got {0}")]
    FocalDistance(f64),
    #[error("state is off the orbit: |C1 - 2E| = {c1}, |C2| = {c2}")]
    OffOrbit { c1: f64, c2: f64 },
    #[error("time step must be positive, got {0}")]
    TimeStep(f64),
    #[error("drift {drift:e} in {quantity} exceeds bound {bound:e} at t = {t}")]
    Drift {
        quantity: &'static str,
        drift: f64,
        bound: f64,
        t: f64,
    },
    #[error("reduced state violates the syzygy: C3 = {0}")]
    Syzygy(f64),
    #[error("chart coordinate q = {0} outside (-1, 1)")]
    ChartDomain(f64),
    #[error("(m, g) = ({m}, {g}) lies below the boundary g = m^2 - gamma^2")]
    BelowBoundary { m: f64, g: f64 },
    #[error("turning point bracketing failed for (m, g) = ({m}, {g})")]
    Bracketing { m: f64, g: f64 },
    #[error("|p_z| = {pz} exceeds sqrt(2E) = {max}")]
    PzRange { pz: f64, max: f64 },
    #[error("P = 0 has no image under the Neumann map")]
    ZeroMomentum,
    #[error("both flows vanish here; a value for beta is required")]
    BetaRequired,
    #[error("state is critical for beta = {best}, not for the given beta = {given}")]
    WrongBeta { given: f64, best: f64 },
    #[error("eigenvalue iteration did not converge")]
    Eigen,
    #[error("quadrature did not reach tolerance")]
    Quadrature,
}

/// Energy `E > 0` and focal half-distance `a >= 0`; `γ² = 2Ea²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    energy: f64,
    a: f64,
}

impl SystemParams {
    pub fn new(energy: f64, a: f64) -> Result<Self, ClassicalError> {
        if !(energy.is_finite() && energy > 0.0) {
            return Err(ClassicalError::Energy(energy));
        }
        if !(a.is_finite() && a >= 0.0) {
            return Err(ClassicalError::FocalDistance(a));
        }
        Ok(Self { energy, a })
    }

    /// Parameters with `E = 1/2` (unit speed) and the given `γ`, so `a = γ`.
    pub fn unit_speed(gamma: f64) -> Result<Self, ClassicalError> {
        Self::new(0.5, gamma)
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma2(&self) -> f64 {
        2.0 * self.energy * self.a * self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma2().sqrt()
    }

    /// `|P| = sqrt(2E)` on the orbit.
    pub fn speed(&self) -> f64 {
        (2.0 * self.energy).sqrt()
    }
}

pub type Vec3 = [f64; 3];

pub(crate) fn cross(u: Vec3, v: Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

pub(crate) fn dot(u: Vec3, v: Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// A point `(P, L)` of `e*(3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanState {
    pub p: Vec3,
    pub l: Vec3,
}

impl EuclideanState {
    pub fn new(p: Vec3, l: Vec3) -> Self {
        Self { p, l }
    }

    /// Oriented line through `q` with direction `p`: `L = q × p`.
    pub fn from_line(q: Vec3, p: Vec3) -> Self {
        Self { p, l: cross(q, p) }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.p[0], self.p[1], self.p[2], self.l[0], self.l[1], self.l[2]]
    }

    pub fn from_array(z: [f64; 6]) -> Self {
        Self {
            p: [z[0], z[1], z[2]],
            l: [z[3], z[4], z[5]],
        }
    }

    fn axpy(&self, h: f64, d: &EuclideanState) -> EuclideanState {
        let mut z = self.to_array();
        let dz = d.to_array();
        for (a, b) in z.iter_mut().zip(dz) {
            *a += h * b;
        }
        EuclideanState::from_array(z)
    }

    /// Rejects states whose Casimirs differ from `(2E, 0)` by more than `tol`
    /// relative to the natural scales.
    pub fn check_orbit(&self, params: &SystemParams, tol: f64) -> Result<(), ClassicalError> {
        let (c1, c2) = casimirs(self);
        let two_e = 2.0 * params.energy;
        let l_norm = dot(self.l, self.l).sqrt();
        let d1 = (c1 - two_e).abs();
        let d2 = c2.abs();
        if d1 > tol * two_e || d2 > tol * (two_e.sqrt() * l_norm).max(1.0) {
            return Err(ClassicalError::OffOrbit { c1: d1, c2: d2 });
        }
        Ok(())
    }
}

/// `(P·P, P·L)`.
pub fn casimirs(state: &EuclideanState) -> (f64, f64) {
    (dot(state.p, state.p), dot(state.p, state.l))
}

/// `G = |L|² - a²(p_x² + p_y²)`.
pub fn g_value(state: &EuclideanState, params: &SystemParams) -> f64 {
    let a2 = params.a * params.a;
    dot(state.l, state.l) - a2 * (state.p[0] * state.p[0] + state.p[1] * state.p[1])
}

pub fn lz_value(state: &EuclideanState) -> f64 {
    state.l[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hamiltonian {
    G,
    Lz,
}

/// Gradient `(∇_P H, ∇_L H)`.
pub fn gradient(ham: Hamiltonian, state: &EuclideanState, params: &SystemParams) -> EuclideanState {
    match ham {
        Hamiltonian::G => {
            let a2 = params.a * params.a;
            EuclideanState {
                p: [-2.0 * a2 * state.p[0], -2.0 * a2 * state.p[1], 0.0],
                l: [2.0 * state.l[0], 2.0 * state.l[1], 2.0 * state.l[2]],
            }
        }
        Hamiltonian::Lz => EuclideanState {
            p: [0.0; 3],
            l: [0.0, 0.0, 1.0],
        },
    }
}

/// `B(z) w` for a covector `w = (w_P, w_L)`.
pub fn poisson_apply(state: &EuclideanState, w: &EuclideanState) -> EuclideanState {
    let pl = cross(state.p, w.l);
    let pp = cross(state.p, w.p);
    let ll = cross(state.l, w.l);
    EuclideanState {
        p: [-pl[0], -pl[1], -pl[2]],
        l: [-pp[0] - ll[0], -pp[1] - ll[1], -pp[2] - ll[2]],
    }
}

/// `{f, h} = ∇fᵀ B ∇h` from gradients.
pub fn bracket(state: &EuclideanState, grad_f: &EuclideanState, grad_h: &EuclideanState) -> f64 {
    let bh = poisson_apply(state, grad_h);
    dot(grad_f.p, bh.p) + dot(grad_f.l, bh.l)
}

/// The 6×6 Poisson tensor, row-major.
pub fn poisson_matrix(state: &EuclideanState) -> [[f64; 6]; 6] {
    let mut out = [[0.0; 6]; 6];
    for j in 0..6 {
        let mut e = [0.0; 6];
        e[j] = 1.0;
        let col = poisson_apply(state, &EuclideanState::from_array(e)).to_array();
        for i in 0..6 {
            out[i][j] = col[i];
        }
    }
    out
}

/// Hamiltonian vector field `B ∇H`.
///
/// For `G`: `Ṗ = -2 P × L`, `L̇ = -2a² p_z P × e_z`. For `L_z`: `Ṗ = -P × e_z`,
/// `L̇ = -L × e_z`.
pub fn e3_vector_field(
    state: &EuclideanState,
    ham: Hamiltonian,
    params: &SystemParams,
) -> EuclideanState {
    poisson_apply(state, &gradient(ham, state, params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Keep every n-th step in the trajectory (the final state is always kept).
    pub record_every: usize,
    /// Largest tolerated change of `C₁, C₂, G, L_z` relative to `max(1, |initial|)`.
    pub drift_bound: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            record_every: 1,
            drift_bound: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: EuclideanState,
    pub c1: f64,
    pub c2: f64,
    pub g: f64,
    pub lz: f64,
}

impl Sample {
    fn new(t: f64, state: EuclideanState, params: &SystemParams) -> Self {
        let (c1, c2) = casimirs(&state);
        Self {
            t,
            state,
            c1,
            c2,
            g: g_value(&state, params),
            lz: lz_value(&state),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Largest relative drift seen for `(C₁, C₂, G, L_z)`.
    pub max_drift: [f64; 4],
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory holds the initial state")
    }

    /// CSV with header `t,px,py,pz,lx,ly,lz,C1,C2,G,Lz`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,px,py,pz,lx,ly,lz,C1,C2,G,Lz\n");
        for x in &self.samples {
            let z = x.state.to_array();
            let row: Vec<String> = std::iter::once(x.t)
                .chain(z)
                .chain([x.c1, x.c2, x.g, x.lz])
                .map(|v| format!("{v:.16e}"))
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Fixed-step RK4 integration of the flow of `ham`.
pub fn integrate_flow(
    state: &EuclideanState,
    ham: Hamiltonian,
    params: &SystemParams,
    cfg: &FlowConfig,
) -> Result<Trajectory, ClassicalError> {
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(ClassicalError::TimeStep(cfg.dt));
    }
    let f = |z: &EuclideanState| e3_vector_field(z, ham, params);
    let first = Sample::new(0.0, *state, params);
    let reference = [first.c1, first.c2, first.g, first.lz];
    let names = ["C1", "C2", "G", "Lz"];
    let mut samples = vec![first];
    let mut max_drift = [0.0f64; 4];
    let steps = (cfg.t_end / cfg.dt).round().max(0.0) as usize;
    let every = cfg.record_every.max(1);
    let mut z = *state;
    for n in 1..=steps {
        let h = cfg.dt;
        let k1 = f(&z);
        let k2 = f(&z.axpy(0.5 * h, &k1));
        let k3 = f(&z.axpy(0.5 * h, &k2));
        let k4 = f(&z.axpy(h, &k3));
        let mut next = z.to_array();
        let (a1, a2, a3, a4) = (k1.to_array(), k2.to_array(), k3.to_array(), k4.to_array());
        for i in 0..6 {
            next[i] += h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
        z = EuclideanState::from_array(next);
        let t = n as f64 * h;
        let sample = Sample::new(t, z, params);
        let now = [sample.c1, sample.c2, sample.g, sample.lz];
        for k in 0..4 {
            let d = (now[k] - reference[k]).abs() / reference[k].abs().max(1.0);
            max_drift[k] = max_drift[k].max(d);
            if d > cfg.drift_bound {
                return Err(ClassicalError::Drift {
                    quantity: names[k],
                    drift: d,
                    bound: cfg.drift_bound,
                    t,
                });
            }
        }
        if n % every == 0 || n == steps {
            samples.push(sample);
        }
    }
    Ok(Trajectory { samples, max_drift })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscreteSymmetry {
    S1,
    S2,
    S3,
}

impl DiscreteSymmetry {
    pub fn signs(self) -> [f64; 3] {
        match self {
            DiscreteSymmetry::S1 => [1.0, 1.0, -1.0],
            DiscreteSymmetry::S2 => [-1.0, -1.0, -1.0],
            DiscreteSymmetry::S3 => [-1.0, -1.0, 1.0],
        }
    }
}

/// `(S P, S̃ L)` with `S = diag(s₁, s₂, s₃)` and `S̃ = diag(s₂s₃, s₁s₃, s₁s₂)`,
/// the sign change that `Q × P` picks up under `(Q, P) -> (SQ, SP)`.
pub fn apply_discrete_symmetry(which: DiscreteSymmetry, state: &EuclideanState) -> EuclideanState {
    let s = which.signs();
    let st = [s[1] * s[2], s[0] * s[2], s[0] * s[1]];
    EuclideanState {
        p: [s[0] * state.p[0], s[1] * state.p[1], s[2] * state.p[2]],
        l: [st[0] * state.l[0], st[1] * state.l[1], st[2] * state.l[2]],
    }
}

/// A random state on the orbit `C₁ = 2E`, `C₂ = 0` with `|L| <= l_scale`.
pub fn random_orbit_state<R: rand::Rng + ?Sized>(
    rng: &mut R,
    params: &SystemParams,
    l_scale: f64,
) -> EuclideanState {
    let s = params.speed();
    let p = loop {
        let v: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = dot(v, v).sqrt();
        if n > 0.1 && n <= 1.0 {
            break [s * v[0] / n, s * v[1] / n, s * v[2] / n];
        }
    };
    let w: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    // project onto the plane orthogonal to P
    let k = dot(w, p) / dot(p, p);
    let l = [
        l_scale * (w[0] - k * p[0]),
        l_scale * (w[1] - k * p[1]),
        l_scale * (w[2] - k * p[2]),
    ];
    EuclideanState { p, l }
}

//! Reduction by the `S¹` action generated by `L_z`.
//!
//! Invariants, with `s = sqrt(2E)`:
//!
//! ```text
//! b₁ = p_z / s,   b₂ = l_x² + l_y²,   b₃ = (l_x p_y - l_y p_x) / s,   m = l_z
//! ```
//!
//! subject to `b₃² = (1 - b₁²) b₂ - b₁² m²`, `|b₁| <= 1`, `b₂ >= 0`. On the
//! reduced space `G = b₂ + m² - γ²(1 - b₁²)`; the chart `q = b₁`,
//! `p = b₃/(1 - b₁²)` is canonical.

use serde::{Deserialize, Serialize};

use super::{bracket, ClassicalError, EuclideanState, SystemParams};

const ORBIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub m: f64,
}

impl ReducedState {
    /// `b₃² - (1 - b₁²) b₂ + b₁² m²`, zero on the reduced space.
    pub fn syzygy(&self) -> f64 {
        self.b3 * self.b3 - (1.0 - self.b1 * self.b1) * self.b2 + self.b1 * self.b1 * self.m * self.m
    }

    pub fn g(&self, params: &SystemParams) -> f64 {
        self.b2 + self.m * self.m - params.gamma2() * (1.0 - self.b1 * self.b1)
    }

    pub fn chart(&self) -> Result<ChartState, ClassicalError> {
        let s = 1.0 - self.b1 * self.b1;
        if !(s > 0.0) {
            return Err(ClassicalError::ChartDomain(self.b1));
        }
        Ok(ChartState {
            q: self.b1,
            p: self.b3 / s,
            m: self.m,
        })
    }
}

/// Canonical chart coordinates on the reduced space at fixed `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartState {
    pub q: f64,
    pub p: f64,
    pub m: f64,
}

pub fn reduce(state: &EuclideanState, params: &SystemParams) -> Result<ReducedState, ClassicalError> {
    state.check_orbit(params, ORBIT_TOL)?;
    let s = params.speed();
    let (p, l) = (state.p, state.l);
    Ok(ReducedState {
        b1: p[2] / s,
        b2: l[0] * l[0] + l[1] * l[1],
        b3: (l[0] * p[1] - l[1] * p[0]) / s,
        m: l[2],
    })
}

/// Lifts a reduced point back to `e*(3)` at angle `u = arg(p_x + i p_y)`.
pub fn reconstruct(
    b: &ReducedState,
    params: &SystemParams,
    u: f64,
) -> Result<EuclideanState, ClassicalError> {
    let scale = (1.0 + b.b2.abs() + b.m * b.m).max(1.0);
    let c3 = b.syzygy();
    if c3.abs() > 1e-9 * scale || b.b1.abs() > 1.0 + 1e-12 || b.b2 < -1e-12 * scale {
        return Err(ClassicalError::Syzygy(c3));
    }
    let s = params.speed();
    let rho_p = s * (1.0 - b.b1 * b.b1).max(0.0).sqrt();
    let rho_l = b.b2.max(0.0).sqrt();
    // p_w conj(l_w) = s (-b₁ m + i b₃)
    let v = u - b.b3.atan2(-b.b1 * b.m);
    Ok(EuclideanState {
        p: [rho_p * u.cos(), rho_p * u.sin(), s * b.b1.clamp(-1.0, 1.0)],
        l: [rho_l * v.cos(), rho_l * v.sin(), b.m],
    })
}

/// `G(q, p) = (1 - q²)(p² - γ²) + m²/(1 - q²)`.
pub fn reduced_hamiltonian(chart: &ChartState, params: &SystemParams) -> Result<f64, ClassicalError> {
    let s = 1.0 - chart.q * chart.q;
    if !(s > 0.0) {
        return Err(ClassicalError::ChartDomain(chart.q));
    }
    Ok(s * (chart.p * chart.p - params.gamma2()) + chart.m * chart.m / s)
}

/// Residuals of `{b₁,b₂} = 2b₃`, `{b₁,b₃} = 1 - b₁²`, `{b₂,b₃} = 2b₁m² + 2b₁b₂`,
/// computed from the `e*(3)` bracket and the chain rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketResiduals {
    pub b1b2: f64,
    pub b1b3: f64,
    pub b2b3: f64,
}

impl BracketResiduals {
    pub fn max_abs(&self) -> f64 {
        self.b1b2.abs().max(self.b1b3.abs()).max(self.b2b3.abs())
    }
}

pub fn reduced_brackets_check(
    state: &EuclideanState,
    params: &SystemParams,
) -> Result<BracketResiduals, ClassicalError> {
    let b = reduce(state, params)?;
    let s = params.speed();
    let (p, l) = (state.p, state.l);
    let d1 = EuclideanState::new([0.0, 0.0, 1.0 / s], [0.0; 3]);
    let d2 = EuclideanState::new([0.0; 3], [2.0 * l[0], 2.0 * l[1], 0.0]);
    let d3 = EuclideanState::new([-l[1] / s, l[0] / s, 0.0], [p[1] / s, -p[0] / s, 0.0]);
    Ok(BracketResiduals {
        b1b2: bracket(state, &d1, &d2) - 2.0 * b.b3,
        b1b3: bracket(state, &d1, &d3) - (1.0 - b.b1 * b.b1),
        b2b3: bracket(state, &d2, &d3) - (2.0 * b.b1 * b.m * b.m + 2.0 * b.b1 * b.b2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind2D {
    /// Isolated critical value `(0, 0)`, image of the poles.
    FocusFocus,
    /// `g = m² - γ²`, image of the equatorial relative equilibria.
    Boundary,
}

/// Critical values of `(L_z, G)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub gamma: f64,
    pub points: Vec<(CriticalKind2D, f64, f64)>,
}

impl BifurcationDiagram {
    /// CSV with header `kind,m,g`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,m,g\n");
        for (kind, m, g) in &self.points {
            let k = match kind {
                CriticalKind2D::FocusFocus => "focus-focus",
                CriticalKind2D::Boundary => "boundary",
            };
            s.push_str(&format!("{k},{m:.16e},{g:.16e}\n"));
        }
        s
    }
}

/// The isolated value at the origin plus `samples` points of the boundary
/// parabola over `|m| <= m_max`.
pub fn critical_values(params: &SystemParams, m_max: f64, samples: usize) -> BifurcationDiagram {
    let g2 = params.gamma2();
    let mut points = vec![(CriticalKind2D::FocusFocus, 0.0, 0.0)];
    let n = samples.max(2);
    for i in 0..n {
        let m = -m_max + 2.0 * m_max * i as f64 / (n - 1) as f64;
        points.push((CriticalKind2D::Boundary, m, m * m - g2));
    }
    BifurcationDiagram {
        gamma: params.gamma(),
        points,
    }
}

/// Number of connected components of `{L_z = m, G = g}` in the reduced space.
///
/// On the level set `b₂` is fixed by `b₁`, so the fibre is the curve
/// `b₃² = F(b₁) = (1 - b₁²)(g - m² + γ²(1 - b₁²)) - b₁² m²` over `|b₁| <= 1`.
/// Each component bounds one region `{b₃² <= F}`; those regions are counted
/// by flood fill on an `n × n` grid over `(b₁, b₃)`. Components thinner than a
/// grid cell are missed.
pub fn level_set_components(m: f64, g: f64, params: &SystemParams, n: usize) -> usize {
    let g2 = params.gamma2();
    let f = |b1: f64| {
        let s = 1.0 - b1 * b1;
        s * (g - m * m + g2 * s) - b1 * b1 * m * m
    };
    let n = n.max(8) | 1;
    let f_max = (0..=4 * n)
        .map(|i| f(-1.0 + 2.0 * i as f64 / (4 * n) as f64))
        .fold(0.0f64, f64::max);
    if f_max <= 0.0 {
        return 0;
    }
    let half = 1.1 * f_max.sqrt();
    let coord = |k: usize, lo: f64, hi: f64| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    let inside: Vec<bool> = (0..n * n)
        .map(|k| {
            let b1 = coord(k / n, -1.0, 1.0);
            let b3 = coord(k % n, -half, half);
            b3 * b3 <= f(b1)
        })
        .collect();
    let mut seen = vec![false; n * n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n * n {
        if !inside[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (i, j) = (k / n, k % n);
            let mut nb = Vec::with_capacity(4);
            if i > 0 {
                nb.push(k - n);
            }
            if i + 1 < n {
                nb.push(k + n);
            }
            if j > 0 {
                nb.push(k - 1);
            }
            if j + 1 < n {
                nb.push(k + 1);
            }
            for q in nb {
                if inside[q] && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    count
}

/// Point of the singular fibre `{L_z = 0, G = 0}` with `p_z` and azimuth `φ`
/// of `P`; `sign` picks the separatrix arc `b₃ = ±γ(1 - b₁²)`.
pub fn pinched_torus(
    pz: f64,
    phi: f64,
    sign: f64,
    params: &SystemParams,
) -> Result<EuclideanState, ClassicalError> {
    let s = params.speed();
    if !(pz.abs() <= s) {
        return Err(ClassicalError::PzRange { pz, max: s });
    }
    let b1 = pz / s;
    let w = 1.0 - b1 * b1;
    let gamma = params.gamma();
    let b = ReducedState {
        b1,
        b2: params.gamma2() * w,
        b3: sign.signum() * gamma * w,
        m: 0.0,
    };
    reconstruct(&b, params, phi)
}

/// `q(t) = tanh(±2γt - c)` along the separatrix of the `G` flow.
pub fn heteroclinic_q(t: f64, sign: f64, c: f64, params: &SystemParams) -> f64 {
    (sign.signum() * 2.0 * params.gamma() * t - c).tanh()
}

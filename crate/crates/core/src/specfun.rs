//! Associated Legendre (Ferrers) functions on [-1, 1], their norms and
//! Gauss-Legendre quadrature.
//!
//! Functions carry the Condon-Shortley phase, so `P_1^1(x) = -sqrt(1 - x^2)`.
//! Values are generated by upward recurrence in the degree.

use std::f64::consts::{LN_2, PI};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SpecfunError {
    #[error("invalid Legendre index (l={l}, m={m}); need 0 <= m <= l")]
    InvalidIndex { l: i64, m: i64 },
    #[error("argument {0} outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("norm of P_{l}^{m} overflows f64; use the log form")]
    Overflow { l: u32, m: u32 },
    #[error("quadrature order must be positive")]
    EmptyRule,
    #[error("Newton iteration for Gauss-Legendre node {node} of {n} did not converge")]
    NoConvergence { n: usize, node: usize },
}

/// Degree and order of an associated Legendre function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LegendreIndex {
    l: u32,
    m: u32,
}

impl LegendreIndex {
    pub fn new(l: i64, m: i64) -> Result<Self, SpecfunError> {
        if m < 0 || l < m || l > u32::MAX as i64 {
            return Err(SpecfunError::InvalidIndex { l, m });
        }
        Ok(Self {
            l: l as u32,
            m: m as u32,
        })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }
}

fn check_domain(x: f64) -> Result<(), SpecfunError> {
    if x.is_nan() || x.abs() > 1.0 {
        return Err(SpecfunError::OutOfDomain(x));
    }
    Ok(())
}

/// `P_l^m(x)` with the Condon-Shortley phase.
///
/// The starting value `(2m-1)!!` overflows for m beyond about 150; use
/// [`assoc_legendre_normalized`] there.
pub fn assoc_legendre(idx: LegendreIndex, x: f64) -> Result<f64, SpecfunError> {
    check_domain(x)?;
    let (l, m) = (idx.l, idx.m);
    let sin_theta = ((1.0 - x) * (1.0 + x)).sqrt();

    let mut pmm = 1.0;
    let mut odd = 1.0;
    for _ in 0..m {
        pmm *= -odd * sin_theta;
        odd += 2.0;
    }
    if l == m {
        return Ok(pmm);
    }

    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    let mut pm2 = pmm;
    for ll in (m + 2)..=l {
        let p = ((2 * ll - 1) as f64 * x * pm1 - (ll + m - 1) as f64 * pm2) / (ll - m) as f64;
        pm2 = pm1;
        pm1 = p;
    }
    Ok(pm1)
}

/// `P_l^m(x) / sqrt(legendre_norm_sq(l, m))`, unit L2 norm on [-1, 1].
///
/// Uses the normalized recurrence directly, so it stays finite for large m.
pub fn assoc_legendre_normalized(idx: LegendreIndex, x: f64) -> Result<f64, SpecfunError> {
    check_domain(x)?;
    let column = normalized_column(idx.m, idx.l, x);
    Ok(*column.last().expect("column is never empty"))
}

/// Normalized `P_l^m(x)` for l = m..=l_max, indexed by `l - m`.
pub fn normalized_column(m: u32, l_max: u32, x: f64) -> Vec<f64> {
    debug_assert!(l_max >= m);
    let sin2 = (1.0 - x) * (1.0 + x);
    let mf = m as f64;

    // P̄_m^m = (-1)^m sqrt((2m+1)/2 * prod_{i=1}^m (2i-1)/(2i)) sin^m
    let mut pmm = (0.5f64).sqrt();
    for i in 1..=m {
        let fi = i as f64;
        pmm *= -((2.0 * fi - 1.0) / (2.0 * fi) * sin2).sqrt();
    }
    pmm *= (2.0 * mf + 1.0).sqrt();

    let n = (l_max - m + 1) as usize;
    let mut out = Vec::with_capacity(n);
    out.push(pmm);
    if n == 1 {
        return out;
    }
    out.push(x * (2.0 * mf + 3.0).sqrt() * pmm);
    for l in (m + 2)..=l_max {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) * (2.0 * lf + 1.0)
            / ((2.0 * lf - 3.0) * (lf * lf - mf * mf)))
            .sqrt();
        let k = (l - m) as usize;
        let next = a * x * out[k - 1] - b * out[k - 2];
        out.push(next);
    }
    out
}

/// `ln ∫ (P_l^m)^2 dx = ln(2/(2l+1)) + ln((l+m)!/(l-m)!)`.
pub fn ln_legendre_norm_sq(idx: LegendreIndex) -> f64 {
    let (l, m) = (idx.l as u64, idx.m as u64);
    let mut acc = LN_2 - ((2 * l + 1) as f64).ln();
    for k in (l - m + 1)..=(l + m) {
        acc += (k as f64).ln();
    }
    acc
}

/// `∫_{-1}^{1} (P_l^m)^2 dx = 2/(2l+1) (l+m)!/(l-m)!`.
pub fn legendre_norm_sq(idx: LegendreIndex) -> Result<f64, SpecfunError> {
    let v = ln_legendre_norm_sq(idx).exp();
    if !v.is_finite() {
        return Err(SpecfunError::Overflow { l: idx.l, m: idx.m });
    }
    Ok(v)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integral over [a, b] by affine map.
    pub fn integrate_on<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        half * self.integrate(|x| f(mid + half * x))
    }
}

/// `(P_n(x), P_n'(x))` from the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

const NEWTON_MAX_ITER: usize = 100;

/// n-point Gauss-Legendre rule by Newton iteration on the roots of `P_n`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule, SpecfunError> {
    if n == 0 {
        return Err(SpecfunError::EmptyRule);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi-style initial guess, largest root first.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                converged = true;
                let (_, d) = legendre_and_derivative(n, x);
                dp = d;
                break;
            }
        }
        if !converged {
            // the last step may have stalled on rounding; accept if the residual is tiny
            let (p, _) = legendre_and_derivative(n, x);
            if p.abs() > 1e-12 * dp.abs().max(1.0) {
                return Err(SpecfunError::NoConvergence { n, node: i });
            }
        }
        if n % 2 == 1 && i == half - 1 {
            x = 0.0;
            let (_, d) = legendre_and_derivative(n, 0.0);
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    Ok(QuadratureRule { nodes, weights })
}

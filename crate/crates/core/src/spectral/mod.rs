//! Eigenvalues and eigenfunctions of the prolate angular spheroidal equation
//!
//! ```text
//! -((1-η²) ψ')' + m²/(1-η²) ψ - γ²(1-η²) ψ = g ψ,   η ∈ [-1, 1]
//! ```
//!
//! by expansion in associated Legendre functions. The expansion coefficients
//! obey the classical three-term recursion for the equation with `-c²η²`
//! (eigenvalue `λ`), taken with `c² = γ²`; the returned eigenvalue is
//! `g = λ - γ²`.

pub mod tridiag;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specfun::{self, LegendreIndex, SpecfunError};
pub use tridiag::{eigen_tridiag, tridiag_apply, tridiag_norm, TridiagEigen};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SpectralError {
    #[error("gamma^2 = {0} is not allowed (prolate case requires gamma^2 >= 0)")]
    Oblate(f64),
    #[error("invalid label l={l} for m={m}; need l >= |m|")]
    InvalidLabel { l: i64, m: i64 },
    #[error("truncation K={0} too small; need K >= 2")]
    TruncationTooSmall(usize),
    #[error("tridiagonal shape mismatch: {diag} diagonal vs {offdiag} off-diagonal entries")]
    Shape { diag: usize, offdiag: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("QL iteration cap exceeded at eigenvalue {index} of {size}")]
    IterationCap { index: usize, size: usize },
    #[error("no convergence for m={m} ({parity:?}) up to truncation K={k}")]
    NoConvergence { m: i64, parity: Parity, k: usize },
    #[error("argument {0} outside the domain")]
    OutOfDomain(f64),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Parity of `l - m`, equivalently of the eigenfunction under `η -> -η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// First index `k` of the expansion for this class.
    pub fn offset(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// One Sturm-Liouville problem: azimuthal number and `γ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpheroidalParams {
    m: i64,
    gamma2: f64,
}

impl SpheroidalParams {
    pub fn new(m: i64, gamma2: f64) -> Result<Self, SpectralError> {
        if gamma2.is_nan() || gamma2 < 0.0 || !gamma2.is_finite() {
            return Err(SpectralError::Oblate(gamma2));
        }
        Ok(Self { m, gamma2 })
    }

    pub fn from_gamma(m: i64, gamma: f64) -> Result<Self, SpectralError> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(SpectralError::Oblate(gamma));
        }
        Self::new(m, gamma * gamma)
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn abs_m(&self) -> u32 {
        self.m.unsigned_abs() as u32
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn gamma(&self) -> f64 {
        self.gamma2.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// Starting truncation per parity class; `None` picks it from `l_max` and `γ`.
    pub truncation: Option<usize>,
    /// Largest truncation tried before reporting non-convergence.
    pub max_truncation: usize,
    /// Relative eigenvalue change allowed between truncations `K` and `K + 10`.
    pub eig_tol: f64,
    /// Bound on `|last coefficient| / max |coefficient|`.
    pub tail_tol: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            truncation: None,
            max_truncation: 2000,
            eig_tol: 1e-11,
            tail_tol: 1e-13,
        }
    }
}

const TRUNCATION_STEP: usize = 10;

/// A labelled eigenpair.
///
/// `coeffs[j]` multiplies the unit-norm Legendre function
/// `P_{|m|+k}^{|m|} / ||P_{|m|+k}^{|m|}||` with `k = parity.offset() + 2j`,
/// and the vector has unit Euclidean norm. With this choice `Ps` has unit
/// L2 norm on [-1, 1] and `Z` unit norm on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub m: i64,
    pub l: i64,
    pub g: f64,
    pub parity: Parity,
    pub coeffs: Vec<f64>,
}

impl EigenResult {
    /// Coefficients `d_k` of the unnormalized Ferrers functions `P_{|m|+k}^{|m|}`.
    pub fn legendre_coeffs(&self) -> Vec<f64> {
        let am = self.m.unsigned_abs() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let n = am + self.parity.offset() as i64 + 2 * j as i64;
                let idx = LegendreIndex::new(n, am).expect("n >= |m|");
                c * (-0.5 * specfun::ln_legendre_norm_sq(idx)).exp()
            })
            .collect()
    }

    /// `|last coefficient| / max |coefficient|`.
    pub fn tail_ratio(&self) -> f64 {
        tail_ratio(&self.coeffs)
    }

    /// `Ps_l^m(γ, η)`.
    pub fn eval(&self, eta: f64) -> Result<f64, SpectralError> {
        if eta.is_nan() || eta.abs() > 1.0 {
            return Err(SpectralError::OutOfDomain(eta));
        }
        let am = self.m.unsigned_abs() as u32;
        let top = am + self.parity.offset() as u32 + 2 * (self.coeffs.len() as u32).saturating_sub(1);
        let column = specfun::normalized_column(am, top, eta);
        let off = self.parity.offset();
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| c * column[off + 2 * j])
            .sum())
    }

    /// `Z_l^m(θ, φ) = (2π)^{-1/2} Ps_l^m(γ, cos θ) e^{imφ}`.
    pub fn eval_z(&self, theta: f64, phi: f64) -> Result<Complex64, SpectralError> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(SpectralError::OutOfDomain(theta));
        }
        if !phi.is_finite() {
            return Err(SpectralError::OutOfDomain(phi));
        }
        let ps = self.eval(theta.cos().clamp(-1.0, 1.0))?;
        let amp = ps / (2.0 * std::f64::consts::PI).sqrt();
        Ok(Complex64::from_polar(1.0, self.m as f64 * phi) * amp)
    }
}

fn tail_ratio(v: &[f64]) -> f64 {
    let max = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    match v.last() {
        Some(last) if max > 0.0 => last.abs() / max,
        _ => 0.0,
    }
}

/// Symmetric tridiagonal matrix as (diagonal, off-diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

/// Coefficients `(α_k, β_k, γ_k)` of `α_k d_{k+2} + (β_k - λ) d_k + γ_k d_{k-2} = 0`.
fn recursion_coefficients(m: f64, k: f64, c2: f64) -> (f64, f64, f64) {
    let alpha = (2.0 * m + k + 2.0) * (2.0 * m + k + 1.0) * c2
        / ((2.0 * m + 2.0 * k + 3.0) * (2.0 * m + 2.0 * k + 5.0));
    let mk = (m + k) * (m + k + 1.0);
    let beta = mk
        + (2.0 * mk - 2.0 * m * m - 1.0) * c2 / ((2.0 * m + 2.0 * k - 1.0) * (2.0 * m + 2.0 * k + 3.0));
    let gamma = k * (k - 1.0) * c2 / ((2.0 * m + 2.0 * k - 3.0) * (2.0 * m + 2.0 * k - 1.0));
    (alpha, beta, gamma)
}

/// Symmetrized recursion matrix of size `k` for one parity class.
///
/// Its eigenvalues approximate `λ`; subtract `γ²` to get `g`.
pub fn build_recursion_matrix(
    params: SpheroidalParams,
    parity: Parity,
    k: usize,
) -> Result<Tridiagonal, SpectralError> {
    if k < 2 {
        return Err(SpectralError::TruncationTooSmall(k));
    }
    let am = params.abs_m() as i64;
    let m = am as f64;
    let c2 = params.gamma2;
    let ks: Vec<i64> = (0..k).map(|j| parity.offset() as i64 + 2 * j as i64).collect();
    let ln_norm: Vec<f64> = ks
        .iter()
        .map(|&kk| specfun::ln_legendre_norm_sq(LegendreIndex::new(am + kk, am).expect("valid")))
        .collect();
    let diag = ks
        .iter()
        .map(|&kk| recursion_coefficients(m, kk as f64, c2).1)
        .collect();
    let offdiag = (0..k - 1)
        .map(|j| {
            let (alpha, _, _) = recursion_coefficients(m, ks[j] as f64, c2);
            alpha * (0.5 * (ln_norm[j] - ln_norm[j + 1])).exp()
        })
        .collect();
    Ok(Tridiagonal { diag, offdiag })
}

fn initial_truncation(params: SpheroidalParams, l_max: i64, cfg: &SpectralConfig) -> usize {
    let needed = ((l_max - params.abs_m() as i64) / 2 + 1) as usize;
    let auto = needed + 20usize.max((2.0 * params.gamma()).ceil() as usize);
    cfg.truncation.map_or(auto, |k| k.max(needed + 1)).max(2)
}

/// Lowest `count` eigenpairs of one parity class, converged in the truncation.
fn solve_class(
    params: SpheroidalParams,
    parity: Parity,
    count: usize,
    k0: usize,
    cfg: &SpectralConfig,
) -> Result<Vec<(f64, Vec<f64>)>, SpectralError> {
    let mut k = k0;
    let mut prev = eigen_tridiag_class(params, parity, k)?;
    loop {
        let next_k = k + TRUNCATION_STEP;
        if next_k > cfg.max_truncation {
            return Err(SpectralError::NoConvergence {
                m: params.m,
                parity,
                k,
            });
        }
        let cur = eigen_tridiag_class(params, parity, next_k)?;
        let shift_ok = (0..count).all(|j| {
            let (a, b) = (prev.values[j], cur.values[j]);
            (a - b).abs() <= cfg.eig_tol * b.abs().max(1.0)
        });
        let tail_ok = (0..count).all(|j| tail_ratio(&cur.vectors[j]) < cfg.tail_tol);
        k = next_k;
        if shift_ok && tail_ok {
            return Ok(cur
                .values
                .into_iter()
                .zip(cur.vectors)
                .take(count)
                .map(|(v, mut vec)| {
                    fix_sign(&mut vec);
                    (v - params.gamma2, vec)
                })
                .collect());
        }
        prev = cur;
    }
}

fn eigen_tridiag_class(
    params: SpheroidalParams,
    parity: Parity,
    k: usize,
) -> Result<TridiagEigen, SpectralError> {
    let t = build_recursion_matrix(params, parity, k)?;
    eigen_tridiag(&t.diag, &t.offdiag)
}

/// Largest-magnitude entry positive; ties go to the lowest index.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&b| b < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Eigenpairs for `l = |m|, …, l_max`, ascending in `l`.
///
/// Within each parity class the `j`-th eigenvalue from the bottom gets
/// `l = |m| + offset + 2j`.
pub fn spheroidal_eigenvalues(
    params: SpheroidalParams,
    l_max: i64,
    cfg: &SpectralConfig,
) -> Result<Vec<EigenResult>, SpectralError> {
    let am = params.abs_m() as i64;
    if l_max < am {
        return Err(SpectralError::InvalidLabel { l: l_max, m: params.m });
    }
    let k0 = initial_truncation(params, l_max, cfg);
    let mut out = Vec::with_capacity((l_max - am + 1) as usize);
    let mut classes = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let span = l_max - am - parity.offset() as i64;
        if span < 0 {
            classes.push(Vec::new());
            continue;
        }
        classes.push(solve_class(params, parity, (span / 2 + 1) as usize, k0, cfg)?);
    }
    for l in am..=l_max {
        let parity = Parity::of(l - am);
        let j = ((l - am) / 2) as usize;
        let (g, coeffs) = classes[parity.offset()][j].clone();
        out.push(EigenResult {
            m: params.m,
            l,
            g,
            parity,
            coeffs,
        });
    }
    Ok(out)
}

/// Single eigenpair for label `l`.
pub fn eigenpair(
    l: i64,
    params: SpheroidalParams,
    cfg: &SpectralConfig,
) -> Result<EigenResult, SpectralError> {
    if l < params.abs_m() as i64 {
        return Err(SpectralError::InvalidLabel { l, m: params.m });
    }
    let all = spheroidal_eigenvalues(params, l, cfg)?;
    Ok(all.into_iter().last().expect("l >= |m| gives at least one"))
}

/// `Ps_l^m(γ, η)` normalized so `Z_l^m` has unit norm on the sphere.
pub fn eval_ps(
    l: i64,
    params: SpheroidalParams,
    eta: f64,
    cfg: &SpectralConfig,
) -> Result<f64, SpectralError> {
    eigenpair(l, params, cfg)?.eval(eta)
}

/// `Z_l^m(θ, φ)`.
pub fn eval_z(
    l: i64,
    params: SpheroidalParams,
    theta: f64,
    phi: f64,
    cfg: &SpectralConfig,
) -> Result<Complex64, SpectralError> {
    eigenpair(l, params, cfg)?.eval_z(theta, phi)
}

/// Discrete symmetry labels of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetryClass {
    pub parity_lm: Parity,
    pub parity_m: Parity,
    /// Invariant under the antipodal-type symmetry: `l - m` and `m` share parity, i.e. `l` even.
    pub s2_invariant: bool,
}

pub fn symmetry_class(l: i64, m: i64) -> Result<SymmetryClass, SpectralError> {
    if l < m.abs() {
        return Err(SpectralError::InvalidLabel { l, m });
    }
    let parity_lm = Parity::of(l - m);
    let parity_m = Parity::of(m);
    Ok(SymmetryClass {
        parity_lm,
        parity_m,
        s2_invariant: parity_lm == parity_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: i64, g2: f64) -> SpheroidalParams {
        SpheroidalParams::new(m, g2).unwrap()
    }

    #[test]
    fn spherical_limit_matrix() {
        let t = build_recursion_matrix(p(0, 0.0), Parity::Even, 4).unwrap();
        assert_eq!(t.diag, vec![0.0, 6.0, 20.0, 42.0]);
        assert!(t.offdiag.iter().all(|&x| x == 0.0));
        let t = build_recursion_matrix(p(0, 0.0), Parity::Odd, 4).unwrap();
        assert_eq!(t.diag, vec![2.0, 12.0, 30.0, 56.0]);
        assert!(build_recursion_matrix(p(0, 1.0), Parity::Odd, 1).is_err());
    }

    #[test]
    fn rejects_oblate() {
        assert!(matches!(SpheroidalParams::new(0, -1.0), Err(SpectralError::Oblate(_))));
    }

    #[test]
    fn spherical_limit_values() {
        let r = spheroidal_eigenvalues(p(2, 0.0), 6, &SpectralConfig::default()).unwrap();
        let g: Vec<f64> = r.iter().map(|e| e.g).collect();
        for (got, want) in g.iter().zip([6.0, 12.0, 20.0, 30.0, 42.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(r.iter().map(|e| e.l).collect::<Vec<_>>(), vec![2, 3, 4, 5, 6]);
    }

    #[test]
    fn symmetry_classes() {
        let c = symmetry_class(4, 2).unwrap();
        assert_eq!((c.parity_lm, c.parity_m, c.s2_invariant), (Parity::Even, Parity::Even, true));
        let c = symmetry_class(3, 1).unwrap();
        assert_eq!((c.parity_lm, c.parity_m, c.s2_invariant), (Parity::Even, Parity::Odd, false));
        let c = symmetry_class(3, 3).unwrap();
        assert_eq!((c.parity_lm, c.parity_m, c.s2_invariant), (Parity::Even, Parity::Odd, false));
        assert!(symmetry_class(1, 2).is_err());
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.1, -0.9, 0.3];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
    }
}

//! Linear stability of relative equilibria of `(L_z, G)`.
//!
//! A point is critical when `X_{G/2} + β X_{L_z} = 0` for some `β`; the
//! linearization of that combined field then has two zero eigenvalues from
//! the Casimirs plus four that determine the type.

use nalgebra::{Matrix6, Schur};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{e3_vector_field, ClassicalError, EuclideanState, Hamiltonian, SystemParams};

/// Relative residual below which a point counts as critical.
pub const CRITICAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    /// Quadruple `±α ± iβ` with `α, β ≠ 0`.
    FocusFocus,
    /// One purely imaginary pair besides zeros.
    EllipticTransversal,
    /// Critical, but neither of the above (e.g. a real pair).
    Other,
    /// Not a relative equilibrium.
    Regular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalClassification {
    pub kind: CriticalKind,
    pub beta: Option<f64>,
    /// `|X_{G/2} + β X_{L_z}|` relative to the field scale.
    pub residual: f64,
    /// Eigenvalues with the two Casimir zero modes removed, sorted by
    /// `(re, im)`; empty for regular points.
    pub eigenvalues: Vec<Complex<f64>>,
}

fn combined(state: &EuclideanState, beta: f64, params: &SystemParams) -> [f64; 6] {
    let g = e3_vector_field(state, Hamiltonian::G, params).to_array();
    let lz = e3_vector_field(state, Hamiltonian::Lz, params).to_array();
    std::array::from_fn(|i| 0.5 * g[i] + beta * lz[i])
}

fn norm(v: &[f64; 6]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn state_scale(state: &EuclideanState, params: &SystemParams) -> f64 {
    let z = state.to_array();
    let r = norm(&z).max(1.0);
    r * r * (1.0 + params.a() * params.a())
}

/// Classifies a relative equilibrium. With `beta = None` the multiplier is
/// fitted by least squares; at the poles both fields vanish and `beta` must
/// be supplied.
pub fn classify_critical_point(
    state: &EuclideanState,
    beta: Option<f64>,
    params: &SystemParams,
) -> Result<CriticalClassification, ClassicalError> {
    let xg: [f64; 6] = {
        let g = e3_vector_field(state, Hamiltonian::G, params).to_array();
        std::array::from_fn(|i| 0.5 * g[i])
    };
    let xl = e3_vector_field(state, Hamiltonian::Lz, params).to_array();
    let scale = state_scale(state, params);
    let ll: f64 = xl.iter().map(|x| x * x).sum();
    let fitted = if ll > (CRITICAL_TOL * scale).powi(2) {
        Some(-xg.iter().zip(&xl).map(|(a, b)| a * b).sum::<f64>() / ll)
    } else {
        None
    };
    let residual_for = |b: f64| norm(&combined(state, b, params)) / scale;
    let beta = match (beta, fitted) {
        (Some(b), Some(best)) => {
            if residual_for(b) > CRITICAL_TOL {
                if residual_for(best) <= CRITICAL_TOL {
                    return Err(ClassicalError::WrongBeta { given: b, best });
                }
                return Ok(regular(residual_for(best)));
            }
            b
        }
        (Some(b), None) => b,
        (None, Some(best)) => best,
        (None, None) => {
            if norm(&xg) / scale > CRITICAL_TOL {
                return Ok(regular(norm(&xg) / scale));
            }
            return Err(ClassicalError::BetaRequired);
        }
    };
    let residual = residual_for(beta);
    if residual > CRITICAL_TOL {
        return Ok(regular(residual));
    }

    // the field is quadratic, so central differences are exact up to rounding
    let z0 = state.to_array();
    let h = 1e-4 * norm(&z0).max(1.0);
    let jac = Matrix6::from_fn(|i, j| {
        let mut zp = z0;
        let mut zm = z0;
        zp[j] += h;
        zm[j] -= h;
        let fp = combined(&EuclideanState::from_array(zp), beta, params);
        let fm = combined(&EuclideanState::from_array(zm), beta, params);
        (fp[i] - fm[i]) / (2.0 * h)
    });
    let mut eig = eigenvalues_of(jac)?;
    eig.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let rest: Vec<Complex<f64>> = eig.split_off(2);
    let mut eigenvalues = rest;
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let spread = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let zero = 1e-6 * spread;
    let nonzero: Vec<&Complex<f64>> = eigenvalues.iter().filter(|z| z.norm() > zero).collect();
    let kind = if nonzero.len() == 4 && nonzero.iter().all(|z| z.re.abs() > zero && z.im.abs() > zero) {
        CriticalKind::FocusFocus
    } else if nonzero.len() == 2 && nonzero.iter().all(|z| z.re.abs() <= zero) {
        CriticalKind::EllipticTransversal
    } else {
        CriticalKind::Other
    };
    Ok(CriticalClassification {
        kind,
        beta: Some(beta),
        residual,
        eigenvalues,
    })
}

/// Eigenvalues by real Schur form. The QR iteration can stall on very
/// structured matrices; an orthogonal conjugate is tried before giving up.
fn eigenvalues_of(jac: Matrix6<f64>) -> Result<Vec<Complex<f64>>, ClassicalError> {
    let mut candidate = jac;
    for attempt in 0..4 {
        if let Some(schur) = Schur::try_new(candidate, f64::EPSILON, 2_000) {
            return Ok(schur.complex_eigenvalues().iter().copied().collect());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(attempt);
        let q = Matrix6::from_fn(|_, _| rng.gen_range(-1.0..1.0)).qr().q();
        candidate = q.transpose() * jac * q;
    }
    Err(ClassicalError::Eigen)
}

fn regular(residual: f64) -> CriticalClassification {
    CriticalClassification {
        kind: CriticalKind::Regular,
        beta: None,
        residual,
        eigenvalues: Vec::new(),
    }
}

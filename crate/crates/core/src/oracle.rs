//! Brute-force finite-difference eigensolver for the angular spheroidal
//! equation, independent of the Legendre expansion.
//!
//! With `ψ = (1-η²)^{|m|/2} u` the equation becomes the self-adjoint problem
//!
//! ```text
//! -(p u')' + [|m|(|m|+1) - γ²(1-η²)] w u = g w u,   p = (1-η²)^{|m|+1},  w = (1-η²)^{|m|}
//! ```
//!
//! discretized with second-order cell-centred differences on nodes
//! `η_i = -1 + (i - 1/2) h`, whose outermost nodes sit at `±(1 - h/2)`. The flux
//! coefficient `p` vanishes on the boundary faces, so the boundary value of `u`
//! outside the clipped interval never enters the scheme. Eigenvalues come from
//! Sturm-sequence bisection and are Richardson-extrapolated in `h²`.

use serde::{Deserialize, Serialize};

use crate::spectral::SpheroidalParams;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error("grid size {0} below the minimum of 50")]
    GridTooSmall(usize),
    #[error("need at least one Richardson level")]
    NoLevels,
    #[error("requested zero eigenvalues")]
    EmptyRequest,
    #[error("grid too coarse for eigenvalue rank {rank}: extrapolation table is not monotone")]
    GridTooCoarse { rank: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Coarsest grid size.
    pub n: usize,
    /// The solver uses `richardson_levels + 2` grids `n, 2n, 4n, …`.
    pub richardson_levels: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n: 200,
            richardson_levels: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEigen {
    pub rank: usize,
    pub g: f64,
    pub error_estimate: f64,
}

/// Symmetric tridiagonal finite-difference matrix on `n` cells.
pub fn fd_matrix(params: SpheroidalParams, n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = params.abs_m() as i32;
    let g2 = params.gamma2();
    let h = 2.0 / n as f64;
    let one_minus_sq = |eta: f64| (1.0 - eta) * (1.0 + eta);
    // face i sits between cells i-1 and i, at η = -1 + i h
    let p_face: Vec<f64> = (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                0.0
            } else {
                one_minus_sq(-1.0 + i as f64 * h).powi(m + 1)
            }
        })
        .collect();
    let centres: Vec<f64> = (0..n).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
    let w: Vec<f64> = centres.iter().map(|&e| one_minus_sq(e).powi(m)).collect();
    let mm1 = (m * (m + 1)) as f64;
    let h2 = h * h;
    let diag = (0..n)
        .map(|i| (p_face[i] + p_face[i + 1]) / (h2 * w[i]) + mm1 - g2 * one_minus_sq(centres[i]))
        .collect();
    let off = (0..n - 1)
        .map(|i| -p_face[i + 1] / (h2 * (w[i] * w[i + 1]).sqrt()))
        .collect();
    (diag, off)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below `x`.
pub fn sturm_count_below(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let pivmin = f64::MIN_POSITIVE / f64::EPSILON;
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { offdiag[i - 1] * offdiag[i - 1] / q };
        q = diag[i] - x - coupling;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
pub fn bisect_eigenvalue(diag: &[f64], offdiag: &[f64], k: usize) -> f64 {
    let n = diag.len();
    let radius = (0..n)
        .map(|i| {
            let a = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
            let b = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
            (diag[i] - a - b, diag[i] + a + b)
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
    let (mut lo, mut hi) = radius;
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let tol = 2.0 * f64::EPSILON * scale;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count_below(diag, offdiag, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Accepted range for successive-difference ratios: 4 for a dominant `h²`
/// error, up to 16 when the `h²` coefficient is small and `h⁴` takes over.
const RATIO_WINDOW: (f64, f64) = (3.0, 17.0);

/// Lowest `count` eigenvalues on a single grid, no extrapolation.
pub fn fd_eigenvalues_raw(params: SpheroidalParams, count: usize, n: usize) -> Vec<f64> {
    let (d, e) = fd_matrix(params, n);
    (0..count).map(|k| bisect_eigenvalue(&d, &e, k)).collect()
}

fn matrix_scale(params: SpheroidalParams, n: usize) -> f64 {
    let (d, e) = fd_matrix(params, n);
    crate::spectral::tridiag_norm(&d, &e)
}

/// Lowest `count` eigenvalues of the angular operator, extrapolated in `h²`.
///
/// The reported value comes from the two finest grids; the error estimate is
/// its distance to the extrapolant from the next coarser pair plus a rounding
/// floor proportional to `ε ||T||` on the finest grid.
pub fn fd_eigenvalues(
    params: SpheroidalParams,
    count: usize,
    cfg: &OracleConfig,
) -> Result<Vec<OracleEigen>, OracleError> {
    if cfg.n < 50 {
        return Err(OracleError::GridTooSmall(cfg.n));
    }
    if cfg.richardson_levels == 0 {
        return Err(OracleError::NoLevels);
    }
    if count == 0 {
        return Err(OracleError::EmptyRequest);
    }
    let grids: Vec<usize> = (0..cfg.richardson_levels + 2).map(|j| cfg.n << j).collect();
    let table: Vec<Vec<f64>> = grids
        .iter()
        .map(|&n| fd_eigenvalues_raw(params, count, n))
        .collect();
    let finest = *grids.last().expect("at least two grids");
    let noise = 16.0 * f64::EPSILON * matrix_scale(params, finest);

    let mut out = Vec::with_capacity(count);
    for rank in 0..count {
        let g: Vec<f64> = table.iter().map(|row| row[rank]).collect();
        let diffs: Vec<f64> = g.windows(2).map(|w| w[1] - w[0]).collect();
        for pair in diffs.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a.abs() <= noise || b.abs() <= noise {
                continue;
            }
            let ratio = a / b;
            if !(RATIO_WINDOW.0..=RATIO_WINDOW.1).contains(&ratio) {
                return Err(OracleError::GridTooCoarse { rank });
            }
        }
        let extrap: Vec<f64> = g.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
        let value = *extrap.last().expect("two grids give one extrapolant");
        let prev = extrap[extrap.len() - 2];
        out.push(OracleEigen {
            rank,
            g: value,
            error_estimate: (value - prev).abs() + noise,
        });
    }
    Ok(out)
}

/// Label of the `rank`-th eigenvalue (0-based, both parities merged).
pub fn rank_to_label(m: i64, rank: usize) -> i64 {
    m.abs() + rank as i64
}

//! Asymptotic eigenvalue formulas for small and large `γ`, the two boundary
//! parabolas guiding the monodromy loop, and gaps between neighbouring states.

use serde::{Deserialize, Serialize};

use crate::lattice::JointSpectrum;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum AsymptoticsError {
    #[error("state (m={m}, l={l}) missing from the spectrum")]
    MissingLabel { m: i64, l: i64 },
    #[error("parabola parameter l* must be positive, got {0}")]
    NonPositiveLStar(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    SmallGamma,
    LargeGamma,
}

/// `l(l+1) - ½ (1 + (2m-1)(2m+1)/((2l-1)(2l+3))) γ²`.
pub fn g_small_gamma(l: i64, m: i64, gamma2: f64) -> f64 {
    let (lf, mf) = (l as f64, m as f64);
    let ratio = (2.0 * mf - 1.0) * (2.0 * mf + 1.0) / ((2.0 * lf - 1.0) * (2.0 * lf + 3.0));
    lf * (lf + 1.0) - 0.5 * (1.0 + ratio) * gamma2
}

/// `-γ² + (2n+1)γ - 3/4 + m² - ½ n(n+1)` with `n = l - |m|`.
pub fn g_large_gamma(l: i64, m: i64, gamma: f64) -> f64 {
    let n = (l - m.abs()) as f64;
    let mf = m as f64;
    -gamma * gamma + (2.0 * n + 1.0) * gamma - 0.75 + mf * mf - 0.5 * n * (n + 1.0)
}

/// `g = m² - γ²` (bottom edge) and `g = l*² - γ²/2 - ½ m² (γ/l*)²` (fixed `l = l*`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParabolas {
    pub gamma: f64,
    pub l_star: f64,
}

impl BoundaryParabolas {
    pub fn lower(&self, m: f64) -> f64 {
        m * m - self.gamma * self.gamma
    }

    pub fn upper(&self, m: f64) -> f64 {
        let r = self.gamma / self.l_star;
        self.l_star * self.l_star - 0.5 * self.gamma * self.gamma - 0.5 * m * m * r * r
    }
}

pub fn boundary_parabolas(gamma: f64, l_star: f64) -> Result<BoundaryParabolas, AsymptoticsError> {
    if !(l_star > 0.0) {
        return Err(AsymptoticsError::NonPositiveLStar(l_star));
    }
    Ok(BoundaryParabolas { gamma, l_star })
}

/// `γ = sqrt(2/3) l*` puts both parabola vertices at the same distance from the origin.
pub fn balanced_gamma(l_star: f64) -> f64 {
    (2.0f64 / 3.0).sqrt() * l_star
}

/// Smallest integer `l*` with `sqrt(2/3) l* >= γ`.
pub fn balanced_l_star(gamma: f64) -> i64 {
    let x = (1.5f64).sqrt() * gamma;
    // guard against x landing a hair above an integer through rounding
    let r = x.round();
    if (x - r).abs() < 1e-12 * x.max(1.0) {
        r as i64
    } else {
        x.ceil() as i64
    }
}

/// Measured gaps around `(m, l) = (0, l)` with the regime's leading-order predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub regime: Regime,
    pub l: i64,
    /// `g_{l+1}^1 - g_l^0`.
    pub diagonal: f64,
    /// `(g_l^0 + g_{l+2}^0)/2 - g_{l+1}^1`.
    pub midpoint: f64,
    /// `g_{l+2}^0 - g_l^0`.
    pub vertical: f64,
    /// Leading-order prediction for `diagonal`.
    pub diagonal_predicted: f64,
    /// Leading-order prediction for `midpoint`.
    pub midpoint_predicted: f64,
    /// Leading-order prediction for `vertical`.
    pub vertical_predicted: f64,
}

/// Gaps between `g_l^0`, `g_{l+1}^1`, `g_{l+2}^0`.
///
/// Predictions in the large-`γ` regime follow from [`g_large_gamma`]:
/// diagonal `1`, vertical `4γ - (2l+3)`. In the small-`γ` regime:
/// midpoint `1`, diagonal `2(l+1)`, vertical `4l + 6`.
pub fn neighbor_gaps(
    spectrum: &JointSpectrum,
    l: i64,
    regime: Regime,
) -> Result<GapReport, AsymptoticsError> {
    let get = |m: i64, l: i64| spectrum.get(m, l).ok_or(AsymptoticsError::MissingLabel { m, l });
    let g0 = get(0, l)?;
    let g1 = get(1, l + 1)?;
    let g2 = get(0, l + 2)?;
    let lf = l as f64;
    let gamma = spectrum.gamma;
    let (diagonal_predicted, midpoint_predicted, vertical_predicted) = match regime {
        Regime::LargeGamma => {
            let d = g_large_gamma(l + 1, 1, gamma) - g_large_gamma(l, 0, gamma);
            let mid = 0.5 * (g_large_gamma(l, 0, gamma) + g_large_gamma(l + 2, 0, gamma))
                - g_large_gamma(l + 1, 1, gamma);
            (d, mid, 4.0 * gamma - (2.0 * lf + 3.0))
        }
        Regime::SmallGamma => (2.0 * (lf + 1.0), 1.0, 4.0 * lf + 6.0),
    };
    Ok(GapReport {
        regime,
        l,
        diagonal: g1 - g0,
        midpoint: 0.5 * (g0 + g2) - g1,
        vertical: g2 - g0,
        diagonal_predicted,
        midpoint_predicted,
        vertical_predicted,
    })
}

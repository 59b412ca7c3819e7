//! Action `I(m, g) = (1/2π) ∮ p dq` on the reduced space.

use super::{ClassicalError, SystemParams};

/// Positive root `s* ∈ [0, 1]` of `h(s) = γ² s² + g s - m²` by bisection,
/// where `s = 1 - q²`.
fn turning_s(m: f64, g: f64, gamma2: f64) -> Result<f64, ClassicalError> {
    if m == 0.0 {
        // h(s) = s (γ² s + g): skip the trivial root at s = 0
        return Ok(if g < 0.0 { (-g / gamma2).min(1.0) } else { 0.0 });
    }
    let h = |s: f64| gamma2 * s * s + g * s - m * m;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if h(hi) < 0.0 {
        // on the boundary h(1) vanishes up to rounding
        if -h(hi) <= 1e-12 * (gamma2 + g.abs() + m * m).max(1.0) {
            return Ok(1.0);
        }
        return Err(ClassicalError::Bracketing { m, g });
    }
    if h(lo) >= 0.0 {
        return Ok(0.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

struct Budget(std::cell::Cell<usize>);

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    budget: &Budget,
) -> Result<f64, ClassicalError> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= 15.0 * tol || delta.abs() <= floor || m <= a || m >= b {
        return Ok(left + right + delta / 15.0);
    }
    let left_budget = budget.0.get();
    if left_budget == 0 {
        return Err(ClassicalError::Quadrature);
    }
    budget.0.set(left_budget - 1);
    Ok(adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, budget)?
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, budget)?)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`, giving up after
/// about a million subdivisions.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, ClassicalError> {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, &Budget(std::cell::Cell::new(1 << 20)))
}

/// `I(m, g)` for `g >= m² - γ²`.
///
/// With turning points `q± = ±sqrt(1 - s*)` and `q = q₋ + (q₊ - q₋) sin²t`,
/// the momentum factors as `h(s) = (q₊² - q²)(γ²(s + s*) + g)`, which leaves a
/// smooth integrand on `[0, π/2]`.
pub fn action_i(m: f64, g: f64, params: &SystemParams) -> Result<f64, ClassicalError> {
    let gamma2 = params.gamma2();
    let floor = m * m - gamma2;
    if g < floor {
        if floor - g > 1e-12 * floor.abs().max(1.0) {
            return Err(ClassicalError::BelowBoundary { m, g });
        }
        return Ok(0.0);
    }
    let s_star = turning_s(m, g, gamma2)?;
    let qp = (1.0 - s_star).max(0.0).sqrt();
    let w = 2.0 * qp;
    if w == 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| {
        let (sn, cs) = t.sin_cos();
        let (s2, c2) = (sn * sn, cs * cs);
        // 1 + q = (1 - q₊) + w sin²t,  1 - q = (1 - q₊) + w cos²t
        let s = ((1.0 - qp) + w * s2) * ((1.0 - qp) + w * c2);
        if s <= 0.0 {
            return 0.0;
        }
        let c = (gamma2 * (s + s_star) + g).max(0.0);
        2.0 * w * w * s2 * c2 * c.sqrt() / s
    };
    let scale = (gamma2 + g.abs() + m * m).sqrt().max(1.0);
    Ok(adaptive_simpson(f, 0.0, std::f64::consts::FRAC_PI_2, 1e-13 * scale)? / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_on_cubic() {
        let v = adaptive_simpson(|x| x * x * x - x, 0.0, 2.0, 1e-14).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn turning_point_matches_quadratic_formula() {
        for &(m, g, g2) in &[(1.0, 3.0, 4.0), (2.5, -1.0, 9.0), (0.0, -2.0, 4.0)] {
            let s = turning_s(m, g, g2).unwrap();
            let closed = (-g + (g * g + 4.0 * g2 * m * m).sqrt()) / (2.0 * g2);
            assert!((s - closed).abs() < 1e-14, "{s} {closed}");
        }
    }

    #[test]
    fn below_boundary_rejected() {
        let pr = SystemParams::unit_speed(2.0).unwrap();
        assert!(matches!(action_i(1.0, -4.0, &pr), Err(ClassicalError::BelowBoundary { .. })));
        assert_eq!(action_i(1.0, -3.0, &pr).unwrap(), 0.0);
    }
}

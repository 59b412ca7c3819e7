use std::f64::consts::PI;

use proptest::prelude::*;

use spheroidal::specfun::gauss_legendre;
use spheroidal::spectral::*;

fn cfg() -> SpectralConfig {
    SpectralConfig::default()
}

/// Left side of the angular equation minus `g ψ`, by central differences.
fn ode_residual(e: &EigenResult, gamma2: f64, eta: f64) -> f64 {
    let h = 1e-4;
    let f = |x: f64| e.eval(x).unwrap();
    let p = |x: f64| 1.0 - x * x;
    let (fm, f0, fp) = (f(eta - h), f(eta), f(eta + h));
    let flux = (p(eta + 0.5 * h) * (fp - f0) - p(eta - 0.5 * h) * (f0 - fm)) / (h * h);
    let m2 = (e.m * e.m) as f64;
    -flux + m2 / p(eta) * f0 - gamma2 * p(eta) * f0 - e.g * f0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenfunctions_solve_the_equation(m in -4i64..=4, gamma in 0.0f64..10.0, n in 0i64..6, eta in -0.9f64..0.9) {
        let params = SpheroidalParams::from_gamma(m, gamma).unwrap();
        let e = eigenpair(m.abs() + n, params, &cfg()).unwrap();
        let peak = (0..=200).map(|i| e.eval(-1.0 + i as f64 / 100.0).unwrap().abs()).fold(0.0, f64::max);
        let scale = (1.0 + e.g.abs() + gamma * gamma + (m * m) as f64) * peak;
        let r = ode_residual(&e, gamma * gamma, eta);
        prop_assert!(r.abs() < 1e-5 * scale, "residual {r} at eta {eta}, scale {scale}");
    }

    #[test]
    fn parity_under_reflection(m in -4i64..=4, gamma in 0.0f64..12.0, n in 0i64..8, eta in -1.0f64..=1.0) {
        let params = SpheroidalParams::from_gamma(m, gamma).unwrap();
        let e = eigenpair(m.abs() + n, params, &cfg()).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let (a, b) = (e.eval(eta).unwrap(), e.eval(-eta).unwrap());
        prop_assert!((a - sign * b).abs() < 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn unit_norm_on_the_interval(m in -5i64..=5, gamma in 0.0f64..16.0, n in 0i64..6) {
        let params = SpheroidalParams::from_gamma(m, gamma).unwrap();
        let e = eigenpair(m.abs() + n, params, &cfg()).unwrap();
        let rule = gauss_legendre(200).unwrap();
        let norm = rule.integrate(|x| e.eval(x).unwrap().powi(2));
        prop_assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    }

    #[test]
    fn eigenvalues_increase_with_l(m in -6i64..=6, gamma in 0.0f64..20.0) {
        let params = SpheroidalParams::from_gamma(m, gamma).unwrap();
        let all = spheroidal_eigenvalues(params, m.abs() + 12, &cfg()).unwrap();
        prop_assert!(all.windows(2).all(|w| w[1].g > w[0].g));
        prop_assert!(all[0].g >= (m * m) as f64 - gamma * gamma - 1e-9);
    }
}

#[test]
fn spherical_limit_is_y42() {
    let params = SpheroidalParams::new(2, 0.0).unwrap();
    let (theta, phi) = (0.7, 0.3);
    let z = eval_z(4, params, theta, phi, &cfg()).unwrap();
    let c = theta.cos();
    let y = 3.0 / 8.0 * (5.0 / (2.0 * PI)).sqrt() * theta.sin().powi(2) * (7.0 * c * c - 1.0);
    let phase = num_complex::Complex64::from_polar(1.0, 2.0 * phi);
    let want = phase * y;
    let same = (z - want).norm() < 1e-12;
    let flipped = (z + want).norm() < 1e-12;
    assert!(same || flipped, "{z} vs {want}");
}

#[test]
fn sphere_norm_at_large_gamma() {
    let params = SpheroidalParams::from_gamma(1, 20.0).unwrap();
    let rule = gauss_legendre(120).unwrap();
    for l in [1, 4, 9] {
        let e = eigenpair(l, params, &cfg()).unwrap();
        // ∫∫ |Z|² sin θ dθ dφ with the φ integral done exactly
        let norm = rule.integrate_on(0.0, PI, |t| {
            let z = e.eval_z(t, 0.0).unwrap();
            2.0 * PI * z.norm_sqr() * t.sin()
        });
        assert!((norm - 1.0).abs() < 1e-10, "l = {l}: {norm}");
    }
}

#[test]
fn orthogonal_within_a_column() {
    let params = SpheroidalParams::from_gamma(2, 6.0).unwrap();
    let all = spheroidal_eigenvalues(params, 10, &cfg()).unwrap();
    let rule = gauss_legendre(150).unwrap();
    for a in &all {
        for b in &all {
            if a.l < b.l {
                let ip = rule.integrate(|x| a.eval(x).unwrap() * b.eval(x).unwrap());
                assert!(ip.abs() < 1e-10, "<{}, {}> = {ip}", a.l, b.l);
            }
        }
    }
}

#[test]
fn eigenvector_satisfies_recursion_matrix() {
    let params = SpheroidalParams::from_gamma(3, 9.0).unwrap();
    for e in spheroidal_eigenvalues(params, 9, &cfg()).unwrap() {
        let t = build_recursion_matrix(params, e.parity, e.coeffs.len()).unwrap();
        let tv = tridiag_apply(&t.diag, &t.offdiag, &e.coeffs);
        let lambda = e.g + params.gamma2();
        let r = tv.iter().zip(&e.coeffs).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
        assert!(r < 1e-9 * tridiag_norm(&t.diag, &t.offdiag), "l = {}: {r}", e.l);
    }
}

#[test]
fn out_of_domain_rejected() {
    let params = SpheroidalParams::from_gamma(0, 1.0).unwrap();
    assert!(matches!(eval_ps(0, params, 1.5, &cfg()), Err(SpectralError::OutOfDomain(_))));
    assert!(matches!(eval_ps(0, params, f64::NAN, &cfg()), Err(SpectralError::OutOfDomain(_))));
    assert!(matches!(eval_z(0, params, -0.1, 0.0, &cfg()), Err(SpectralError::OutOfDomain(_))));
    assert!(matches!(
        eigenpair(1, SpheroidalParams::from_gamma(2, 1.0).unwrap(), &cfg()),
        Err(SpectralError::InvalidLabel { .. })
    ));
}

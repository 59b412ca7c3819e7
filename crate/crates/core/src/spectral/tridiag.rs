//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts).

use super::SpectralError;

/// Iterations allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Ascending eigenvalues with matching unit eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    /// `vectors[j]` belongs to `values[j]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Full eigendecomposition of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal. An empty `offdiag` is read as all zeros.
pub fn eigen_tridiag(diag: &[f64], offdiag: &[f64]) -> Result<TridiagEigen, SpectralError> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagEigen {
            values: vec![],
            vectors: vec![],
        });
    }
    if !offdiag.is_empty() && offdiag.len() != n - 1 {
        return Err(SpectralError::Shape {
            diag: n,
            offdiag: offdiag.len(),
        });
    }
    if diag.iter().chain(offdiag).any(|v| !v.is_finite()) {
        return Err(SpectralError::NonFinite);
    }

    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..offdiag.len()].copy_from_slice(offdiag);
    // row-major, column j accumulates eigenvector j
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(SpectralError::IterationCap { index: l, size: n });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let row = k * n;
                        let h = z[row + i + 1];
                        z[row + i + 1] = s * z[row + i] + c * h;
                        z[row + i] = c * z[row + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|k| z[k * n + j]).collect())
        .collect();
    Ok(TridiagEigen { values, vectors })
}

/// Infinity norm of a symmetric tridiagonal matrix.
pub fn tridiag_norm(diag: &[f64], offdiag: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { offdiag.get(i - 1).copied().unwrap_or(0.0) } else { 0.0 };
            let right = offdiag.get(i).copied().unwrap_or(0.0);
            diag[i].abs() + left.abs() + right.abs()
        })
        .fold(0.0, f64::max)
}

/// `T v` for a symmetric tridiagonal `T`.
pub fn tridiag_apply(diag: &[f64], offdiag: &[f64], v: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut s = diag[i] * v[i];
            if i > 0 {
                s += offdiag.get(i - 1).copied().unwrap_or(0.0) * v[i - 1];
            }
            if i + 1 < n {
                s += offdiag.get(i).copied().unwrap_or(0.0) * v[i + 1];
            }
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Number of eigenvalues strictly below x (Sturm sequence).
    fn sturm_below(d: &[f64], e: &[f64], x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..d.len() {
            let off = if i > 0 { e[i - 1] * e[i - 1] } else { 0.0 };
            q = d[i] - x - if i > 0 { off / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (d[i].abs() + x.abs()).max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bisect(d: &[f64], e: &[f64], k: usize) -> f64 {
        let norm = tridiag_norm(d, e);
        let (mut lo, mut hi) = (-norm - 1.0, norm + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sturm_below(d, e, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn decoupled_blocks() {
        let r = eigen_tridiag(&[3.0, 5.0], &[]).unwrap();
        assert_eq!(r.values, vec![3.0, 5.0]);
        let r = eigen_tridiag(&[5.0, 3.0], &[0.0]).unwrap();
        assert_eq!(r.values, vec![3.0, 5.0]);
    }

    #[test]
    fn two_by_two() {
        let r = eigen_tridiag(&[0.0, 0.0], &[1.0]).unwrap();
        assert!((r.values[0] + 1.0).abs() < 1e-15);
        assert!((r.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shape_and_finiteness() {
        assert!(matches!(
            eigen_tridiag(&[1.0, 2.0], &[1.0, 2.0]),
            Err(SpectralError::Shape { .. })
        ));
        assert!(matches!(
            eigen_tridiag(&[1.0, f64::NAN], &[1.0]),
            Err(SpectralError::NonFinite)
        ));
    }

    #[test]
    fn random_50_against_sturm_bisection() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let d: Vec<f64> = (0..50).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let e: Vec<f64> = (0..49).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let r = eigen_tridiag(&d, &e).unwrap();
            let norm = tridiag_norm(&d, &e);
            for k in 0..50 {
                let b = bisect(&d, &e, k);
                assert!((r.values[k] - b).abs() < 1e-12 * norm.max(1.0), "k={k}");
                let tv = tridiag_apply(&d, &e, &r.vectors[k]);
                let res: f64 = tv
                    .iter()
                    .zip(&r.vectors[k])
                    .map(|(a, v)| (a - r.values[k] * v).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-11 * norm);
            }
        }
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let e: Vec<f64> = (0..29).map(|_| rng.gen_range(-1.0..1.0)).collect();
        assert_eq!(eigen_tridiag(&d, &e).unwrap(), eigen_tridiag(&d, &e).unwrap());
    }
}

//! Map to the Neumann system on `T*S²` with the Dirac bracket.
//!
//! `x̃ = P/c`, `ỹ = (P × L)/c` with `c = sqrt(2E)`, so `|x̃| = 1`, `x̃·ỹ = 0`,
//! `G = 2 G_N` and `L_z = L_N` where
//! `G_N = ½|y|² - E a² (x₁² + x₂²)` and `L_N = -x₁y₂ + x₂y₁`.

use serde::{Deserialize, Serialize};

use super::{cross, dot, poisson_matrix, ClassicalError, EuclideanState, SystemParams, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeumannState {
    pub x: Vec3,
    pub y: Vec3,
}

impl NeumannState {
    pub fn g_n(&self, params: &SystemParams) -> f64 {
        let a2 = params.a() * params.a();
        0.5 * dot(self.y, self.y) - params.energy() * a2 * (self.x[0] * self.x[0] + self.x[1] * self.x[1])
    }

    pub fn l_n(&self) -> f64 {
        -self.x[0] * self.y[1] + self.x[1] * self.y[0]
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.x[0], self.x[1], self.x[2], self.y[0], self.y[1], self.y[2]]
    }
}

pub fn neumann_map(state: &EuclideanState, params: &SystemParams) -> Result<NeumannState, ClassicalError> {
    if dot(state.p, state.p) == 0.0 {
        return Err(ClassicalError::ZeroMomentum);
    }
    let c = params.speed();
    let pl = cross(state.p, state.l);
    Ok(NeumannState {
        x: [state.p[0] / c, state.p[1] / c, state.p[2] / c],
        y: [pl[0] / c, pl[1] / c, pl[2] / c],
    })
}

/// Dirac bracket on `T*S²`, row-major in `(x, y)`:
/// `{x, y} = -I + x xᵀ/|x|²`, `{y, y} = -(x × y)^/|x|²`.
pub fn dirac_matrix(n: &NeumannState) -> [[f64; 6]; 6] {
    let x = n.x;
    let r2 = dot(x, x);
    let w = cross(x, n.y);
    let hat = [
        [0.0, -w[2], w[1]],
        [w[2], 0.0, -w[0]],
        [-w[1], w[0], 0.0],
    ];
    let mut out = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            let proj = if i == j { 1.0 } else { 0.0 } - x[i] * x[j] / r2;
            out[i][3 + j] = -proj;
            out[3 + i][j] = proj;
            out[3 + i][3 + j] = -hat[i][j] / r2;
        }
    }
    out
}

/// Largest entry of `J B Jᵀ - B_D`, where `J` is the Jacobian of the map
/// (fourth-order central differences) and `B`, `B_D` the two Poisson tensors.
pub fn dirac_bracket_residual(state: &EuclideanState, params: &SystemParams) -> Result<f64, ClassicalError> {
    let image = neumann_map(state, params)?;
    let z0 = state.to_array();
    let h = 1e-3 * z0.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let eval = |z: [f64; 6]| neumann_map(&EuclideanState::from_array(z), params).map(|n| n.to_array());
    let mut jac = [[0.0; 6]; 6];
    for j in 0..6 {
        let at = |k: f64| {
            let mut z = z0;
            z[j] += k * h;
            eval(z)
        };
        let (p1, m1, p2, m2) = (at(1.0)?, at(-1.0)?, at(2.0)?, at(-2.0)?);
        for i in 0..6 {
            jac[i][j] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h);
        }
    }
    let b = poisson_matrix(state);
    let bd = dirac_matrix(&image);
    let mut worst = 0.0f64;
    for i in 0..6 {
        for k in 0..6 {
            let mut v = 0.0;
            for a in 0..6 {
                for c in 0..6 {
                    v += jac[i][a] * b[a][c] * jac[k][c];
                }
            }
            worst = worst.max((v - bd[i][k]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_momentum_rejected() {
        let pr = SystemParams::new(1.0, 1.0).unwrap();
        let s = EuclideanState::new([0.0; 3], [1.0, 0.0, 0.0]);
        assert_eq!(neumann_map(&s, &pr), Err(ClassicalError::ZeroMomentum));
    }

    #[test]
    fn dirac_matrix_is_antisymmetric() {
        let n = NeumannState { x: [0.6, 0.0, 0.8], y: [0.1, 0.7, -0.3] };
        let d = dirac_matrix(&n);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(d[i][j], -d[j][i]);
            }
        }
    }
}

//! Self-checks run by `validate`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{g_large_gamma, g_small_gamma};
use crate::classical::neumann::dirac_bracket_residual;
use crate::classical::{
    bracket, gradient, random_orbit_state, reduce, reduced_brackets_check, Hamiltonian, SystemParams,
};
use crate::oracle::{fd_eigenvalues, OracleConfig};
use crate::spectral::{spheroidal_eigenvalues, SpectralConfig, SpectralError, SpheroidalParams};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        Self {
            suite: suite.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

fn g_of(l: i64, m: i64, gamma: f64, cfg: &SpectralConfig) -> Result<f64, SpectralError> {
    let params = SpheroidalParams::from_gamma(m, gamma)?;
    let all = spheroidal_eigenvalues(params, l, cfg)?;
    Ok(all.last().expect("l >= |m|").g)
}

/// Spectral eigenvalues against the finite-difference oracle: for each
/// `(γ, m)` the worst `|Δg| / error estimate` over the lowest ten states.
pub fn oracle_suite(cfg: &SpectralConfig) -> Result<SuiteReport, String> {
    let ocfg = OracleConfig { n: 400, richardson_levels: 1 };
    let mut checks = Vec::new();
    for gamma in [1.0, 4.0, 16.0] {
        for m in 0..=3i64 {
            let params = SpheroidalParams::from_gamma(m, gamma).map_err(|e| e.to_string())?;
            let spec = spheroidal_eigenvalues(params, m + 9, cfg).map_err(|e| e.to_string())?;
            let fd = fd_eigenvalues(params, 10, &ocfg).map_err(|e| e.to_string())?;
            let worst = spec
                .iter()
                .zip(&fd)
                .map(|(s, o)| (s.g - o.g).abs() / o.error_estimate)
                .fold(0.0f64, f64::max);
            checks.push(Check::at_most(format!("gamma={gamma} m={m} max |dg|/estimate"), worst, 3.0));
        }
    }
    Ok(SuiteReport::new("oracle", checks))
}

/// Least-squares slope of `y` against `x` with its standard error.
pub fn fit_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - icept - slope * a).powi(2)).sum();
    let se = if x.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (slope, se)
}

/// Decay of the small-`γ` residual in `l` and of the large-`γ` residual in `γ`.
pub fn asymptotics_suite(cfg: &SpectralConfig) -> Result<SuiteReport, String> {
    let mut checks = Vec::new();
    let gamma = 0.5;
    for m in [0i64, 1] {
        let params = SpheroidalParams::from_gamma(m, gamma).map_err(|e| e.to_string())?;
        let spec = spheroidal_eigenvalues(params, 30, cfg).map_err(|e| e.to_string())?;
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for e in spec.iter().filter(|e| e.l >= 10) {
            let r = (e.g - g_small_gamma(e.l, m, gamma * gamma)).abs();
            x.push((e.l as f64).ln());
            y.push(r.ln());
        }
        let (slope, se) = fit_slope(&x, &y);
        checks.push(Check::at_most(
            format!("small gamma m={m}: |slope + 2| (slope {slope:.4} +- {se:.4})"),
            (slope + 2.0).abs(),
            0.3,
        ));
    }
    for am in 0..=2i64 {
        for n in 0..=3i64 {
            let l = am + n;
            let r16 = (g_of(l, am, 16.0, cfg).map_err(|e| e.to_string())? - g_large_gamma(l, am, 16.0)).abs();
            let r32 = (g_of(l, am, 32.0, cfg).map_err(|e| e.to_string())? - g_large_gamma(l, am, 32.0)).abs();
            checks.push(Check::at_most(
                format!("large gamma l={l} |m|={am}: residual ratio 32/16"),
                r32 / r16,
                0.65,
            ));
        }
    }
    Ok(SuiteReport::new("asymptotics", checks))
}

/// Bracket identities at random points of the orbit.
pub fn brackets_suite(samples: usize, seed: u64) -> Result<SuiteReport, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut commute, mut reduced, mut syzygy, mut dirac) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..samples {
        let energy = 0.1 + 2.9 * (k as f64 + 0.5) / samples as f64;
        let a = 3.0 * ((k * 7919) % samples) as f64 / samples as f64;
        let params = SystemParams::new(energy, a).map_err(|e| e.to_string())?;
        let s = random_orbit_state(&mut rng, &params, 2.0);
        let scale = (1.0 + params.gamma2()) * (1.0 + s.l.iter().map(|v| v * v).sum::<f64>());
        let gg = gradient(Hamiltonian::G, &s, &params);
        let gl = gradient(Hamiltonian::Lz, &s, &params);
        commute = commute.max(bracket(&s, &gg, &gl).abs() / scale);
        let r = reduced_brackets_check(&s, &params).map_err(|e| e.to_string())?;
        reduced = reduced.max(r.max_abs() / scale);
        let b = reduce(&s, &params).map_err(|e| e.to_string())?;
        syzygy = syzygy.max(b.syzygy().abs() / scale);
        dirac = dirac.max(dirac_bracket_residual(&s, &params).map_err(|e| e.to_string())? / scale);
    }
    Ok(SuiteReport::new(
        "brackets",
        vec![
            Check::at_most("{G, Lz}", commute, 1e-12),
            Check::at_most("reduced bracket relations", reduced, 1e-12),
            Check::at_most("syzygy", syzygy, 1e-12),
            // the Jacobian comes from finite differences
            Check::at_most("Neumann map bracket", dirac, 1e-8),
        ],
    ))
}

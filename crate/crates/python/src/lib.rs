//! Python bindings: spectral solver, joint spectrum and monodromy, asymptotics,
//! the finite-difference oracle and the classical system.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use spheroidal::asymptotics;
use spheroidal::classical::{self as cl, EuclideanState, Hamiltonian};
use spheroidal::lattice::{self, Orientation, SymmetrySelector};
use spheroidal::oracle::{self, OracleConfig};
use spheroidal::spectral::{self, Parity, SpectralConfig, SpheroidalParams};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn params(m: i64, gamma: f64) -> PyResult<SpheroidalParams> {
    SpheroidalParams::from_gamma(m, gamma).map_err(value_error)
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

/// One labelled eigenpair of the angular equation.
#[pyclass(frozen, name = "Eigenpair")]
struct PyEigenpair(spectral::EigenResult);

#[pymethods]
impl PyEigenpair {
    #[getter]
    fn m(&self) -> i64 {
        self.0.m
    }

    #[getter]
    fn l(&self) -> i64 {
        self.0.l
    }

    #[getter]
    fn g(&self) -> f64 {
        self.0.g
    }

    #[getter]
    fn parity(&self) -> &'static str {
        parity_name(self.0.parity)
    }

    /// Coefficients in the unit-norm Legendre basis.
    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.0.coeffs.clone()
    }

    fn eval(&self, eta: f64) -> PyResult<f64> {
        self.0.eval(eta).map_err(value_error)
    }

    fn eval_z(&self, theta: f64, phi: f64) -> PyResult<Complex64> {
        self.0.eval_z(theta, phi).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("Eigenpair(m={}, l={}, g={})", self.0.m, self.0.l, self.0.g)
    }
}

/// `g_l^m` for `l = |m|, …, l_max`.
#[pyfunction]
fn eigenvalues(m: i64, gamma: f64, l_max: i64) -> PyResult<Vec<f64>> {
    let all = spectral::spheroidal_eigenvalues(params(m, gamma)?, l_max, &SpectralConfig::default())
        .map_err(value_error)?;
    Ok(all.into_iter().map(|e| e.g).collect())
}

#[pyfunction]
fn eigenpair(l: i64, m: i64, gamma: f64) -> PyResult<PyEigenpair> {
    spectral::eigenpair(l, params(m, gamma)?, &SpectralConfig::default())
        .map(PyEigenpair)
        .map_err(value_error)
}

#[pyfunction]
fn eval_ps(l: i64, m: i64, gamma: f64, eta: f64) -> PyResult<f64> {
    spectral::eval_ps(l, params(m, gamma)?, eta, &SpectralConfig::default()).map_err(value_error)
}

/// Finite-difference eigenvalues with error estimates, `[(g, err), …]`.
#[pyfunction]
#[pyo3(signature = (m, gamma, count, n = 400, levels = 1))]
fn oracle_eigenvalues(m: i64, gamma: f64, count: usize, n: usize, levels: usize) -> PyResult<Vec<(f64, f64)>> {
    let cfg = OracleConfig { n, richardson_levels: levels };
    let out = oracle::fd_eigenvalues(params(m, gamma)?, count, &cfg).map_err(value_error)?;
    Ok(out.into_iter().map(|o| (o.g, o.error_estimate)).collect())
}

#[pyfunction]
fn g_small_gamma(l: i64, m: i64, gamma: f64) -> f64 {
    asymptotics::g_small_gamma(l, m, gamma * gamma)
}

#[pyfunction]
fn g_large_gamma(l: i64, m: i64, gamma: f64) -> f64 {
    asymptotics::g_large_gamma(l, m, gamma)
}

fn selector(name: &str) -> PyResult<SymmetrySelector> {
    let parity = |lm, m| SymmetrySelector::Parity { lm, m };
    Ok(match name {
        "all" => SymmetrySelector::All,
        "s2even" => SymmetrySelector::S2Even,
        "s2odd" => SymmetrySelector::S2Odd,
        "parity-ee" => parity(Parity::Even, Parity::Even),
        "parity-eo" => parity(Parity::Even, Parity::Odd),
        "parity-oe" => parity(Parity::Odd, Parity::Even),
        "parity-oo" => parity(Parity::Odd, Parity::Odd),
        other => return Err(PyValueError::new_err(format!("unknown symmetry class {other:?}"))),
    })
}

/// Result of transporting a unit cell around a closed loop.
#[pyclass(frozen, name = "Monodromy")]
struct PyMonodromy {
    #[pyo3(get)]
    matrix: [[i64; 2]; 2],
    #[pyo3(get)]
    index: i64,
    #[pyo3(get)]
    l_star: Option<i64>,
    /// `[(m, g), …]`
    #[pyo3(get)]
    anchors: Vec<(i64, f64)>,
}

#[pymethods]
impl PyMonodromy {
    fn __repr__(&self) -> String {
        format!("Monodromy(matrix={:?}, index={})", self.matrix, self.index)
    }
}

/// All `(m, l, g)` with `|m| <= m_max`, `|m| <= l <= l_max` at fixed `γ`.
#[pyclass(frozen, name = "JointSpectrum")]
struct PyJointSpectrum(lattice::JointSpectrum);

#[pymethods]
impl PyJointSpectrum {
    #[new]
    fn new(gamma: f64, m_max: i64, l_max: i64) -> PyResult<Self> {
        lattice::build_joint_spectrum(gamma, m_max, l_max, &SpectralConfig::default())
            .map(Self)
            .map_err(value_error)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    /// `[(m, l, g), …]` sorted by `(m, l)`.
    fn points(&self) -> Vec<(i64, i64, f64)> {
        self.0.points.iter().map(|p| (p.m, p.l, p.g)).collect()
    }

    fn get(&self, m: i64, l: i64) -> Option<f64> {
        self.0.get(m, l)
    }

    fn count_negative(&self) -> PyResult<usize> {
        lattice::count_negative(&self.0).map_err(value_error)
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Monodromy along the standard loop around the origin.
    #[pyo3(signature = (symmetry = "all", clockwise = false))]
    fn monodromy(&self, symmetry: &str, clockwise: bool) -> PyResult<PyMonodromy> {
        let orientation = if clockwise { Orientation::Clockwise } else { Orientation::Counterclockwise };
        let (r, anchors, l_star) = lattice::monodromy(&self.0, selector(symmetry)?, orientation).map_err(value_error)?;
        Ok(PyMonodromy {
            matrix: r.matrix,
            index: r.index,
            l_star: Some(l_star),
            anchors: anchors.iter().map(|a| (a.m, a.g)).collect(),
        })
    }

    /// Monodromy along the counterclockwise rectangle with the given corners.
    #[pyo3(signature = (m_left, m_right, g_bottom, g_top, symmetry = "all"))]
    fn rectangle_monodromy(
        &self,
        m_left: i64,
        m_right: i64,
        g_bottom: f64,
        g_top: f64,
        symmetry: &str,
    ) -> PyResult<PyMonodromy> {
        let sel = selector(symmetry)?;
        let anchors = lattice::rectangle_loop(m_left, m_right, g_bottom, g_top, sel.column_step());
        let r = lattice::monodromy_on_loop(&self.0, sel, &anchors).map_err(value_error)?;
        Ok(PyMonodromy {
            matrix: r.matrix,
            index: r.index,
            l_star: None,
            anchors: anchors.iter().map(|a| (a.m, a.g)).collect(),
        })
    }
}

/// Energy `E` and focal parameter `a` of the classical system.
#[pyclass(frozen, from_py_object, name = "SystemParams")]
#[derive(Clone, Copy)]
struct PySystemParams(cl::SystemParams);

#[pymethods]
impl PySystemParams {
    #[new]
    fn new(energy: f64, a: f64) -> PyResult<Self> {
        cl::SystemParams::new(energy, a).map(Self).map_err(value_error)
    }

    /// `E = 1/2`, `a = γ`.
    #[staticmethod]
    fn unit_speed(gamma: f64) -> PyResult<Self> {
        cl::SystemParams::unit_speed(gamma).map(Self).map_err(value_error)
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.0.energy()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    fn __repr__(&self) -> String {
        format!("SystemParams(energy={}, a={})", self.0.energy(), self.0.a())
    }
}

type Vec3 = [f64; 3];

fn flow_kind(name: &str) -> PyResult<Hamiltonian> {
    match name {
        "g" => Ok(Hamiltonian::G),
        "lz" => Ok(Hamiltonian::Lz),
        other => Err(PyValueError::new_err(format!("unknown flow {other:?}; use 'g' or 'lz'"))),
    }
}

/// `(C1, C2, G, Lz)` at `(P, L)`.
#[pyfunction]
fn integrals(p: Vec3, l: Vec3, params: PySystemParams) -> (f64, f64, f64, f64) {
    let s = EuclideanState::new(p, l);
    let (c1, c2) = cl::casimirs(&s);
    (c1, c2, cl::g_value(&s, &params.0), cl::lz_value(&s))
}

/// Reduced invariants `(b1, b2, b3, m)`.
#[pyfunction]
fn reduce(p: Vec3, l: Vec3, params: PySystemParams) -> PyResult<(f64, f64, f64, f64)> {
    let b = cl::reduce(&EuclideanState::new(p, l), &params.0).map_err(value_error)?;
    Ok((b.b1, b.b2, b.b3, b.m))
}

/// Point `(P, L)` with the given invariants and azimuth `u` of `P`.
#[pyfunction]
fn reconstruct(b: (f64, f64, f64, f64), params: PySystemParams, u: f64) -> PyResult<(Vec3, Vec3)> {
    let r = cl::ReducedState { b1: b.0, b2: b.1, b3: b.2, m: b.3 };
    let s = cl::reconstruct(&r, &params.0, u).map_err(value_error)?;
    Ok((s.p, s.l))
}

/// RK4 trajectory as rows `[t, px, py, pz, lx, ly, lz, C1, C2, G, Lz]`.
#[pyfunction]
#[pyo3(signature = (p, l, params, flow = "g", t_end = 1.0, dt = 1e-3, record_every = 1, drift_bound = 1e-6))]
#[allow(clippy::too_many_arguments)]
fn integrate_flow(
    p: Vec3,
    l: Vec3,
    params: PySystemParams,
    flow: &str,
    t_end: f64,
    dt: f64,
    record_every: usize,
    drift_bound: f64,
) -> PyResult<Vec<[f64; 11]>> {
    let cfg = cl::FlowConfig { dt, t_end, record_every, drift_bound };
    let tr = cl::integrate_flow(&EuclideanState::new(p, l), flow_kind(flow)?, &params.0, &cfg).map_err(value_error)?;
    Ok(tr
        .samples
        .iter()
        .map(|x| {
            let z = x.state.to_array();
            [x.t, z[0], z[1], z[2], z[3], z[4], z[5], x.c1, x.c2, x.g, x.lz]
        })
        .collect())
}

#[pyfunction]
fn action(m: f64, g: f64, params: PySystemParams) -> PyResult<f64> {
    cl::action_i(m, g, &params.0).map_err(value_error)
}

/// `(kind, beta, eigenvalues)` of a relative equilibrium.
#[pyfunction]
#[pyo3(signature = (p, l, params, beta = None))]
fn classify(
    p: Vec3,
    l: Vec3,
    params: PySystemParams,
    beta: Option<f64>,
) -> PyResult<(String, Option<f64>, Vec<Complex64>)> {
    let c = cl::classify_critical_point(&EuclideanState::new(p, l), beta, &params.0).map_err(value_error)?;
    let kind = match c.kind {
        cl::CriticalKind::FocusFocus => "focus-focus",
        cl::CriticalKind::EllipticTransversal => "elliptic-transversal",
        cl::CriticalKind::Other => "other",
        cl::CriticalKind::Regular => "regular",
    };
    Ok((kind.into(), c.beta, c.eigenvalues))
}

/// Point `(P, L)` on the singular fibre over the origin.
#[pyfunction]
fn pinched_torus(pz: f64, phi: f64, sign: f64, params: PySystemParams) -> PyResult<(Vec3, Vec3)> {
    let s = cl::pinched_torus(pz, phi, sign, &params.0).map_err(value_error)?;
    Ok((s.p, s.l))
}

#[pymodule]
fn pyspheroidal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEigenpair>()?;
    m.add_class::<PyJointSpectrum>()?;
    m.add_class::<PyMonodromy>()?;
    m.add_class::<PySystemParams>()?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(eigenpair, m)?)?;
    m.add_function(wrap_pyfunction!(eval_ps, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(g_small_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(g_large_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(integrals, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_flow, m)?)?;
    m.add_function(wrap_pyfunction!(action, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(pinched_torus, m)?)?;
    Ok(())
}

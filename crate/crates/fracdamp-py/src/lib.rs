//! Python bindings: `import fracdamp`.

use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use fracdamp::acceptance::{self, Suite};
use fracdamp::analytic::residue_coefficients;
use fracdamp::freqanalysis;
use fracdamp::oracle::{self, StepperConfig};
use fracdamp::{model, DecayQuadratureConfig, Error};

create_exception!(fracdamp, NumericalError, PyArithmeticError, "The solver failed to converge.");

fn to_py(e: Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        NumericalError::new_err(e.to_string())
    }
}

fn quad_config(rel_tol: Option<f64>) -> PyResult<DecayQuadratureConfig> {
    let cfg = DecayQuadratureConfig::default();
    match rel_tol {
        Some(tol) => cfg.with_rel_tol(tol).map_err(to_py),
        None => Ok(cfg),
    }
}

#[pyclass(name = "OscillatorParams", module = "fracdamp", frozen)]
struct PyParams(model::OscillatorParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (lam, omega, nu, x0 = 1.0, x1 = 0.0))]
    fn new(lam: f64, omega: f64, nu: f64, x0: f64, x1: f64) -> PyResult<Self> {
        model::OscillatorParams::new(lam, omega, nu, x0, x1).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_key_value(text: &str) -> PyResult<Self> {
        model::OscillatorParams::from_key_value(text).map(Self).map_err(to_py)
    }

    fn to_key_value(&self) -> String {
        self.0.to_key_value()
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda()
    }
    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega()
    }
    #[getter]
    fn nu(&self) -> f64 {
        self.0.nu()
    }
    #[getter]
    fn x0(&self) -> f64 {
        self.0.x0()
    }
    #[getter]
    fn x1(&self) -> f64 {
        self.0.x1()
    }

    fn __repr__(&self) -> String {
        format!("OscillatorParams({})", self.0)
    }
}

#[pyclass(name = "Pole", module = "fracdamp", frozen, get_all)]
struct PyPole {
    r: f64,
    theta: f64,
    beta: f64,
    sigma: f64,
    residual: f64,
}

#[pymethods]
impl PyPole {
    fn __repr__(&self) -> String {
        format!(
            "Pole(r={}, theta={}, beta={}, sigma={})",
            self.r, self.theta, self.beta, self.sigma
        )
    }
}

fn wrap_pole(pole: model::Pole, p: &model::OscillatorParams) -> PyPole {
    PyPole {
        r: pole.r,
        theta: pole.theta,
        beta: pole.beta,
        sigma: pole.sigma,
        residual: pole.residual(p.lambda(), p.omega(), p.nu()),
    }
}

/// Closed-form solution for one parameter set.
#[pyclass(name = "Solution", module = "fracdamp", frozen)]
struct PySolution(fracdamp::Solution);

#[pymethods]
impl PySolution {
    #[new]
    #[pyo3(signature = (params, rel_tol = None))]
    fn new(params: PyRef<'_, PyParams>, rel_tol: Option<f64>) -> PyResult<Self> {
        fracdamp::Solution::new(params.0, quad_config(rel_tol)?)
            .map(Self)
            .map_err(to_py)
    }

    fn pole(&self) -> Option<PyPole> {
        self.0.pole().map(|p| wrap_pole(p, self.0.params()))
    }

    /// `(A, B, beta, sigma)`, or None for over- and critically-damped nu = 1.
    fn coefficients(&self) -> Option<(f64, f64, f64, f64)> {
        self.0.coefficients()
    }

    fn oscillatory(&self, t: f64) -> PyResult<f64> {
        self.0.oscillatory(t).map_err(to_py)
    }

    fn decay(&self, t: f64) -> PyResult<f64> {
        self.0.decay(t).map_err(to_py)
    }

    fn __call__(&self, t: f64) -> PyResult<f64> {
        self.0.evaluate(t).map_err(to_py)
    }

    fn evaluate(&self, py: Python<'_>, times: Vec<f64>) -> PyResult<Vec<f64>> {
        py.detach(|| times.iter().map(|&t| self.0.evaluate(t)).collect::<Result<_, _>>())
            .map_err(to_py)
    }
}

#[pyfunction]
fn find_pole(params: PyRef<'_, PyParams>) -> PyResult<PyPole> {
    fracdamp::find_pole(&params.0)
        .map(|p| wrap_pole(p, &params.0))
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (t, params, rel_tol = None))]
fn evaluate(t: f64, params: PyRef<'_, PyParams>, rel_tol: Option<f64>) -> PyResult<f64> {
    fracdamp::evaluate(t, &params.0, &quad_config(rel_tol)?).map_err(to_py)
}

/// Real-form residue coefficients `(A, B)` for `0 < nu < 1`.
#[pyfunction(name = "residue_coefficients")]
fn py_residue_coefficients(params: PyRef<'_, PyParams>) -> PyResult<(f64, f64)> {
    let pole = fracdamp::find_pole(&params.0).map_err(to_py)?;
    residue_coefficients(&params.0, &pole).map_err(to_py)
}

/// Rows `(nu, sigma, beta, r, theta)`, with nu = 0 and nu = 1 added.
#[pyfunction]
fn sigma_sweep(
    py: Python<'_>,
    lam: f64,
    omega: f64,
    nus: Vec<f64>,
) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
    let rows = py
        .detach(|| freqanalysis::sigma_sweep(lam, omega, &nus))
        .map_err(to_py)?;
    Ok(rows.iter().map(|r| (r.nu, r.sigma, r.beta, r.r, r.theta)).collect())
}

/// `(initial_slope, terminal)` class names.
#[pyfunction]
fn classify(lam: f64, omega: f64) -> PyResult<(String, String)> {
    model::OscillatorParams::new(lam, omega, 0.5, 1.0, 0.0).map_err(to_py)?;
    let c = freqanalysis::classify(lam, omega);
    Ok((c.initial_slope.to_string(), c.terminal.to_string()))
}

/// d(sigma)/d(nu) at nu = 0.
#[pyfunction]
fn initial_slope(lam: f64, omega: f64) -> PyResult<f64> {
    model::OscillatorParams::new(lam, omega, 0.5, 1.0, 0.0).map_err(to_py)?;
    Ok(freqanalysis::initial_slope(lam, omega))
}

#[pyfunction]
fn presets() -> Vec<(&'static str, f64, f64)> {
    freqanalysis::presets()
        .iter()
        .map(|p| (p.name, p.lambda, p.omega))
        .collect()
}

/// L1 time stepping; returns `(t, x)` lists.
#[pyfunction]
fn oracle_integrate(
    py: Python<'_>,
    params: PyRef<'_, PyParams>,
    h: f64,
    t_max: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let p = params.0;
    let traj = py
        .detach(|| oracle::integrate(&p, &StepperConfig::new(h, t_max)?))
        .map_err(to_py)?;
    Ok(traj.samples().iter().map(|s| (s.t, s.x)).unzip())
}

/// Runs the acceptance criteria: `(id, title, measured, threshold, passed, detail)`.
#[pyfunction]
#[pyo3(signature = (full = false))]
fn run_acceptance(py: Python<'_>, full: bool) -> Vec<(u8, &'static str, f64, f64, bool, String)> {
    let suite = if full { Suite::Full } else { Suite::Quick };
    py.detach(|| acceptance::run(suite))
        .into_iter()
        .map(|r| (r.id, r.title, r.measured, r.threshold, r.passed, r.detail))
        .collect()
}

#[pymodule]
#[pyo3(name = "fracdamp")]
fn fracdamp_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", fracdamp::VERSION)?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyPole>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(find_pole, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(py_residue_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(initial_slope, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_integrate, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    Ok(())
}

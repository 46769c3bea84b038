use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pssmp::classify as cls;
use pssmp::cli::PhiSpec;
use pssmp::phi::Phi;
use pssmp::simulate::{simulate_endpoints, SimConfig};

fn err(e: pssmp::Error) -> PyErr {
    match e.exit_code() {
        3 => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn params(alpha: f64, rho: f64) -> PyResult<pssmp::StableParams> {
    pssmp::StableParams::new(alpha, rho).map_err(err)
}

fn resolve(phi: &str, alpha: f64, rho: f64) -> PyResult<Phi> {
    PhiSpec(phi.to_string()).resolve(alpha, rho).map_err(err)
}

/// Strictly α-stable process with positivity parameter ρ.
#[pyclass(name = "StableParams", frozen)]
struct PyStableParams {
    inner: pssmp::StableParams,
}

#[pymethods]
impl PyStableParams {
    #[new]
    fn new(alpha: f64, rho: f64) -> PyResult<Self> {
        Ok(PyStableParams { inner: params(alpha, rho)? })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn rho_hat(&self) -> f64 {
        self.inner.rho_hat
    }

    #[getter]
    fn c_plus(&self) -> f64 {
        self.inner.c_plus
    }

    #[getter]
    fn c_minus(&self) -> f64 {
        self.inner.c_minus
    }

    fn killing_rate(&self) -> f64 {
        self.inner.killing_rate()
    }

    /// Lévy density of the Lamperti exponent ξ* at y.
    fn mu_density(&self, y: f64) -> PyResult<f64> {
        self.inner.mu_density(y).map_err(err)
    }

    fn psi_star(&self, theta: f64) -> Complex64 {
        self.inner.psi_star(theta)
    }

    fn __repr__(&self) -> String {
        format!("StableParams(alpha={}, rho={})", self.inner.alpha, self.inner.rho)
    }
}

/// Resurrection kernel q(x, y) for a φ descriptor such as "poly:beta=1,gamma=1+alpha".
#[pyclass(name = "Kernel", frozen)]
struct PyKernel {
    inner: pssmp::ResurrectionKernel,
}

#[pymethods]
impl PyKernel {
    #[new]
    fn new(alpha: f64, rho: f64, phi: &str) -> PyResult<Self> {
        let p = params(alpha, rho)?;
        Ok(PyKernel { inner: pssmp::ResurrectionKernel::new(p, resolve(phi, alpha, rho)?) })
    }

    fn q(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.q_density(x, y).map_err(err)
    }

    fn q_mass(&self, x: f64) -> PyResult<f64> {
        self.inner.q_mass(x).map_err(err)
    }

    fn j(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.j_density(x, y).map_err(err)
    }

    #[pyo3(name = "J")]
    fn big_j(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.J_density(x, y).map_err(err)
    }

    fn boundary_factor(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.boundary_factor(x, y).map_err(err)
    }

    fn pi(&self, y: f64) -> PyResult<f64> {
        self.inner.pi_density(y).map_err(err)
    }

    fn pi_hat(&self, theta: f64) -> PyResult<Complex64> {
        self.inner.pi_hat(theta).map_err(err)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner.params;
        format!("Kernel(alpha={}, rho={}, phi='{}')", p.alpha, p.rho, self.inner.phi)
    }
}

/// Classification report as a dict.
#[pyfunction]
fn classify<'py>(py: Python<'py>, alpha: f64, rho: f64, phi: &str) -> PyResult<Bound<'py, PyDict>> {
    let p = params(alpha, rho)?;
    let r = cls::classify(&p, &resolve(phi, alpha, rho)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("alpha", r.alpha)?;
    d.set_item("rho", r.rho)?;
    d.set_item("phi", r.phi)?;
    d.set_item("mean_xi1", r.mean_xi1)?;
    d.set_item("verdict", serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(String::from)))?;
    d.set_item("absorption_time_infinite", r.absorption_time_infinite)?;
    d.set_item("l_phi", r.l_phi)?;
    d.set_item("a_phi", r.a_phi)?;
    d.set_item("a_phi_plus_log_convention", r.a_phi_plus_log_convention)?;
    d.set_item("rho_critical", r.rho_critical)?;
    d.set_item("kappa_star", r.kappa_star)?;
    Ok(d)
}

#[pyfunction]
fn mean_xi1(alpha: f64, rho: f64, phi: &str) -> PyResult<f64> {
    let p = params(alpha, rho)?;
    cls::mean_xi1(&p, &resolve(phi, alpha, rho)?).map_err(err)
}

/// Characteristic exponent Ψ̄(θ) of the resurrected process.
#[pyfunction]
fn overline_psi(alpha: f64, rho: f64, phi: &str, theta: f64) -> PyResult<Complex64> {
    let p = params(alpha, rho)?;
    cls::overline_psi(&p, &resolve(phi, alpha, rho)?, theta).map_err(err)
}

#[pyfunction]
fn censored_mean(alpha: f64, rho: f64) -> PyResult<f64> {
    Ok(cls::censored_mean(&params(alpha, rho)?))
}

/// (alpha_lower, alpha_upper, rho_star) for "resurrected" or "censored".
#[pyfunction]
fn critical_alphas(family: &str) -> PyResult<(Option<f64>, f64, f64)> {
    let c = match family {
        "resurrected" => cls::critical_alphas(cls::l_resurrected),
        "censored" => cls::critical_alphas(cls::l_censored),
        other => return Err(PyValueError::new_err(format!("unknown family '{other}'"))),
    }
    .map_err(err)?;
    Ok((c.alpha_lower, c.alpha_upper, c.rho_star))
}

#[pyfunction]
fn critical_rho(alpha: f64, phi: &str) -> Option<f64> {
    let spec = PhiSpec(phi.to_string());
    cls::critical_rho(alpha, |a, r| spec.resolve(a, r))
}

#[pyfunction]
fn recurrent_extension_kappa(alpha: f64, rho: f64, phi: &str) -> PyResult<f64> {
    let p = params(alpha, rho)?;
    cls::recurrent_extension_kappa(&p, &resolve(phi, alpha, rho)?).map_err(err)
}

/// ξ̄ at the horizon and the number of resurrections, one entry per path.
#[pyfunction]
#[pyo3(signature = (alpha, rho, phi, n_paths=1000, horizon=1.0, epsilon=1e-3, seed=0))]
fn simulate_endpoints_py(
    py: Python<'_>,
    alpha: f64,
    rho: f64,
    phi: &str,
    n_paths: usize,
    horizon: f64,
    epsilon: f64,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<u64>)> {
    let p = params(alpha, rho)?;
    let phi = resolve(phi, alpha, rho)?;
    let cfg = SimConfig { epsilon, horizon, seed, n_paths, ..SimConfig::default() };
    cfg.validate().map_err(err)?;
    let ends = py.allow_threads(|| simulate_endpoints(&p, &phi, &cfg)).map_err(err)?;
    Ok(ends.into_iter().unzip())
}

#[pymodule]
fn pssmp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStableParams>()?;
    m.add_class::<PyKernel>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(mean_xi1, m)?)?;
    m.add_function(wrap_pyfunction!(overline_psi, m)?)?;
    m.add_function(wrap_pyfunction!(censored_mean, m)?)?;
    m.add_function(wrap_pyfunction!(critical_alphas, m)?)?;
    m.add_function(wrap_pyfunction!(critical_rho, m)?)?;
    m.add_function(wrap_pyfunction!(recurrent_extension_kappa, m)?)?;
    m.add("simulate_endpoints", wrap_pyfunction!(simulate_endpoints_py, m)?)?;
    Ok(())
}

//! Python bindings for `glnmom`.
//!
//! Domain and precondition errors raise `ValueError`; numerical
//! non-convergence raises `ArithmeticError`. Structured results (verdicts,
//! Krein integrals, certificates) are returned as plain dicts.

use glnmom::determinacy::{classify as classify_params, classify_limit as classify_prize, krein_integral};
use glnmom::distributions::{
    ged_cdf, ged_pdf, gln_cdf, gln_log_pdf, gln_pdf, gln_quantile, power_transform, prize_cdf, prize_moment as prize_moment_of,
    prize_pdf, PrizeCompetitionParams,
};
use glnmom::moments::{moment, moment_exists, MethodChoice, MomentMethod};
use glnmom::sampling::{sample_gln_inverse, sample_gln_parallel, RngStream};
use glnmom::stieltjes::{self, member_pdf, sup_abs_h, verify_moment_equivalence};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: glnmom::Error) -> PyErr {
    match e {
        glnmom::Error::NonConvergence(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Generalized lognormal law of `exp(Y)`, `Y` with density
/// `C exp(-|y - mu|^r / (r sigma^r))`. `r = 2` is the lognormal.
#[pyclass(name = "GlnParams", frozen, module = "glnmom_py")]
struct PyGlnParams(glnmom::distributions::GlnParams);

#[pymethods]
impl PyGlnParams {
    #[new]
    #[pyo3(signature = (mu = 0.0, sigma = 1.0, r = 2.0))]
    fn new(mu: f64, sigma: f64, r: f64) -> PyResult<Self> {
        glnmom::distributions::GlnParams::new(mu, sigma, r).map(Self).map_err(err)
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.0.sigma()
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }

    fn __repr__(&self) -> String {
        format!("GlnParams(mu={}, sigma={}, r={})", self.0.mu(), self.0.sigma(), self.0.r())
    }

    fn pdf(&self, x: f64) -> PyResult<f64> {
        gln_pdf(&self.0, x).map_err(err)
    }

    fn log_pdf(&self, x: f64) -> PyResult<f64> {
        gln_log_pdf(&self.0, x).map_err(err)
    }

    fn cdf(&self, x: f64) -> PyResult<f64> {
        gln_cdf(&self.0, x).map_err(err)
    }

    fn quantile(&self, q: f64) -> PyResult<f64> {
        gln_quantile(&self.0, q).map_err(err)
    }

    /// Density of `ln X` at `y`.
    fn log_variable_pdf(&self, y: f64) -> PyResult<f64> {
        ged_pdf(&self.0.ged(), y).map_err(err)
    }

    fn log_variable_cdf(&self, y: f64) -> PyResult<f64> {
        ged_cdf(&self.0.ged(), y).map_err(err)
    }

    /// Parameters of `X**power`.
    fn power(&self, power: f64) -> PyResult<Self> {
        power_transform(&self.0, power).map(Self).map_err(err)
    }

    fn moment_exists(&self, k: f64) -> PyResult<bool> {
        moment_exists(&self.0, k).map(|v| v.exists).map_err(err)
    }

    /// `E[X**k]` and the method used ("series" or "quadrature").
    /// `method` is "auto", "series" or "quadrature".
    #[pyo3(signature = (k, method = "auto"))]
    fn moment(&self, k: f64, method: &str) -> PyResult<(f64, &'static str)> {
        let choice = match method {
            "auto" => MethodChoice::Auto,
            "series" => MethodChoice::Series,
            "quadrature" => MethodChoice::Quadrature,
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        };
        let v = moment(&self.0, k, choice).map_err(err)?;
        let used = match v.method {
            MomentMethod::Series => "series",
            MomentMethod::Quadrature => "quadrature",
        };
        Ok((v.value, used))
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &classify_params(&self.0))
    }

    /// Krein log-integral over `[a, inf)`.
    #[pyo3(signature = (a = 1.0, tol = 1e-8))]
    fn krein<'py>(&self, py: Python<'py>, a: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &krein_integral(&self.0, a, tol).map_err(err)?)
    }

    /// `n` draws; "mixture" (default) or "inverse" sampler. Same seed, same draws.
    #[pyo3(signature = (n, seed = 0, sampler = "mixture"))]
    fn sample(&self, py: Python<'_>, n: usize, seed: u64, sampler: &str) -> PyResult<Vec<f64>> {
        let p = self.0;
        match sampler {
            "mixture" => {
                let threads = std::thread::available_parallelism().map_or(1, |t| t.get());
                Ok(py.detach(|| sample_gln_parallel(&p, seed, n, threads)))
            }
            "inverse" => py.detach(|| sample_gln_inverse(&p, &mut RngStream::new(seed), n)).map_err(err),
            other => Err(PyValueError::new_err(format!("unknown sampler {other:?}"))),
        }
    }

    /// Stieltjes-class member with the same moments, `|eps| <= 1`.
    #[pyo3(signature = (eps = 1.0))]
    fn stieltjes_member(&self, eps: f64) -> PyResult<StieltjesMember> {
        let pert = sup_abs_h(&self.0).map_err(err)?;
        stieltjes::StieltjesMember::new(pert, eps).map(StieltjesMember).map_err(err)
    }

    /// Moment-equivalence certificates for `k = 0..=kmax`.
    #[pyo3(signature = (eps = 1.0, kmax = 4, tol = 1e-6))]
    fn verify_moment_equivalence<'py>(&self, py: Python<'py>, eps: f64, kmax: u32, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let p = self.0;
        let report = py.detach(|| verify_moment_equivalence(&p, eps, kmax, tol)).map_err(err)?;
        to_dict(py, &report)
    }
}

#[pyclass(frozen, module = "glnmom_py")]
struct StieltjesMember(stieltjes::StieltjesMember);

#[pymethods]
impl StieltjesMember {
    #[getter]
    fn eps(&self) -> f64 {
        self.0.eps()
    }

    /// `ln sup |h|`, the normalizer of the perturbation.
    #[getter]
    fn log_sup(&self) -> f64 {
        self.0.perturbation().log_sup()
    }

    #[getter]
    fn argmax_x(&self) -> f64 {
        self.0.perturbation().argmax_x()
    }

    fn pdf(&self, x: f64) -> PyResult<f64> {
        member_pdf(&self.0, x).map_err(err)
    }

    fn moment(&self, k: f64) -> PyResult<f64> {
        self.0.moment(k).map(|q| q.value).map_err(err)
    }
}

/// `E[Z^k]` for the mixing factor `Z = (rW)^(1/r)`, `W ~ Gamma(1 + 1/r)`,
/// so that `ln X = mu + sigma U Z` with `U` uniform on `(-1, 1)`.
#[pyfunction]
fn z_moment(r: f64, k: f64) -> PyResult<f64> {
    glnmom::moments::z_moment(r, k).map_err(err)
}

/// Closed form of the integral of `t**n exp(-t) sin t` over `(0, inf)`.
#[pyfunction]
fn kernel_moment_integral(n: u32) -> f64 {
    stieltjes::kernel_moment_integral(n)
}

fn prize(mu: f64, sigma: f64) -> PyResult<PrizeCompetitionParams> {
    PrizeCompetitionParams::new(mu, sigma).map_err(err)
}

/// Density of the `r -> inf` limit, uniform in `ln x` on `[mu - sigma, mu + sigma]`.
#[pyfunction]
#[pyo3(signature = (x, mu = 0.0, sigma = 1.0))]
fn limit_pdf(x: f64, mu: f64, sigma: f64) -> PyResult<f64> {
    prize_pdf(&prize(mu, sigma)?, x).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, mu = 0.0, sigma = 1.0))]
fn limit_cdf(x: f64, mu: f64, sigma: f64) -> PyResult<f64> {
    prize_cdf(&prize(mu, sigma)?, x).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, mu = 0.0, sigma = 1.0))]
fn limit_moment(k: f64, mu: f64, sigma: f64) -> PyResult<f64> {
    prize_moment_of(&prize(mu, sigma)?, k).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (mu = 0.0, sigma = 1.0))]
fn classify_limit(py: Python<'_>, mu: f64, sigma: f64) -> PyResult<Bound<'_, PyAny>> {
    to_dict(py, &classify_prize(&prize(mu, sigma)?))
}

#[pymodule]
fn glnmom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGlnParams>()?;
    m.add_class::<StieltjesMember>()?;
    m.add_function(wrap_pyfunction!(z_moment, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_moment_integral, m)?)?;
    m.add_function(wrap_pyfunction!(limit_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(limit_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(limit_moment, m)?)?;
    m.add_function(wrap_pyfunction!(classify_limit, m)?)?;
    Ok(())
}

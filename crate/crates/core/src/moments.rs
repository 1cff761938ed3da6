//! Moments `E[X^k]` of `X ~ GLN(μ, σ, r)`.
//!
//! Two independent routes are provided: the power series in `(kσ)²`
//! (integer `k`, `r > 1`) and quadrature of
//! `C ∫ exp(kz - |z|^r / (r σ^r)) dz` after the substitution `z = ln x - μ`.

use crate::distributions::GlnParams;
use crate::error::{domain, non_convergence, precondition, Result};
use crate::numerics::quadrature::{Integrator, QuadratureResult};
use crate::numerics::special::ln_gamma;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExistenceReason {
    RBelowOne,
    REqualOneOrderOutOfRange,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExistenceVerdict {
    pub exists: bool,
    pub reason: ExistenceReason,
}

/// Whether `E[X^k]` is finite: only `k = 0` for `r < 1`, `|k| < 1/σ` for
/// `r = 1`, every real `k` for `r > 1`.
pub fn moment_exists(p: &GlnParams, k: f64) -> Result<ExistenceVerdict> {
    if !k.is_finite() {
        return Err(domain(format!("moment order must be finite, got {k}")));
    }
    let r = p.r();
    let (exists, failure) = if r < 1.0 {
        (k == 0.0, ExistenceReason::RBelowOne)
    } else if r == 1.0 {
        (k.abs() < 1.0 / p.sigma(), ExistenceReason::REqualOneOrderOutOfRange)
    } else {
        (true, ExistenceReason::Finite)
    };
    Ok(ExistenceVerdict {
        exists,
        reason: if exists { ExistenceReason::Finite } else { failure },
    })
}

/// Which route produced a moment value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    Series,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    Series,
    Quadrature,
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentValue {
    pub value: f64,
    pub method: MomentMethod,
}

const SERIES_TERM_BUDGET: usize = 200_000;
const SERIES_REL_TAIL: f64 = 1e-15;
/// Below this order the series converges too slowly to be the default.
pub const SERIES_MIN_R: f64 = 1.05;

/// `E[X^k] = e^{kμ}/Γ(1/r) Σ_i (kσ)^{2i}/(2i)! · r^{2i/r} · Γ((2i+1)/r)`.
///
/// Terms are formed in log space and accumulated with a running
/// log-sum-exp. Summation stops after three consecutive terms each below
/// `1e-15` of the running sum.
pub fn moment_series(p: &GlnParams, k: u32) -> Result<f64> {
    let r = p.r();
    if r <= 1.0 {
        return Err(precondition(format!("moment series requires r > 1, got r = {r}")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let ln_ks = (k as f64 * p.sigma()).ln();
    let ln_r = r.ln();
    let log_term = |i: usize| -> f64 {
        let two_i = 2.0 * i as f64;
        two_i * ln_ks - ln_gamma(two_i + 1.0) + two_i / r * ln_r + ln_gamma((two_i + 1.0) / r)
    };

    let mut max_log = log_term(0);
    let mut scaled = 1.0; // Σ exp(log_term - max_log)
    let mut small_run = 0;
    for i in 1..SERIES_TERM_BUDGET {
        let lt = log_term(i);
        if lt > max_log {
            scaled = scaled * (max_log - lt).exp() + 1.0;
            max_log = lt;
        } else {
            scaled += (lt - max_log).exp();
        }
        let log_sum = max_log + scaled.ln();
        if lt < log_sum + SERIES_REL_TAIL.ln() {
            small_run += 1;
            if small_run == 3 {
                let log_moment = k as f64 * p.mu() - ln_gamma(1.0 / r) + log_sum;
                return Ok(log_moment.exp());
            }
        } else {
            small_run = 0;
        }
    }
    Err(non_convergence(format!(
        "moment series for k = {k}, r = {r} did not settle within {SERIES_TERM_BUDGET} terms"
    )))
}

/// Maximiser of `kz - |z|^r / (r σ^r)` (the integrand exponent after `z = ln x - μ`).
fn exponent_mode(p: &GlnParams, k: f64) -> f64 {
    let r = p.r();
    if k == 0.0 || r <= 1.0 {
        return 0.0;
    }
    let magnitude = ((k.abs().ln() + r * p.sigma().ln()) / (r - 1.0)).exp();
    magnitude.copysign(k)
}

/// Quadrature of the moment integral with its error estimate, in the
/// scale of `E[X^k]`.
pub fn moment_quadrature_result(p: &GlnParams, k: f64) -> Result<QuadratureResult> {
    weighted_moment_quadrature(p, k, |_| 1.0)
}

/// `∫ x^k f(x) w(ln x - μ) dx` for a bounded weight `w` given in `z = ln x - μ`.
pub(crate) fn weighted_moment_quadrature(
    p: &GlnParams,
    k: f64,
    weight: impl Fn(f64) -> f64,
) -> Result<QuadratureResult> {
    let verdict = moment_exists(p, k)?;
    if !verdict.exists {
        return Err(precondition(format!(
            "E[X^{k}] does not exist for r = {}, sigma = {}",
            p.r(),
            p.sigma()
        )));
    }
    let mode = exponent_mode(p, k);
    let exponent = |z: f64| k * z - p.scaled_power(z);
    let peak = exponent(mode);
    if !peak.is_finite() {
        return Err(non_convergence(format!("moment integrand peak overflows for k = {k}")));
    }
    let integrand = |z: f64| (exponent(z) - peak).exp() * weight(z);

    let integrator = Integrator {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_levels: 12,
    };
    let (lo, hi) = if mode < 0.0 { (mode, 0.0) } else { (0.0, mode) };
    let mut total = integrator
        .integrate(integrand, f64::NEG_INFINITY, lo)
        .combine(integrator.integrate(integrand, hi, f64::INFINITY));
    if hi > lo {
        total = total.combine(integrator.integrate(integrand, lo, hi));
    }
    let log_scale = k * p.mu() + p.log_norm_const() + peak;
    let scale = log_scale.exp();
    let mut result = total.scale(scale);
    if !scale.is_finite() || total.value <= 0.0 {
        result.converged = false;
    }
    if !result.value.is_finite() {
        result.value = (log_scale + total.value.ln()).exp();
    }
    Ok(result)
}

/// `E[X^k]` by quadrature; any real `k` for which the moment exists.
pub fn moment_quadrature(p: &GlnParams, k: f64) -> Result<f64> {
    let res = moment_quadrature_result(p, k)?;
    if res.value.is_infinite() {
        return Err(non_convergence(format!("E[X^{k}] exceeds the f64 range")));
    }
    if !res.converged {
        return Err(non_convergence(format!(
            "moment quadrature for k = {k} did not converge (estimate {}, error {})",
            res.value, res.abs_error_estimate
        )));
    }
    Ok(res.value)
}

/// `E[X^k]` by the requested route. `Auto` prefers the series for integer
/// `k ≥ 0` and `r ≥ 1.05`, falling back to quadrature otherwise or if the
/// series fails to settle.
pub fn moment(p: &GlnParams, k: f64, method: MethodChoice) -> Result<MomentValue> {
    let integer_order = k >= 0.0 && k.fract() == 0.0 && k <= u32::MAX as f64;
    match method {
        MethodChoice::Series => {
            if !integer_order {
                return Err(precondition(format!("moment series needs a nonnegative integer order, got {k}")));
            }
            Ok(MomentValue {
                value: moment_series(p, k as u32)?,
                method: MomentMethod::Series,
            })
        }
        MethodChoice::Quadrature => Ok(MomentValue {
            value: moment_quadrature(p, k)?,
            method: MomentMethod::Quadrature,
        }),
        MethodChoice::Auto => {
            if integer_order && p.r() >= SERIES_MIN_R {
                if let Ok(value) = moment_series(p, k as u32) {
                    return Ok(MomentValue {
                        value,
                        method: MomentMethod::Series,
                    });
                }
            }
            moment(p, k, MethodChoice::Quadrature)
        }
    }
}

/// Moments of the mixing factor `Z = (rW)^{1/r}`, `W ~ Gamma(1 + 1/r, 1)`:
/// `E[Z^k] = r^{k/r} Γ(1 + (k+1)/r) / Γ(1 + 1/r)`.
pub fn z_moment(r: f64, k: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(domain(format!("r must be finite and > 0, got {r}")));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(domain(format!("k must be finite and >= 0, got {k}")));
    }
    let log = k * r.ln() / r + ln_gamma(1.0 + (k + 1.0) / r) - ln_gamma(1.0 + 1.0 / r);
    Ok(log.exp())
}

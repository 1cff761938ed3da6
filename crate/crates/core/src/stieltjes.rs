//! Stieltjes classes for `GLN(μ, σ, r)` with `1 < r < ∞`: densities
//! `f_ε = f (1 + ε p)`, `ε ∈ [-1, 1]`, that all share the moments of `f`.
//!
//! The perturbation is `p = h / H` with
//!
//! ```text
//! h(x) = sin t · exp(|ln x - μ|^r / (r σ^r) + ln x - t),   t = (x - 1)^{1/4},  x > 1
//! ```
//!
//! and `h = 0` on `x ≤ 1`, `H = sup |h|`. Since `h f = C sin t e^{-t}`, every
//! moment integral `∫ x^k h f dx` reduces after `x = t⁴ + 1` to a sum of
//! `∫ t^{4j+3} e^{-t} sin t dt`, each of which is exactly zero.

use crate::distributions::{gln_log_pdf, GlnParams};
use crate::error::{domain, non_convergence, precondition, Result};
use crate::moments::{moment_quadrature, weighted_moment_quadrature};
use crate::numerics::dd::DoubleDouble;
use crate::numerics::oscillatory::integrate_oscillatory_extended;
use crate::numerics::quadrature::QuadratureResult;
use serde::Serialize;
use std::f64::consts::PI;

/// Default coarse-scan density per sine half period.
pub const DEFAULT_SCAN_POINTS: usize = 16;
/// The scan stops once the envelope has fallen this many log units below
/// the running maximum (and is certified to keep falling).
pub const ENVELOPE_DROP: f64 = 50.0;
const MAX_HALF_PERIODS: usize = 5_000_000;
const MAX_TURNOVER_T: f64 = 1e15;
const GOLDEN_ITERATIONS: usize = 80;
const OSCILLATORY_HALF_PERIODS: usize = 4000;

fn require_r_above_one(p: &GlnParams) -> Result<()> {
    if p.r() > 1.0 {
        Ok(())
    } else {
        Err(precondition(format!(
            "no Stieltjes class constructed for r <= 1 (got r = {}): moments of all orders do not exist",
            p.r()
        )))
    }
}

/// Log of the non-oscillating factor of `h` at `x = t⁴ + 1`.
fn log_envelope_t(p: &GlnParams, t: f64) -> f64 {
    let lx = t.powi(4).ln_1p();
    p.scaled_power(lx - p.mu()) + lx - t
}

fn log_abs_h_t(p: &GlnParams, t: f64) -> f64 {
    t.sin().abs().ln() + log_envelope_t(p, t)
}

/// `(sign, ln|h|)` at `x`, or `None` where `h` vanishes.
fn h_parts(p: &GlnParams, x: f64) -> Option<(f64, f64)> {
    if x.is_nan() || x <= 1.0 || x.is_infinite() {
        return None;
    }
    let dx = x - 1.0;
    let t = dx.sqrt().sqrt();
    let s = t.sin();
    if s == 0.0 {
        return None;
    }
    let lx = dx.ln_1p();
    Some((s.signum(), s.abs().ln() + p.scaled_power(lx - p.mu()) + lx - t))
}

/// The unnormalized perturbation `h(x)`. May overflow to ±∞ for extreme
/// parameters; [`perturbation_value`] stays representable.
pub fn h(p: &GlnParams, x: f64) -> Result<f64> {
    require_r_above_one(p)?;
    Ok(match h_parts(p, x) {
        Some((sign, log_abs)) => sign * log_abs.exp(),
        None => 0.0,
    })
}

/// `ln|h(x)|`, `-∞` where `h` vanishes.
pub fn log_abs_h(p: &GlnParams, x: f64) -> Result<f64> {
    require_r_above_one(p)?;
    Ok(h_parts(p, x).map_or(f64::NEG_INFINITY, |(_, l)| l))
}

/// `H = sup |h|` with its location, and the normalized perturbation `p = h / H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbation {
    params: GlnParams,
    log_sup: f64,
    argmax_x: f64,
    argmax_t: f64,
    scan_end_t: f64,
    half_periods: usize,
}

impl Perturbation {
    pub fn params(&self) -> &GlnParams {
        &self.params
    }

    /// `ln H`.
    pub fn log_sup(&self) -> f64 {
        self.log_sup
    }

    pub fn argmax_x(&self) -> f64 {
        self.argmax_x
    }

    pub fn argmax_t(&self) -> f64 {
        self.argmax_t
    }

    /// Beyond `x = scan_end_t⁴ + 1`, `|h| < e^{-50} H`.
    pub fn scan_end_x(&self) -> f64 {
        self.scan_end_t.powi(4) + 1.0
    }

    pub fn half_periods(&self) -> usize {
        self.half_periods
    }
}

/// Smallest power of two `t₀` past which the envelope exponent is
/// certified strictly decreasing.
///
/// With `L = ln(1 + t⁴)`, `d/dt` of the exponent is at most
/// `4(|L-μ|^{r-1}/σ^r + 1)/t - 1` once `L > μ`, and that bound itself
/// decreases once `L - μ > 4(r - 1)`.
fn turnover_point(p: &GlnParams) -> Result<f64> {
    let (mu, sigma, r) = (p.mu(), p.sigma(), p.r());
    let mut t = 1.0f64;
    loop {
        let z = t.powi(4).ln_1p() - mu;
        if z > 0.0 && z > 4.0 * (r - 1.0) {
            let slope_bound = 4.0 * (((r - 1.0) * z.ln() - r * sigma.ln()).exp() + 1.0) / t;
            if slope_bound < 1.0 {
                return Ok(t);
            }
        }
        t *= 2.0;
        if t > MAX_TURNOVER_T {
            return Err(non_convergence(format!(
                "envelope turnover not found below t = {MAX_TURNOVER_T:e} (mu = {mu}, sigma = {sigma}, r = {r})"
            )));
        }
    }
}

/// Maximizes `f` on `[lo, hi]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..GOLDEN_ITERATIONS {
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    if fa >= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Locates `H = sup |h|` with the default scan density.
pub fn sup_abs_h(p: &GlnParams) -> Result<Perturbation> {
    sup_abs_h_with(p, DEFAULT_SCAN_POINTS)
}

/// Locates `H = sup |h|` in `t = (x-1)^{1/4}`, where the sine has a zero at
/// every multiple of `π`. Each half period is scanned at `points` interior
/// points and the best one is refined by golden section. The scan ends at
/// the first `nπ` past the certified turnover where the envelope is
/// [`ENVELOPE_DROP`] log units below the running maximum.
pub fn sup_abs_h_with(p: &GlnParams, points: usize) -> Result<Perturbation> {
    require_r_above_one(p)?;
    if points < 2 {
        return Err(domain(format!("at least 2 scan points per half period required, got {points}")));
    }
    let t0 = turnover_point(p)?;
    if t0 / PI > MAX_HALF_PERIODS as f64 {
        return Err(non_convergence(format!(
            "envelope turns over at t = {t0:e}, beyond the scan budget of {MAX_HALF_PERIODS} half periods"
        )));
    }
    let g = |t: f64| log_abs_h_t(p, t);
    let step = PI / points as f64;
    let mut best = (f64::NAN, f64::NEG_INFINITY);

    for n in 0..MAX_HALF_PERIODS {
        let start = n as f64 * PI;
        let mut coarse = (0usize, f64::NEG_INFINITY);
        for i in 1..points {
            let v = g(start + i as f64 * step);
            if v > coarse.1 {
                coarse = (i, v);
            }
        }
        let lo = start + (coarse.0 - 1) as f64 * step;
        let hi = start + (coarse.0 + 1) as f64 * step;
        let refined = golden_max(g, lo, hi);
        let candidate = if refined.1 > coarse.1 {
            refined
        } else {
            (start + coarse.0 as f64 * step, coarse.1)
        };
        if candidate.1 > best.1 {
            best = candidate;
        }

        let end = start + PI;
        if end >= t0 && log_envelope_t(p, end) < best.1 - ENVELOPE_DROP {
            if !best.1.is_finite() {
                return Err(non_convergence("sup of |h| is not finite"));
            }
            // slack so that re-evaluation in x never exceeds the sup by rounding
            let slack = 64.0 * f64::EPSILON * best.1.abs().max(1.0);
            return Ok(Perturbation {
                params: *p,
                log_sup: best.1 + slack,
                argmax_x: best.0.powi(4) + 1.0,
                argmax_t: best.0,
                scan_end_t: end,
                half_periods: n + 1,
            });
        }
    }
    Err(non_convergence(format!(
        "sup search exceeded {MAX_HALF_PERIODS} half periods (r = {}, sigma = {})",
        p.r(),
        p.sigma()
    )))
}

/// `p(x) = h(x) / H`, in `[-1, 1]`.
pub fn perturbation_value(pert: &Perturbation, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    match h_parts(&pert.params, x) {
        Some((sign, log_abs)) => sign * (log_abs - pert.log_sup).exp(),
        None => 0.0,
    }
}

/// One member `f (1 + ε p)` of the class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StieltjesMember {
    perturbation: Perturbation,
    eps: f64,
}

impl StieltjesMember {
    pub fn new(perturbation: Perturbation, eps: f64) -> Result<Self> {
        if eps.is_nan() || eps.abs() > 1.0 {
            return Err(domain(format!("eps must lie in [-1, 1], got {eps}")));
        }
        Ok(Self { perturbation, eps })
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.perturbation
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `∫ x^k f_ε(x) dx` by quadrature in `ln x`.
    pub fn moment(&self, k: f64) -> Result<QuadratureResult> {
        let pert = &self.perturbation;
        let mu = pert.params.mu();
        weighted_moment_quadrature(&pert.params, k, |z| {
            1.0 + self.eps * perturbation_value(pert, (mu + z).exp())
        })
    }
}

/// `f_ε(x) = f(x) (1 + ε p(x))`.
pub fn member_pdf(m: &StieltjesMember, x: f64) -> Result<f64> {
    let params = &m.perturbation.params;
    let log_f = gln_log_pdf(params, x)?;
    let base = log_f.exp();
    if m.eps == 0.0 {
        return Ok(base);
    }
    Ok(match h_parts(params, x) {
        // f p = sign · exp(ln f + ln|h| - ln H), formed without f·p underflow
        Some((sign, log_abs)) => base + m.eps * sign * (log_f + log_abs - m.perturbation.log_sup).exp(),
        None => base,
    })
}

/// `∫₀^∞ tⁿ e^{-t} sin t dt = n! sin((n+1)π/4) / 2^{(n+1)/2}`.
///
/// The sine is taken from a table, so `n ≡ 3 (mod 4)` yields an exact zero
/// and the remaining values involve only exact powers of two.
/// Overflows to ±∞ past `n = 170`.
pub fn kernel_moment_integral(n: u32) -> f64 {
    let factorial: f64 = (2..=n).map(f64::from).product();
    // (n+1) mod 8 → sin((n+1)π/4) as ±1, ±1/√2, 0
    let m = (n + 1) % 8;
    match m {
        0 | 4 => 0.0,
        // n odd: |sin| = 1, divisor 2^{(n+1)/2}
        2 | 6 => {
            let sign = if m == 2 { 1.0 } else { -1.0 };
            sign * factorial / 2f64.powi(n.div_ceil(2) as i32)
        }
        // n even: (1/√2) / 2^{(n+1)/2} = 1 / 2^{n/2 + 1}
        _ => {
            let sign = if m <= 3 { 1.0 } else { -1.0 };
            sign * factorial / 2f64.powi((n / 2 + 1) as i32)
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Per-order evidence that `∫ x^k f_ε = ∫ x^k f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCertificate {
    pub k: u32,
    /// `C·4·binom(k, j)·∫ t^{4j+3} e^{-t} sin t dt` for `j = 0..=k`.
    pub analytic_terms: Vec<f64>,
    pub analytic_exact_zero: bool,
    /// Oscillatory quadrature of `∫ x^k h f dx = 4C ∫ (t⁴+1)^k t³ e^{-t} sin t dt`.
    pub numeric_value: f64,
    pub numeric_error_estimate: f64,
    pub numeric_converged: bool,
    /// `E[X^k]` under `f`, when quadrature succeeds.
    pub moment: Option<f64>,
    /// `|numeric_value| / moment`.
    pub relative_residual: f64,
    /// Implied difference of member and base moments, `ε · numeric_value / H`.
    pub member_moment_difference: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub mu: f64,
    pub sigma: f64,
    pub r: f64,
    pub eps: f64,
    pub log_sup: f64,
    pub tolerance: f64,
    pub certificates: Vec<MomentCertificate>,
    pub all_passed: bool,
}

/// `∫ x^k h f dx` evaluated as an oscillatory integral in `t`.
pub fn perturbation_moment_integral(p: &GlnParams, k: u32, tol: f64) -> Result<QuadratureResult> {
    require_r_above_one(p)?;
    let c4 = 4.0 * p.norm_const();
    let envelope = |t: DoubleDouble| (t.powi(4) + DoubleDouble::ONE).powi(k) * t.powi(3) * (-t).exp();
    Ok(integrate_oscillatory_extended(envelope, OSCILLATORY_HALF_PERIODS, tol / c4).scale(c4))
}

/// Certifies, for `k = 0..=k_max`, that the member with this `ε` has the
/// same `k`-th moment as `f`: exactly through the binomial expansion, and
/// numerically through oscillatory quadrature with residual at most
/// `tol · E[X^k]`.
pub fn verify_moment_equivalence(p: &GlnParams, eps: f64, k_max: u32, tol: f64) -> Result<EquivalenceReport> {
    require_r_above_one(p)?;
    if eps.is_nan() || eps.abs() > 1.0 {
        return Err(domain(format!("eps must lie in [-1, 1], got {eps}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(domain(format!("tolerance must be finite and > 0, got {tol}")));
    }
    let pert = sup_abs_h(p)?;
    let c4 = 4.0 * p.norm_const();
    let certificates: Vec<MomentCertificate> = (0..=k_max)
        .map(|k| {
            let analytic_terms: Vec<f64> = (0..=k)
                .map(|j| c4 * binomial(k, j) * kernel_moment_integral(4 * j + 3))
                .collect();
            let analytic_exact_zero = analytic_terms.iter().all(|&v| v == 0.0);
            let moment = moment_quadrature(p, f64::from(k)).ok();
            let scale = moment.unwrap_or(1.0);
            let numeric = perturbation_moment_integral(p, k, 0.1 * tol * scale)
                .unwrap_or(QuadratureResult {
                    value: f64::NAN,
                    abs_error_estimate: f64::INFINITY,
                    evaluations: 0,
                    converged: false,
                });
            let relative_residual = numeric.value.abs() / scale;
            let member_moment_difference = if numeric.value == 0.0 {
                0.0
            } else {
                eps * numeric.value.signum() * (numeric.value.abs().ln() - pert.log_sup).exp()
            };
            MomentCertificate {
                k,
                analytic_terms,
                analytic_exact_zero,
                numeric_value: numeric.value,
                numeric_error_estimate: numeric.abs_error_estimate,
                numeric_converged: numeric.converged,
                moment,
                relative_residual,
                member_moment_difference,
                passed: analytic_exact_zero && numeric.converged && moment.is_some() && relative_residual <= tol,
            }
        })
        .collect();
    let all_passed = certificates.iter().all(|c| c.passed);
    Ok(EquivalenceReport {
        mu: p.mu(),
        sigma: p.sigma(),
        r: p.r(),
        eps,
        log_sup: pert.log_sup,
        tolerance: tol,
        certificates,
        all_passed,
    })
}

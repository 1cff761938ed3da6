//! Integrals of the form `∫₀^∞ envelope(t) sin t dt`, summed interval by
//! interval between the zeros `nπ` of the sine.
//!
//! Each half period is integrated by composite Gauss-Legendre; the
//! resulting alternating series is accumulated in double-double (so the
//! summation itself is error-compensated) and, once the terms are seen to
//! alternate with shrinking magnitude, the better of the Leibniz-bounded
//! partial sum and its Euler transform (repeated averaging of partial sums)
//! is reported.
//!
//! Node placement and the sine factor are always evaluated in
//! double-double. The envelope is generic: an `f64` envelope limits the
//! result to roughly `1e-16 * Σ|I_n|`, a [`DoubleDouble`] envelope to
//! roughly `1e-30 * Σ|I_n|`.

use super::dd::DoubleDouble;
use super::quadrature::QuadratureResult;
use std::sync::OnceLock;

const GL_POINTS: usize = 32;
const EULER_DEPTH: usize = 6;
/// Consecutive alternating, shrinking terms required before the tail is
/// treated as a Leibniz series.
const ALTERNATION_WINDOW: usize = 3;

/// Number type an envelope consumes and produces.
pub trait EnvelopeScalar: Copy {
    fn from_dd(x: DoubleDouble) -> Self;
    fn to_dd(self) -> DoubleDouble;
}

impl EnvelopeScalar for f64 {
    fn from_dd(x: DoubleDouble) -> Self {
        x.to_f64()
    }
    fn to_dd(self) -> DoubleDouble {
        DoubleDouble::from_f64(self)
    }
}

impl EnvelopeScalar for DoubleDouble {
    fn from_dd(x: DoubleDouble) -> Self {
        x
    }
    fn to_dd(self) -> DoubleDouble {
        self
    }
}

/// `∫₀^∞ envelope(t) sin t dt` for an `f64` envelope.
///
/// `n_max` caps the number of half periods; `tol` is absolute. The result
/// is flagged unconverged if the interval sums have not settled into a
/// shrinking alternating pattern within `n_max` half periods.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(envelope: F, n_max: usize, tol: f64) -> QuadratureResult {
    integrate_oscillatory_generic(envelope, n_max, tol)
}

/// Same as [`integrate_oscillatory`] with the envelope evaluated in
/// double-double. Needed when the interval sums are many orders of
/// magnitude larger than the integral (e.g. `tⁿ e^{-t}` for large `n`).
pub fn integrate_oscillatory_extended<F: Fn(DoubleDouble) -> DoubleDouble>(
    envelope: F,
    n_max: usize,
    tol: f64,
) -> QuadratureResult {
    integrate_oscillatory_generic(envelope, n_max, tol)
}

pub fn integrate_oscillatory_generic<T: EnvelopeScalar, F: Fn(T) -> T>(
    envelope: F,
    n_max: usize,
    tol: f64,
) -> QuadratureResult {
    let mut evaluations = 0usize;
    let mut partial = DoubleDouble::ZERO;
    let mut partials: Vec<DoubleDouble> = Vec::new();
    let mut terms: Vec<DoubleDouble> = Vec::new();
    let mut quad_err = 0.0;
    let mut best = (f64::NAN, f64::INFINITY);

    for n in 0..n_max {
        let (mut term, err, finite) = half_period_integral(&envelope, n, &mut evaluations);
        if !finite {
            return QuadratureResult {
                value: partial.to_f64(),
                abs_error_estimate: f64::INFINITY,
                evaluations,
                converged: false,
            };
        }
        if n % 2 == 1 {
            term = -term;
        }
        partial = partial + term;
        partials.push(partial);
        terms.push(term);
        quad_err += err;

        if !alternating_tail(&terms) {
            continue;
        }

        let last = term.abs().to_f64();
        let mut candidate = (partial.to_f64(), last);
        if let Some((euler, euler_err)) = euler_estimate(&partials) {
            if euler_err < candidate.1 {
                candidate = (euler.to_f64(), euler_err);
            }
        }
        let total_err = candidate.1 + quad_err;
        if total_err < best.1 {
            best = (candidate.0, total_err);
        }
        if total_err <= tol {
            return QuadratureResult {
                value: candidate.0,
                abs_error_estimate: total_err,
                evaluations,
                converged: true,
            };
        }
    }

    let (value, err) = if best.0.is_nan() {
        (partial.to_f64(), f64::INFINITY)
    } else {
        best
    };
    QuadratureResult {
        value,
        abs_error_estimate: err,
        evaluations: evaluations.max(1),
        converged: false,
    }
}

fn alternating_tail(terms: &[DoubleDouble]) -> bool {
    if terms.len() < ALTERNATION_WINDOW + 1 {
        return false;
    }
    let tail = &terms[terms.len() - ALTERNATION_WINDOW - 1..];
    tail.windows(2).all(|w| {
        let (prev, next) = (w[0].to_f64(), w[1].to_f64());
        next == 0.0 || (prev * next < 0.0 && next.abs() < prev.abs())
    })
}

/// Repeated pairwise averaging of the last `EULER_DEPTH + 1` partial sums,
/// compared against the same transform one step earlier.
fn euler_estimate(partials: &[DoubleDouble]) -> Option<(DoubleDouble, f64)> {
    if partials.len() < EULER_DEPTH + 2 {
        return None;
    }
    let average = |window: &[DoubleDouble]| -> DoubleDouble {
        let mut row = window.to_vec();
        while row.len() > 1 {
            row = row.windows(2).map(|w| (w[0] + w[1]).mul_f64(0.5)).collect();
        }
        row[0]
    };
    let n = partials.len();
    let now = average(&partials[n - EULER_DEPTH - 1..]);
    let before = average(&partials[n - EULER_DEPTH - 2..n - 1]);
    Some((now, (now - before).abs().to_f64()))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed once in
/// double-double by Newton iteration on the Legendre recurrence.
fn gauss_legendre() -> &'static [(DoubleDouble, DoubleDouble); GL_POINTS] {
    static NODES: OnceLock<[(DoubleDouble, DoubleDouble); GL_POINTS]> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_POINTS;
        let legendre = |x: DoubleDouble| -> (DoubleDouble, DoubleDouble) {
            let mut p0 = DoubleDouble::ONE;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((x * p1).mul_f64(2.0 * kf - 1.0) - p0.mul_f64(kf - 1.0))
                    / DoubleDouble::from_f64(kf);
                p0 = p1;
                p1 = p2;
            }
            // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1)
            let dp = (x * p1 - p0).mul_f64(n as f64) / (x * x - DoubleDouble::ONE);
            (p1, dp)
        };
        let mut out = [(DoubleDouble::ZERO, DoubleDouble::ZERO); GL_POINTS];
        for (i, slot) in out.iter_mut().enumerate() {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = DoubleDouble::from_f64(guess);
            for _ in 0..100 {
                let (p, dp) = legendre(x);
                let step = p / dp;
                x = x - step;
                if step.abs().to_f64() < 1e-32 {
                    break;
                }
            }
            let (_, dp) = legendre(x);
            let w = DoubleDouble::from_f64(2.0) / ((DoubleDouble::ONE - x * x) * dp * dp);
            *slot = (x, w);
        }
        out
    })
}

/// `∫ env(nπ + u) sin u du` over `u ∈ [lo·π, hi·π]`.
fn gauss_piece<T: EnvelopeScalar>(
    envelope: &impl Fn(T) -> T,
    n: usize,
    frac_lo: f64,
    frac_hi: f64,
    evaluations: &mut usize,
) -> (DoubleDouble, bool) {
    let pi = DoubleDouble::PI;
    let center = pi.mul_f64(0.5 * (frac_lo + frac_hi));
    let half = pi.mul_f64(0.5 * (frac_hi - frac_lo));
    let offset = pi.mul_f64(n as f64);
    let mut acc = DoubleDouble::ZERO;
    let mut finite = true;
    for &(x, w) in gauss_legendre() {
        let u = center + half * x;
        let env = envelope(T::from_dd(offset + u)).to_dd();
        *evaluations += 1;
        let v = env * u.sin_half_period() * w;
        if !v.is_finite() {
            finite = false;
            continue;
        }
        acc = acc + v;
    }
    (acc * half, finite)
}

/// Unsigned integral over one half period, split at its midpoint; the
/// unsplit rule supplies the error estimate.
fn half_period_integral<T: EnvelopeScalar>(
    envelope: &impl Fn(T) -> T,
    n: usize,
    evaluations: &mut usize,
) -> (DoubleDouble, f64, bool) {
    let (coarse, ok0) = gauss_piece(envelope, n, 0.0, 1.0, evaluations);
    let (left, ok1) = gauss_piece(envelope, n, 0.0, 0.5, evaluations);
    let (right, ok2) = gauss_piece(envelope, n, 0.5, 1.0, evaluations);
    let fine = left + right;
    ((fine), (fine - coarse).abs().to_f64(), ok0 && ok1 && ok2)
}

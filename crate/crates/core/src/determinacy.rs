//! Moment (in)determinacy of the GLN family.
//!
//! The verdict is decided analytically from `r` (and `σ` when `r = 1`); the
//! Krein integral
//!
//! ```text
//! K = ∫_a^∞ -ln f(x²) / (1 + x²) dx
//! ```
//!
//! is evaluated numerically and attached as a witness for `1 < r < ∞`.
//! A finite `K` together with finite moments of every order implies the
//! distribution is not determined by its moments.

use crate::distributions::{tail_compare, GlnParams, PrizeCompetitionParams, TailOrdering};
use crate::error::{domain, Result};
use crate::numerics::quadrature::{Integrator, QuadratureResult};
use crate::numerics::special::{inc_gamma_pair, ln_gamma};
use serde::{Serialize, Serializer};

/// Default lower cutoff of the Krein integral. Finiteness does not depend on it.
pub const DEFAULT_KREIN_CUTOFF: f64 = 1.0;
/// Tail tolerance used by [`classify`].
pub const DEFAULT_KREIN_TOL: f64 = 1e-8;

const MAX_LOG_CUTOFF: f64 = 700.0;
const CHUNK_WIDTH: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KreinResult {
    pub value: f64,
    pub lower_cutoff: f64,
    pub upper_cutoff: f64,
    pub tail_bound: f64,
    pub abs_error_estimate: f64,
    pub converged: bool,
}

/// `-ln f(e^{2u})` for the GLN density `f`, written in `u = ln x`.
fn neg_log_density_sq(p: &GlnParams, u: f64) -> f64 {
    -p.log_norm_const() + 2.0 * u + p.scaled_power(2.0 * u - p.mu())
}

/// Upper bound on `∫_U^∞ |-ln f(e^{2u})| / (2 cosh u) du` for `U ≥ 0`.
///
/// Uses `1/(2 cosh u) ≤ e^{-u}` and `|2u - μ| ≤ 2u + |μ|`; the power term
/// integrates to `e^{|μ|/2} 2^r Γ(r+1) Q(r+1, U + |μ|/2) / (r σ^r)`.
pub fn krein_tail_bound(p: &GlnParams, upper_log: f64) -> f64 {
    let u = upper_log.max(0.0);
    let (r, sigma, mu_abs) = (p.r(), p.sigma(), p.mu().abs());
    let linear = (p.log_norm_const().abs() + 2.0 * (u + 1.0)) * (-u).exp();
    let (_, q) = inc_gamma_pair(r + 1.0, u + 0.5 * mu_abs);
    let log_power = 0.5 * mu_abs + r * std::f64::consts::LN_2 + ln_gamma(r + 1.0) + q.ln()
        - r.ln()
        - r * sigma.ln();
    linear + log_power.exp()
}

/// Krein integral from `a` to infinity. The finite part is integrated in
/// `u = ln x`; the cutoff `e^U` doubles `U` until the analytic tail bound
/// is at most `tol`.
pub fn krein_integral(p: &GlnParams, a: f64, tol: f64) -> Result<KreinResult> {
    if !(a.is_finite() && a > 0.0) {
        return Err(domain(format!("lower cutoff must be finite and > 0, got {a}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(domain(format!("tolerance must be finite and > 0, got {tol}")));
    }
    let lower = a.ln();
    let mut upper = lower.max(0.0) + 8.0;
    let mut tail = krein_tail_bound(p, upper);
    while tail > tol && upper < MAX_LOG_CUTOFF {
        upper = (2.0 * upper).min(MAX_LOG_CUTOFF);
        tail = krein_tail_bound(p, upper);
    }

    let integrand = |u: f64| neg_log_density_sq(p, u) / (2.0 * u.cosh());
    let mut breaks = vec![lower];
    let kink = 0.5 * p.mu();
    let mut next = lower + CHUNK_WIDTH;
    while next < upper {
        breaks.push(next);
        next += CHUNK_WIDTH;
    }
    if kink > lower && kink < upper {
        breaks.push(kink);
    }
    breaks.push(upper);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let integrator = Integrator {
        abs_tol: 1e-3 * tol / breaks.len() as f64,
        rel_tol: 1e-13,
        max_levels: 12,
    };
    let total = breaks
        .windows(2)
        .map(|w| integrator.integrate(integrand, w[0], w[1]))
        .reduce(QuadratureResult::combine)
        .expect("at least one interval");

    Ok(KreinResult {
        value: total.value,
        lower_cutoff: a,
        upper_cutoff: upper.exp(),
        tail_bound: tail,
        abs_error_estimate: total.abs_error_estimate,
        converged: total.converged && tail <= tol && total.value.is_finite(),
    })
}

/// Independent evaluation of the full Krein integral directly in `x`,
/// including the tail, by exp-sinh quadrature split at the kink `e^{μ/2}`.
pub fn krein_integral_direct(p: &GlnParams, a: f64) -> Result<QuadratureResult> {
    if !(a.is_finite() && a > 0.0) {
        return Err(domain(format!("lower cutoff must be finite and > 0, got {a}")));
    }
    let integrand = |x: f64| {
        let lx = x.ln();
        (-p.log_norm_const() + 2.0 * lx + p.scaled_power(2.0 * lx - p.mu())) / (1.0 + x * x)
    };
    let integrator = Integrator {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_levels: 12,
    };
    let kink = (0.5 * p.mu()).exp();
    if kink > a {
        Ok(integrator
            .integrate(integrand, a, kink)
            .combine(integrator.integrate(integrand, kink, f64::INFINITY)))
    } else {
        Ok(integrator.integrate(integrand, a, f64::INFINITY))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    NoMoments,
    PartialMoments,
    IndeterminateAllMomentsFinite,
    DeterminateCompactSupport,
}

fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

/// Set of real orders `k` with finite `E[X^k]`. `closed` marks whether the
/// endpoints belong to it (only for the degenerate set `{0}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRange {
    #[serde(serialize_with = "serialize_extended")]
    pub lower: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub upper: f64,
    pub closed: bool,
}

impl MomentRange {
    pub fn contains(&self, k: f64) -> bool {
        if self.closed {
            k >= self.lower && k <= self.upper
        } else {
            k > self.lower && k < self.upper
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminacyVerdict {
    pub kind: VerdictKind,
    pub moment_range: Option<MomentRange>,
    pub mgf_exists: bool,
    pub krein: Option<KreinResult>,
    /// Whether a converged Krein value backs an indeterminate verdict.
    pub witnessed: bool,
    /// Right-tail ordering against the lognormal with the same `μ, σ`.
    pub tail_vs_lognormal: Option<TailOrdering>,
}

/// Classifies `GLN(μ, σ, r)`. Quadrature never changes the kind; a failed
/// Krein evaluation leaves the verdict in place with `witnessed = false`.
pub fn classify(p: &GlnParams) -> DeterminacyVerdict {
    let r = p.r();
    let lognormal = GlnParams::new(p.mu(), p.sigma(), 2.0).expect("valid shape");
    let tail = Some(tail_compare(p, &lognormal));
    if r < 1.0 {
        return DeterminacyVerdict {
            kind: VerdictKind::NoMoments,
            moment_range: Some(MomentRange {
                lower: 0.0,
                upper: 0.0,
                closed: true,
            }),
            mgf_exists: false,
            krein: None,
            witnessed: false,
            tail_vs_lognormal: tail,
        };
    }
    if r == 1.0 {
        let bound = 1.0 / p.sigma();
        return DeterminacyVerdict {
            kind: VerdictKind::PartialMoments,
            moment_range: Some(MomentRange {
                lower: -bound,
                upper: bound,
                closed: false,
            }),
            mgf_exists: false,
            krein: None,
            witnessed: false,
            tail_vs_lognormal: tail,
        };
    }
    let krein = krein_integral(p, DEFAULT_KREIN_CUTOFF, DEFAULT_KREIN_TOL).ok();
    DeterminacyVerdict {
        kind: VerdictKind::IndeterminateAllMomentsFinite,
        moment_range: Some(MomentRange {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            closed: false,
        }),
        mgf_exists: false,
        witnessed: krein.is_some_and(|k| k.converged),
        krein,
        tail_vs_lognormal: tail,
    }
}

/// The `r → ∞` limit law has bounded support, so its moments determine it.
pub fn classify_limit(_p: &PrizeCompetitionParams) -> DeterminacyVerdict {
    DeterminacyVerdict {
        kind: VerdictKind::DeterminateCompactSupport,
        moment_range: Some(MomentRange {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            closed: false,
        }),
        mgf_exists: true,
        krein: None,
        witnessed: false,
        tail_vs_lognormal: None,
    }
}

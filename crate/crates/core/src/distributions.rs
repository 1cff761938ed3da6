//! Generalized error (GED) and generalized lognormal (GLN) distributions,
//! and the compact-support law obtained as `r → ∞`.
//!
//! Parameterization: with `Y ~ GED(μ, σ, r)`,
//!
//! ```text
//! f(y) = C_r exp(-|y - μ|^r / (r σ^r)),   C_r = 1 / (2 r^{1/r} σ Γ(1 + 1/r))
//! ```
//!
//! and `X = exp(Y) ~ GLN(μ, σ, r)` has density `f(ln x) / x` on `x > 0`.
//! `r = 2` gives the normal / lognormal laws, `r = 1` the Laplace / log-Laplace
//! laws. `e^μ` is a scale parameter of `X`.

use crate::error::{domain, Result};
use crate::numerics::special::{inc_gamma_pair, inv_inc_gamma, ln_gamma};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

fn check_shape(mu: f64, sigma: f64, r: f64) -> Result<()> {
    if !mu.is_finite() {
        return Err(domain(format!("mu must be finite, got {mu}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(domain(format!("sigma must be finite and > 0, got {sigma}")));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(domain(format!("r must be finite and > 0, got {r}")));
    }
    Ok(())
}

/// Parameters `(μ, σ, r)` of the generalized error distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GedParams {
    mu: f64,
    sigma: f64,
    r: f64,
}

/// Parameters `(μ, σ, r)` of the generalized lognormal distribution: the law
/// of `exp(Y)` with `Y ~ GED(μ, σ, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlnParams {
    mu: f64,
    sigma: f64,
    r: f64,
}

macro_rules! shape_accessors {
    ($t:ty) => {
        impl $t {
            pub fn new(mu: f64, sigma: f64, r: f64) -> Result<Self> {
                check_shape(mu, sigma, r)?;
                Ok(Self { mu, sigma, r })
            }

            pub fn mu(&self) -> f64 {
                self.mu
            }

            pub fn sigma(&self) -> f64 {
                self.sigma
            }

            pub fn r(&self) -> f64 {
                self.r
            }

            /// `ln C_r`, the log of the normalizing constant.
            pub fn log_norm_const(&self) -> f64 {
                let r = self.r;
                -std::f64::consts::LN_2 - r.ln() / r - self.sigma.ln() - ln_gamma(1.0 + 1.0 / r)
            }

            pub fn norm_const(&self) -> f64 {
                self.log_norm_const().exp()
            }

            /// `|z|^r / (r σ^r)` evaluated as `exp(r ln(|z|/σ)) / r`.
            pub(crate) fn scaled_power(&self, z: f64) -> f64 {
                let a = z.abs();
                if a == 0.0 {
                    return 0.0;
                }
                (self.r * (a / self.sigma).ln()).exp() / self.r
            }
        }
    };
}

shape_accessors!(GedParams);
shape_accessors!(GlnParams);

impl GlnParams {
    /// Parameters of `ln X`.
    pub fn ged(&self) -> GedParams {
        GedParams {
            mu: self.mu,
            sigma: self.sigma,
            r: self.r,
        }
    }
}

impl GedParams {
    /// Parameters of `exp(Y)`.
    pub fn gln(&self) -> GlnParams {
        GlnParams {
            mu: self.mu,
            sigma: self.sigma,
            r: self.r,
        }
    }
}

fn finite(y: f64, what: &str) -> Result<()> {
    if y.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be finite, got {y}")))
    }
}

fn probability(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("probability must lie in (0, 1), got {q}")))
    }
}

pub fn ged_log_pdf(p: &GedParams, y: f64) -> Result<f64> {
    finite(y, "y")?;
    Ok(p.log_norm_const() - p.scaled_power(y - p.mu))
}

pub fn ged_pdf(p: &GedParams, y: f64) -> Result<f64> {
    ged_log_pdf(p, y).map(f64::exp)
}

/// `F(y) = 1/2 + sign(y - μ)/2 · P(1/r, |y - μ|^r / (r σ^r))`; the lower
/// half is evaluated through `Q` to keep relative accuracy in the left tail.
pub fn ged_cdf(p: &GedParams, y: f64) -> Result<f64> {
    finite(y, "y")?;
    let u = p.scaled_power(y - p.mu);
    let (_, q) = inc_gamma_pair(1.0 / p.r, u);
    Ok(if y >= p.mu { 1.0 - 0.5 * q } else { 0.5 * q })
}

pub fn ged_quantile(p: &GedParams, q: f64) -> Result<f64> {
    probability(q)?;
    if q == 0.5 {
        return Ok(p.mu);
    }
    // Q(1/r, u) = 2 min(q, 1 - q)
    let tail = 2.0 * q.min(1.0 - q);
    let u = inv_inc_gamma(1.0 / p.r, 1.0 - tail, tail)?;
    if u == 0.0 {
        return Ok(p.mu);
    }
    let dist = p.sigma * ((p.r.ln() + u.ln()) / p.r).exp();
    Ok(if q > 0.5 { p.mu + dist } else { p.mu - dist })
}

fn positive(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("x must be finite and > 0, got {x}")))
    }
}

pub fn gln_log_pdf(p: &GlnParams, x: f64) -> Result<f64> {
    positive(x)?;
    let lx = x.ln();
    Ok(ged_log_pdf(&p.ged(), lx)? - lx)
}

pub fn gln_pdf(p: &GlnParams, x: f64) -> Result<f64> {
    gln_log_pdf(p, x).map(f64::exp)
}

pub fn gln_cdf(p: &GlnParams, x: f64) -> Result<f64> {
    positive(x)?;
    ged_cdf(&p.ged(), x.ln())
}

pub fn gln_quantile(p: &GlnParams, q: f64) -> Result<f64> {
    ged_quantile(&p.ged(), q).map(f64::exp)
}

/// `X^a ~ GLN(aμ, aσ, r)` for `X ~ GLN(μ, σ, r)` and `a > 0`.
pub fn power_transform(p: &GlnParams, power: f64) -> Result<GlnParams> {
    if !(power.is_finite() && power > 0.0) {
        return Err(domain(format!("power must be finite and > 0, got {power}")));
    }
    GlnParams::new(power * p.mu, power * p.sigma, p.r)
}

/// Right-tail ordering of two GLN laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailOrdering {
    Heavier,
    Lighter,
    SameOrder,
}

/// `f₁(x)/f₂(x) → ∞` exactly when `r₁ < r₂`. Equal orders compare as
/// `SameOrder` regardless of `σ`.
pub fn tail_compare(p1: &GlnParams, p2: &GlnParams) -> TailOrdering {
    match p1.r.partial_cmp(&p2.r) {
        Some(Ordering::Less) => TailOrdering::Heavier,
        Some(Ordering::Greater) => TailOrdering::Lighter,
        _ => TailOrdering::SameOrder,
    }
}

/// `exp(μ + σU)` with `U` uniform on `[-1, 1]`: the `r → ∞` limit of
/// `GLN(μ, σ, r)`, supported on `[e^{μ-σ}, e^{μ+σ}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrizeCompetitionParams {
    mu: f64,
    sigma: f64,
}

impl Default for PrizeCompetitionParams {
    fn default() -> Self {
        Self { mu: 0.0, sigma: 1.0 }
    }
}

impl PrizeCompetitionParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        check_shape(mu, sigma, 1.0)?;
        let p = Self { mu, sigma };
        let (lo, hi) = p.support();
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(domain(format!("support [{lo}, {hi}] is not representable")));
        }
        Ok(p)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn support(&self) -> (f64, f64) {
        ((self.mu - self.sigma).exp(), (self.mu + self.sigma).exp())
    }
}

pub fn prize_pdf(p: &PrizeCompetitionParams, x: f64) -> Result<f64> {
    positive(x)?;
    let lx = x.ln();
    if (lx - p.mu).abs() <= p.sigma {
        Ok(1.0 / (2.0 * p.sigma * x))
    } else {
        Ok(0.0)
    }
}

pub fn prize_cdf(p: &PrizeCompetitionParams, x: f64) -> Result<f64> {
    positive(x)?;
    let z = (x.ln() - p.mu) / p.sigma;
    Ok((0.5 * (z + 1.0)).clamp(0.0, 1.0))
}

/// `E[X^k] = e^{kμ} sinh(kσ) / (kσ)`, with value 1 at `k = 0`.
pub fn prize_moment(p: &PrizeCompetitionParams, k: f64) -> Result<f64> {
    finite(k, "k")?;
    let z = k * p.sigma;
    let shape = if z.abs() < 1e-4 {
        1.0 + z * z / 6.0 * (1.0 + z * z / 20.0)
    } else {
        z.sinh() / z
    };
    Ok((k * p.mu).exp() * shape)
}

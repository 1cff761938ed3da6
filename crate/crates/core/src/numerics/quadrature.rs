//! Double-exponential quadrature: tanh-sinh on finite intervals and
//! exp-sinh on half-infinite ones.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Outcome of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// Sum of two independent pieces; converged only if both are.
    pub fn combine(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    pub fn scale(self, factor: f64) -> QuadratureResult {
        QuadratureResult {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            ..self
        }
    }
}

/// Tolerances and budget for [`Integrator::integrate`].
///
/// A result is `converged` when the level-to-level difference falls below
/// `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_levels: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_levels: 10,
        }
    }
}

const MIN_LEVELS: usize = 3;
const INITIAL_STEP: f64 = 0.5;
const TANH_SINH_T_MAX: f64 = 4.0;
const EXP_SINH_T_MIN: f64 = -4.5;
const EXP_SINH_T_MAX: f64 = 5.0;

/// Integrates `f` over `[a, b]` with absolute tolerance `tol`.
/// Either bound may be infinite.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadratureResult {
    Integrator {
        abs_tol: tol,
        rel_tol: 0.0,
        ..Integrator::default()
    }
    .integrate(f, a, b)
}

impl Integrator {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> QuadratureResult {
        if a.is_nan() || b.is_nan() {
            return QuadratureResult {
                value: f64::NAN,
                abs_error_estimate: f64::INFINITY,
                evaluations: 0,
                converged: false,
            };
        }
        if a == b {
            return QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                evaluations: 1,
                converged: true,
            };
        }
        if a > b {
            return self.integrate(f, b, a).scale(-1.0);
        }
        match (a.is_finite(), b.is_finite()) {
            (true, true) => self.tanh_sinh(&f, a, b),
            (true, false) => self.exp_sinh(&f, a),
            (false, true) => self.exp_sinh(&|y: f64| f(-y), -b),
            (false, false) => {
                let right = self.exp_sinh(&f, 0.0);
                let left = self.exp_sinh(&|y: f64| f(-y), 0.0);
                left.combine(right)
            }
        }
    }

    fn tanh_sinh(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> QuadratureResult {
        let half = 0.5 * (b - a);
        let node = |t: f64| -> (f64, f64) {
            let u = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u.abs()).exp();
            // distance from the nearer endpoint: (b - a) / (1 + e^{2|u|})
            let dist = (b - a) * e / (1.0 + e);
            let x = if t >= 0.0 { b - dist } else { a + dist };
            // (b - a)/2 * (π/2) cosh t / cosh^2 u
            let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
            (x, half * FRAC_PI_2 * t.cosh() * sech2)
        };
        self.run_levels(f, node, -TANH_SINH_T_MAX, TANH_SINH_T_MAX)
    }

    fn exp_sinh(&self, f: &dyn Fn(f64) -> f64, a: f64) -> QuadratureResult {
        let node = |t: f64| -> (f64, f64) {
            let e = (FRAC_PI_2 * t.sinh()).exp();
            (a + e, FRAC_PI_2 * t.cosh() * e)
        };
        self.run_levels(f, node, EXP_SINH_T_MIN, EXP_SINH_T_MAX)
    }

    fn run_levels(
        &self,
        f: &dyn Fn(f64) -> f64,
        node: impl Fn(f64) -> (f64, f64),
        t_min: f64,
        t_max: f64,
    ) -> QuadratureResult {
        let mut evaluations = 0usize;
        let mut finite = true;
        let mut eval_at = |t: f64| -> f64 {
            let (x, w) = node(t);
            if w == 0.0 || !x.is_finite() {
                return 0.0;
            }
            evaluations += 1;
            let fx = f(x);
            let c = fx * w;
            if !c.is_finite() {
                finite = false;
                return 0.0;
            }
            c
        };

        let mut h = INITIAL_STEP;
        let k_min = (t_min / h).ceil() as i64;
        let k_max = (t_max / h).floor() as i64;
        let mut sum = 0.0;
        for k in k_min..=k_max {
            sum += eval_at(k as f64 * h);
        }
        let mut estimate = sum * h;
        let mut error = f64::INFINITY;
        let mut converged = false;

        for level in 1..=self.max_levels {
            h *= 0.5;
            let mut t = t_min.div_euclid(2.0 * h) * 2.0 * h + h;
            if t < t_min {
                t += 2.0 * h;
            }
            let mut added = 0.0;
            while t <= t_max {
                added += eval_at(t);
                t += 2.0 * h;
            }
            sum += added;
            let next = sum * h;
            error = (next - estimate).abs();
            estimate = next;
            let target = self.abs_tol.max(self.rel_tol * estimate.abs());
            if level >= MIN_LEVELS && error <= target {
                converged = true;
                break;
            }
        }

        QuadratureResult {
            value: estimate,
            abs_error_estimate: error,
            evaluations: evaluations.max(1),
            converged: converged && finite,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_on_unit_interval() {
        let r = integrate_adaptive(|x| x * x, 0.0, 1.0, 1e-14);
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
        assert!(r.abs_error_estimate <= 1e-14);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn exponential_on_half_line() {
        let r = integrate_adaptive(|t| (-t).exp(), 0.0, f64::INFINITY, 1e-13);
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn damped_cubic_sine_vanishes() {
        // Γ(4) sin(π) / 2^2 = 0
        let r = integrate_adaptive(|t| t.powi(3) * (-t).exp() * t.sin(), 0.0, f64::INFINITY, 1e-11);
        assert!(r.converged, "{r:?}");
        assert!(r.value.abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn endpoint_singularity() {
        let r = Integrator::relative(1e-12).integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_and_negative_infinite_bounds() {
        let r = integrate_adaptive(|x| x * x, 1.0, 0.0, 1e-14);
        assert!((r.value + 1.0 / 3.0).abs() < 1e-14);
        let g = |x: f64| (-x * x / 2.0).exp();
        let full = Integrator::relative(1e-13).integrate(g, f64::NEG_INFINITY, f64::INFINITY);
        assert!((full.value - (2.0 * PI).sqrt()).abs() < 1e-12);
        let left = Integrator::relative(1e-13).integrate(g, f64::NEG_INFINITY, 0.0);
        assert!((left.value - (PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn nonfinite_integrand_is_flagged() {
        let r = integrate_adaptive(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, 1e-10);
        assert!(!r.converged);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let tight = Integrator {
            abs_tol: 0.0,
            rel_tol: 1e-300,
            max_levels: 4,
        };
        let r = tight.integrate(|x| (10.0 * x).sin().abs(), 0.0, 3.0);
        assert!(!r.converged);
    }
}

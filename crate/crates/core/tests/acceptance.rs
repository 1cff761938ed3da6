//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the report is always printed. The process fails on any failing
//! criterion that is not listed in `DOCUMENTED_DEVIATIONS`.

use glnmom::cli::figure1_table;
use glnmom::cli::output::Cell;
use glnmom::determinacy::{classify, classify_limit, krein_integral, krein_integral_direct, VerdictKind};
use glnmom::distributions::{gln_cdf, gln_pdf, power_transform, prize_moment, GlnParams, PrizeCompetitionParams};
use glnmom::moments::{moment_exists, moment_quadrature, moment_series, z_moment};
use glnmom::numerics::{integrate_oscillatory_extended, DoubleDouble};
use glnmom::sampling::{
    ks_critical_1pct, ks_statistic, ks_two_sample_critical_1pct, ks_two_sample_statistic, sample_gln,
    sample_gln_inverse, RngStream,
};
use glnmom::stieltjes::{kernel_moment_integral, sup_abs_h, verify_moment_equivalence, StieltjesMember};
use std::f64::consts::PI;
use std::time::Instant;

/// Criteria that cannot hold as stated; see the project notes.
/// 11: the r = 1.5 and lognormal densities cross at x ≈ 5.12, just past x = 5.
const DOCUMENTED_DEVIATIONS: &[u32] = &[11];

/// Id, name, runtime limit in seconds, check.
type Criterion = (u32, &'static str, f64, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn gln(mu: f64, sigma: f64, r: f64) -> GlnParams {
    GlnParams::new(mu, sigma, r).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn lognormal_reduction() -> Outcome {
    let p = gln(0.0, 1.0, 2.0);
    let mut worst = 0.0f64;
    for i in 0..500 {
        let x = (-7.0 + 14.0 * i as f64 / 499.0).exp();
        let ln = x.ln();
        let expected = (-0.5 * ln * ln).exp() / (x * (2.0 * PI).sqrt());
        worst = worst.max(rel(gln_pdf(&p, x).unwrap(), expected));
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max rel err {worst:.2e} over 500 log-spaced points (tol 1e-12)"),
    }
}

fn moment_oracle() -> Outcome {
    let p = gln(0.0, 1.0, 2.0);
    let mut worst_exact = 0.0f64;
    for k in 1..=5u32 {
        let expected = (f64::from(k * k) / 2.0).exp();
        worst_exact = worst_exact
            .max(rel(moment_series(&p, k).unwrap(), expected))
            .max(rel(moment_quadrature(&p, f64::from(k)).unwrap(), expected));
    }
    let mut worst_dual = 0.0f64;
    for &r in &[1.5, 3.0, 15.0] {
        let p = gln(0.0, 1.0, r);
        for k in 1..=5u32 {
            worst_dual = worst_dual.max(rel(moment_series(&p, k).unwrap(), moment_quadrature(&p, f64::from(k)).unwrap()));
        }
    }
    Outcome {
        pass: worst_exact <= 1e-9 && worst_dual <= 1e-8,
        detail: format!(
            "r=2 vs e^(k^2/2): {worst_exact:.2e} (tol 1e-9); series vs quadrature r in {{1.5,3,15}}: {worst_dual:.2e} (tol 1e-8)"
        ),
    }
}

fn log_laplace_partial() -> Outcome {
    let p = gln(0.0, 0.5, 1.0);
    let mut worst = 0.0f64;
    for &k in &[0.5, 1.0, 1.5, 1.9] {
        worst = worst.max(rel(moment_quadrature(&p, k).unwrap(), 1.0 / (1.0 - k * k / 4.0)));
    }
    let rejects = !moment_exists(&p, 2.0).unwrap().exists;
    Outcome {
        pass: worst <= 1e-8 && rejects,
        detail: format!("max rel err {worst:.2e} (tol 1e-8); k=2 rejected: {rejects}"),
    }
}

fn krein_witness() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for &r in &[1.1, 1.5, 2.0, 15.0] {
        let p = gln(0.0, 1.0, r);
        let k = krein_integral(&p, 1.0, 1e-7).unwrap();
        let d = krein_integral_direct(&p, 1.0).unwrap();
        let diff = rel(k.value, d.value);
        pass &= k.converged && d.converged && k.tail_bound < 1e-6 && diff <= 1e-6;
        parts.push(format!("r={r}: K={:.6e} dual diff {diff:.1e} tail {:.1e}", k.value, k.tail_bound));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn classifier_table() -> Outcome {
    let cases = [
        (gln(0.0, 1.0, 0.5), VerdictKind::NoMoments),
        (gln(0.0, 0.5, 1.0), VerdictKind::PartialMoments),
        (gln(0.0, 1.0, 1.45), VerdictKind::IndeterminateAllMomentsFinite),
        (gln(0.0, 1.0, 1.56), VerdictKind::IndeterminateAllMomentsFinite),
        (gln(0.0, 1.0, 15.0), VerdictKind::IndeterminateAllMomentsFinite),
    ];
    let mut pass = cases.iter().all(|(p, kind)| classify(p).kind == *kind);
    let range = classify(&gln(0.0, 0.5, 1.0)).moment_range.unwrap();
    pass &= range.lower == -2.0 && range.upper == 2.0 && !range.closed;
    pass &= classify_limit(&PrizeCompetitionParams::default()).kind == VerdictKind::DeterminateCompactSupport;
    Outcome {
        pass,
        detail: "r=0.5, r=1 (sigma=0.5, range (-2,2)), r=1.45, r=1.56, r=15, limit law".into(),
    }
}

fn stieltjes_certification() -> Outcome {
    let mut pass = true;
    let mut worst_residual = 0.0f64;
    let mut worst_mass = 0.0f64;
    let mut exact = true;
    for &r in &[1.5, 2.0, 3.0] {
        let p = gln(0.0, 1.0, r);
        let pert = sup_abs_h(&p).unwrap();
        for &eps in &[-1.0, 1.0] {
            let report = verify_moment_equivalence(&p, eps, 4, 1e-6).unwrap();
            pass &= report.all_passed;
            for c in &report.certificates {
                exact &= c.analytic_exact_zero;
                worst_residual = worst_residual.max(c.relative_residual);
            }
            let mass = StieltjesMember::new(pert, eps).unwrap().moment(0.0).unwrap();
            pass &= mass.converged;
            worst_mass = worst_mass.max((mass.value - 1.0).abs());
        }
    }
    pass &= exact && worst_mass <= 1e-7;
    Outcome {
        pass,
        detail: format!(
            "analytic terms exactly zero: {exact}; max numeric residual / moment {worst_residual:.2e} (tol 1e-6); max |mass - 1| {worst_mass:.2e} (tol 1e-7)"
        ),
    }
}

fn kernel_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut zeros = true;
    let mut converged = true;
    for n in 0..=15u32 {
        let closed = kernel_moment_integral(n);
        if n % 4 == 3 {
            zeros &= closed == 0.0;
        }
        let q = integrate_oscillatory_extended(|t: DoubleDouble| t.powi(n) * (-t).exp(), 4000, 1e-10);
        converged &= q.converged;
        worst = worst.max((q.value - closed).abs());
    }
    Outcome {
        pass: worst <= 1e-8 && zeros && converged,
        detail: format!("max abs diff {worst:.2e} for n=0..15 (tol 1e-8); exact zeros at n=3 mod 4: {zeros}"),
    }
}

fn sampler_fidelity() -> Outcome {
    let n = 100_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, &r) in [1.2, 2.0, 15.0].iter().enumerate() {
        let p = gln(0.0, 1.0, r);
        let draws = sample_gln(&p, &mut RngStream::new(2024 + i as u64), n);
        let d = ks_statistic(&draws, |x| gln_cdf(&p, x).unwrap());
        pass &= d < ks_critical_1pct(n);
        parts.push(format!("r={r}: D={d:.4}"));
    }
    let p = gln(0.0, 1.0, 2.0);
    let a = sample_gln(&p, &mut RngStream::new(7), n);
    let b = sample_gln_inverse(&p, &mut RngStream::new(8), n).unwrap();
    let d2 = ks_two_sample_statistic(&a, &b);
    pass &= d2 < ks_two_sample_critical_1pct(n, n);
    parts.push(format!(
        "mixture vs inverse D={d2:.4}; critical {:.4} / {:.4}",
        ks_critical_1pct(n),
        ks_two_sample_critical_1pct(n, n)
    ));
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn second_moment_of_log(r: f64, n: usize, seed: u64) -> (f64, f64) {
    let draws = sample_gln(&gln(0.0, 1.0, r), &mut RngStream::new(seed), n);
    let sq: Vec<f64> = draws.iter().map(|x| x.ln().powi(2)).collect();
    let mean = sq.iter().sum::<f64>() / n as f64;
    let var = sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn limit_law() -> Outcome {
    let z_worst = (1..=4).map(|k| (z_moment(1e6, f64::from(k)).unwrap() - 1.0).abs()).fold(0.0, f64::max);
    let prize = PrizeCompetitionParams::default();
    let prize_worst = (1..=3)
        .map(|k| {
            let k = f64::from(k);
            (prize_moment(&prize, k).unwrap() - k.sinh() / k).abs()
        })
        .fold(0.0, f64::max);
    // uniform limit E[U²] = 1/3; at r = 200 the exact value is z_moment(200, 2)/3
    let (m, se) = second_moment_of_log(200.0, 1_000, 31);
    let uniform_ok = (m - 1.0 / 3.0).abs() <= 4.0 * se;
    let exact = z_moment(200.0, 2.0).unwrap() / 3.0;
    let (m_big, se_big) = second_moment_of_log(200.0, 100_000, 32);
    let exact_ok = (m_big - exact).abs() <= 4.0 * se_big;
    Outcome {
        pass: z_worst <= 1e-4 && prize_worst <= 1e-10 && uniform_ok && exact_ok,
        detail: format!(
            "z_moment(1e6) max dev {z_worst:.1e}; prize max dev {prize_worst:.1e}; E[(ln X)^2] n=1e3: {m:.4} vs 1/3 ({:.2} se); n=1e5: {m_big:.5} vs exact finite-r {exact:.5} ({:.2} se)",
            (m - 1.0 / 3.0).abs() / se,
            (m_big - exact).abs() / se_big
        ),
    }
}

fn power_closure() -> Outcome {
    let p = gln(0.3, 0.8, 1.7);
    let mut worst = 0.0f64;
    let mut ks_ok = true;
    let n = 20_000;
    for (i, &a) in [0.5, 2.0, 3.0].iter().enumerate() {
        let q = power_transform(&p, a).unwrap();
        for j in 0..400 {
            let x = (-3.0 + 6.0 * j as f64 / 399.0).exp();
            let y = x.powf(1.0 / a);
            let expected = gln_pdf(&p, y).unwrap() * y / (a * x);
            worst = worst.max((gln_pdf(&q, x).unwrap() - expected).abs());
        }
        let powered: Vec<f64> = sample_gln(&p, &mut RngStream::new(500 + i as u64), n)
            .into_iter()
            .map(|x| x.powf(a))
            .collect();
        let direct = sample_gln(&q, &mut RngStream::new(600 + i as u64), n);
        ks_ok &= ks_two_sample_statistic(&powered, &direct) < ks_two_sample_critical_1pct(n, n);
    }
    Outcome {
        pass: worst <= 1e-12 && ks_ok,
        detail: format!("max abs pdf diff {worst:.2e} (tol 1e-12); two-sample KS at 1%: {ks_ok}"),
    }
}

fn figure_replication() -> Outcome {
    let t = figure1_table();
    let cols: Vec<Vec<f64>> = (0..4)
        .map(|c| {
            t.rows
                .iter()
                .map(|r| match r[c] {
                    Cell::Num(v) => v,
                    _ => f64::NAN,
                })
                .collect()
        })
        .collect();
    let xs = &cols[0];
    let i5 = xs.iter().position(|&x| (x - 5.0).abs() < 0.005).unwrap_or(0);
    let at = |c: usize| {
        // linear interpolation to x = 5 between neighbouring grid points
        let (x0, x1) = (xs[i5], xs[i5 + 1]);
        let w = (5.0 - x0) / (x1 - x0);
        cols[c][i5] * (1.0 - w) + cols[c][i5 + 1] * w
    };
    let p = |r: f64| gln(0.0, 1.0, r);
    let exact = |r: f64| gln_pdf(&p(r), 5.0).unwrap();
    let (v15, v150, v2) = (at(1), at(2), at(3));
    let heavier = v15 > v2;
    let lighter = v2 > v150;
    let mut mass_ok = true;
    let mut masses = Vec::new();
    for (c, r) in [(1, 1.5), (2, 15.0), (3, 2.0)] {
        let trap: f64 = (1..xs.len())
            .map(|i| 0.5 * (cols[c][i] + cols[c][i - 1]) * (xs[i] - xs[i - 1]))
            .sum();
        let outside = gln_cdf(&p(r), xs[0]).unwrap() + 1.0 - gln_cdf(&p(r), *xs.last().unwrap()).unwrap();
        let total = trap + outside;
        mass_ok &= (total - 1.0).abs() <= 1e-3;
        masses.push(format!("{total:.5}"));
    }
    Outcome {
        pass: heavier && lighter && mass_ok,
        detail: format!(
            "x=5: r=1.5 {:.6e} > r=2 {:.6e}: {heavier}; r=2 > r=15 {:.3e}: {lighter}; masses {} (tol 1e-3)",
            exact(1.5),
            exact(2.0),
            exact(15.0),
            masses.join(", ")
        ),
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "lognormal reduction", 1.0, lognormal_reduction),
        (2, "moment oracle", 5.0, moment_oracle),
        (3, "log-Laplace partial moments", 2.0, log_laplace_partial),
        (4, "Krein finiteness witness", 10.0, krein_witness),
        (5, "classifier truth table", 5.0, classifier_table),
        (6, "Stieltjes certification", 30.0, stieltjes_certification),
        (7, "kernel identity", 5.0, kernel_identity),
        (8, "sampler fidelity", 20.0, sampler_fidelity),
        (9, "limit law", 10.0, limit_law),
        (10, "power closure", 10.0, power_closure),
        (11, "figure replication", 2.0, figure_replication),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (id, name, limit, check) in &criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let ok = outcome.pass && secs < *limit;
        let status = if ok {
            passed += 1;
            "PASS".to_string()
        } else if DOCUMENTED_DEVIATIONS.contains(id) {
            "FAIL (documented deviation)".to_string()
        } else {
            unexpected += 1;
            "FAIL".to_string()
        };
        println!(
            "[{status}] criterion {id:>2} {name}: {}; {secs:.2} s (limit {limit} s)",
            outcome.detail
        );
    }
    println!("acceptance: {passed}/{} passed, {unexpected} unexpected failures", criteria.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}

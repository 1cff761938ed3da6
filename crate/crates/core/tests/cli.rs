use serde_json::Value;
use std::f64::consts::PI;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glnmom")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses a CSV body into its header and numeric-or-text rows.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn lognormal_pdf_column() {
    let out = run(&["eval", "pdf", "--grid", "0.1:10:50:log", "--precision", "17"]);
    assert!(out.status.success());
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(header, ["x", "pdf"]);
    assert_eq!(rows.len(), 50);
    for (x, f) in col(&rows, 0).into_iter().zip(col(&rows, 1)) {
        let expected = (-0.5 * x.ln().powi(2)).exp() / (x * (2.0 * PI).sqrt());
        assert!(((f - expected) / expected).abs() < 1e-12, "x={x}");
    }
}

#[test]
fn quantile_is_monotone_and_inverts_cdf() {
    let out = run(&["eval", "quantile", "--r", "1.5", "--grid", "0.001:0.999:40", "--precision", "17"]);
    assert!(out.status.success());
    let (_, rows) = csv(&stdout(&out));
    let q = col(&rows, 1);
    assert!(q.windows(2).all(|w| w[0] < w[1]));

    let grid = format!("{}:{}:2", q[5], q[30]);
    let out = run(&["eval", "cdf", "--r", "1.5", "--grid", &grid, "--precision", "17"]);
    let (_, back) = csv(&stdout(&out));
    let p = col(&rows, 0);
    let f = col(&back, 1);
    assert!((f[0] - p[5]).abs() < 1e-8);
    assert!((f[1] - p[30]).abs() < 1e-8);
}

#[test]
fn sampling_is_reproducible() {
    for sampler in ["mixture", "inverse"] {
        let a = run(&["sample", "--n", "200", "--seed", "11", "--sampler", sampler]);
        let b = run(&["sample", "--n", "200", "--seed", "11", "--sampler", sampler]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(stdout(&a).lines().count(), 201);
    }
    let c = run(&["sample", "--n", "200", "--seed", "12"]);
    assert_ne!(run(&["sample", "--n", "200", "--seed", "11"]).stdout, c.stdout);
}

#[test]
fn empty_sample_has_header_only() {
    let out = run(&["sample", "--n", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "x\n");
}

#[test]
fn missing_moments_are_reported() {
    let out = run(&["moments", "--r", "0.5", "--k", "1,2"]);
    assert!(out.status.success());
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(header, ["k", "exists", "value", "method", "reason"]);
    for row in rows {
        assert_eq!(row[1], "false");
        assert_eq!(row[2], "does-not-exist");
        assert_eq!(row[4], "r-below-one");
    }
}

#[test]
fn moment_methods_agree() {
    let get = |method| {
        let out = run(&["moments", "--r", "3", "--k", "1,2,3", "--method", method, "--precision", "17"]);
        assert!(out.status.success());
        col(&csv(&stdout(&out)).1, 2)
    };
    let (s, q) = (get("series"), get("quadrature"));
    for (a, b) in s.iter().zip(&q) {
        assert!(((a - b) / a).abs() < 1e-8);
    }
}

#[test]
fn classify_verdicts() {
    let json = |args: &[&str]| -> Value { serde_json::from_slice(&run(args).stdout).unwrap() };
    let v = json(&["classify", "--r", "1.45"]);
    assert_eq!(v["kind"], "indeterminate-all-moments-finite");
    assert_eq!(v["witnessed"], true);
    assert_eq!(v["mgf_exists"], false);
    assert!(v["krein"]["value"].as_f64().unwrap().is_finite());

    let v = json(&["classify", "--r", "0.8"]);
    assert_eq!(v["kind"], "no-moments");
    assert_eq!(v["moment_range"]["closed"], true);

    let v = json(&["classify", "--limit"]);
    assert_eq!(v["kind"], "determinate-compact-support");
    assert_eq!(v["mgf_exists"], true);
}

#[test]
fn stieltjes_members() {
    let out = run(&["stieltjes", "--eps", "0", "--grid", "0.2:5:20", "--precision", "17"]);
    assert!(out.status.success());
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(header, ["x", "pdf", "perturbation", "member_pdf"]);
    assert_eq!(col(&rows, 1), col(&rows, 3));

    let out = run(&["stieltjes", "--r", "1.5", "--eps", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["all_passed"], true);
    assert_eq!(v["report"]["certificates"].as_array().unwrap().len(), 5);

    assert_eq!(run(&["stieltjes", "--eps", "1.5"]).status.code(), Some(2));
}

#[test]
fn figure_columns() {
    let out = run(&["figure1"]);
    assert!(out.status.success());
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(header, ["x", "pdf_r1.5", "pdf_r15", "pdf_r2"]);
    assert_eq!(rows.len(), 600);
}

#[test]
fn json_errors_on_stderr() {
    let out = run(&["stieltjes", "--r", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "precondition");

    let out = run(&["eval", "pdf", "--sigma", "-1", "--grid", "1:2:2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

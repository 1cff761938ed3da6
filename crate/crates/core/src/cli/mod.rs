//! `glnmom <command> [flags]`: plot-ready tables and reports for every
//! capability of the library.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 numerical
//! non-convergence (or a failed certificate). With `--format json`, errors
//! are also reported as a JSON object on stderr. Output is never colored.

pub mod output;

use crate::determinacy::{classify, classify_limit};
use crate::distributions::{
    ged_cdf, ged_pdf, ged_quantile, gln_cdf, gln_pdf, gln_quantile, GlnParams, PrizeCompetitionParams,
};
use crate::moments::{moment, moment_exists, MethodChoice, MomentMethod};
use crate::sampling::{sample_gln_inverse, sample_gln_parallel, RngStream};
use crate::stieltjes::{member_pdf, perturbation_value, sup_abs_h, verify_moment_equivalence, StieltjesMember};
use crate::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{flatten_json, round_json, Cell, Format, Table};
use serde_json::{json, Value};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "glnmom", version, about = "Generalized lognormal distributions: densities, sampling, moments, determinacy and Stieltjes classes")]
#[command(after_help = "Parameterization: ln X has density C exp(-|y - mu|^r / (r sigma^r)), C = 1/(2 r^(1/r) sigma Gamma(1 + 1/r)); r = 2 is the lognormal.\nExit codes: 0 ok, 2 usage/domain error, 3 numerical non-convergence.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// r = 2
    Lognormal,
    /// r = 1.5
    #[value(name = "figure1-a")]
    Figure1A,
    /// r = 15
    #[value(name = "figure1-b")]
    Figure1B,
    /// r = 1.56, a typical EGARCH innovation fit
    NelsonEgarch,
    /// r = 1.45, a typical fit to financial returns
    Brunazzo,
}

impl Preset {
    fn r(self) -> f64 {
        match self {
            Preset::Lognormal => 2.0,
            Preset::Figure1A => 1.5,
            Preset::Figure1B => 15.0,
            Preset::NelsonEgarch => 1.56,
            Preset::Brunazzo => 1.45,
        }
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Location of ln X [default: 0]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Scale of ln X [default: 1]
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Shape (tail order) [default: 2, or the preset's value]
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Named parameter set; explicit --mu/--sigma/--r override it
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
}

impl ParamArgs {
    fn mu(&self) -> f64 {
        self.mu.unwrap_or(0.0)
    }

    fn sigma(&self) -> f64 {
        self.sigma.unwrap_or(1.0)
    }

    fn gln(&self) -> Result<GlnParams, Error> {
        let r = self.r.or(self.preset.map(Preset::r)).unwrap_or(2.0);
        GlnParams::new(self.mu(), self.sigma(), r)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format [default: csv; json for classify]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Significant digits for numbers
    #[arg(long, global = true, default_value_t = 12)]
    pub precision: usize,
    /// Write to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// `min:max:count[:log]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == n {
                    return self.max;
                }
                let f = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.min.ln() + (self.max.ln() - self.min.ln()) * f).exp()
                } else {
                    self.min + (self.max - self.min) * f
                }
            })
            .collect()
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(format!("expected min:max:count[:log], got '{s}'"));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number '{t}': {e}"));
    let (min, max) = (num(parts[0])?, num(parts[1])?);
    let count = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("bad count '{}': {e}", parts[2]))?;
    let log = match parts.get(3).map(|t| t.trim()) {
        None | Some("lin") => false,
        Some("log") => true,
        Some(other) => return Err(format!("grid spacing must be 'log' or 'lin', got '{other}'")),
    };
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(format!("grid bounds must be finite with min <= max, got {min}:{max}"));
    }
    if count == 0 {
        return Err("grid count must be >= 1".into());
    }
    if log && min <= 0.0 {
        return Err(format!("log grid needs min > 0, got {min}"));
    }
    Ok(Grid { min, max, count, log })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalKind {
    Pdf,
    Cdf,
    Quantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Gln,
    Ged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    Mixture,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Series,
    Quadrature,
    Auto,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density, distribution function or quantile on a grid
    Eval {
        #[arg(value_enum)]
        kind: EvalKind,
        #[arg(long, value_enum, default_value_t = Family::Gln)]
        family: Family,
        /// min:max:count[:log]; probabilities for quantile
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Option<Grid>,
    },
    /// Densities for r = 1.5, 15 and 2 (mu = 0, sigma = 1) on [0.01, 6]
    Figure1,
    /// Random draws, one per row
    Sample {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Sampler::Mixture)]
        sampler: Sampler,
    },
    /// Moments E[X^k] with existence verdicts
    Moments {
        /// Comma-separated orders
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1,2,3,4")]
        k: Vec<f64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Moment determinacy verdict with its numerical witness
    Classify {
        /// Classify the compact-support limit law (r → ∞) instead
        #[arg(long)]
        limit: bool,
    },
    /// Member density of a Stieltjes class and moment-equivalence certificates
    Stieltjes {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        /// Relative tolerance of the numeric certificate
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_parser = parse_grid)]
        grid: Option<Grid>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Uncertified(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::NonConvergence(_)) | CliError::Uncertified(_) => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Lib(Error::Domain(_)) => "domain",
            CliError::Lib(Error::Precondition(_)) => "precondition",
            CliError::Lib(Error::NonConvergence(_)) => "non-convergence",
            CliError::Io(_) => "io",
            CliError::Uncertified(_) => "uncertified",
        }
    }
}

enum Report {
    Table(Table),
    Json(Value),
    Tables(Vec<Table>, Value),
}

fn eval_table(params: &ParamArgs, kind: EvalKind, family: Family, grid: Option<Grid>) -> Result<Table, CliError> {
    let p = params.gln()?;
    let g = p.ged();
    let grid = grid.unwrap_or(match (kind, family) {
        (EvalKind::Quantile, _) => Grid { min: 0.01, max: 0.99, count: 99, log: false },
        (_, Family::Gln) => Grid { min: 0.01, max: 6.0, count: 600, log: false },
        (_, Family::Ged) => Grid {
            min: p.mu() - 5.0 * p.sigma(),
            max: p.mu() + 5.0 * p.sigma(),
            count: 201,
            log: false,
        },
    });
    let (input, name) = match kind {
        EvalKind::Pdf => (if family == Family::Gln { "x" } else { "y" }, "pdf"),
        EvalKind::Cdf => (if family == Family::Gln { "x" } else { "y" }, "cdf"),
        EvalKind::Quantile => ("q", "quantile"),
    };
    let mut t = Table::new([input, name]);
    for v in grid.points() {
        let value = match (kind, family) {
            (EvalKind::Pdf, Family::Gln) => gln_pdf(&p, v)?,
            (EvalKind::Cdf, Family::Gln) => gln_cdf(&p, v)?,
            (EvalKind::Quantile, Family::Gln) => gln_quantile(&p, v)?,
            (EvalKind::Pdf, Family::Ged) => ged_pdf(&g, v)?,
            (EvalKind::Cdf, Family::Ged) => ged_cdf(&g, v)?,
            (EvalKind::Quantile, Family::Ged) => ged_quantile(&g, v)?,
        };
        t.push(vec![Cell::Num(v), Cell::Num(value)]);
    }
    Ok(t)
}

/// The three densities of the comparison figure on a shared grid.
pub fn figure1_table() -> Table {
    let shapes = [1.5, 15.0, 2.0];
    let params: Vec<GlnParams> = shapes
        .iter()
        .map(|&r| GlnParams::new(0.0, 1.0, r).expect("valid shape"))
        .collect();
    let mut t = Table::new(["x", "pdf_r1.5", "pdf_r15", "pdf_r2"]);
    let grid = Grid { min: 0.01, max: 6.0, count: 600, log: false };
    for x in grid.points() {
        let mut row = vec![Cell::Num(x)];
        row.extend(params.iter().map(|p| Cell::Num(gln_pdf(p, x).expect("x > 0"))));
        t.push(row);
    }
    t
}

fn sample_table(params: &ParamArgs, n: usize, seed: u64, sampler: Sampler) -> Result<Table, CliError> {
    let p = params.gln()?;
    let draws = match sampler {
        Sampler::Mixture => {
            let threads = std::thread::available_parallelism().map_or(1, |t| t.get());
            sample_gln_parallel(&p, seed, n, threads)
        }
        Sampler::Inverse => sample_gln_inverse(&p, &mut RngStream::new(seed), n)?,
    };
    let mut t = Table::new(["x"]);
    for x in draws {
        t.push(vec![Cell::Num(x)]);
    }
    Ok(t)
}

fn moments_table(params: &ParamArgs, ks: &[f64], method: MethodArg) -> Result<Table, CliError> {
    let p = params.gln()?;
    let choice = match method {
        MethodArg::Series => MethodChoice::Series,
        MethodArg::Quadrature => MethodChoice::Quadrature,
        MethodArg::Auto => MethodChoice::Auto,
    };
    let mut t = Table::new(["k", "exists", "value", "method", "reason"]);
    for &k in ks {
        let verdict = moment_exists(&p, k)?;
        let reason = serde_json::to_value(verdict.reason)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default();
        let (value, used) = if verdict.exists {
            let m = moment(&p, k, choice)?;
            let used = match m.method {
                MomentMethod::Series => "series",
                MomentMethod::Quadrature => "quadrature",
            };
            (Cell::Num(m.value), used)
        } else {
            (Cell::Text("does-not-exist".into()), "")
        };
        t.push(vec![Cell::Num(k), Cell::Bool(verdict.exists), value, Cell::Text(used.into()), Cell::Text(reason)]);
    }
    Ok(t)
}

fn classify_report(params: &ParamArgs, limit: bool) -> Result<Value, CliError> {
    if limit {
        let p = PrizeCompetitionParams::new(params.mu(), params.sigma())?;
        let mut v = serde_json::to_value(classify_limit(&p)).expect("serializable verdict");
        v["params"] = json!({ "mu": p.mu(), "sigma": p.sigma(), "r": "inf" });
        return Ok(v);
    }
    let p = params.gln()?;
    let mut v = serde_json::to_value(classify(&p)).expect("serializable verdict");
    v["params"] = json!({ "mu": p.mu(), "sigma": p.sigma(), "r": p.r() });
    Ok(v)
}

fn stieltjes_report(
    params: &ParamArgs,
    eps: f64,
    kmax: u32,
    tol: f64,
    grid: Option<Grid>,
) -> Result<(Table, Table, Value, bool), CliError> {
    let p = params.gln()?;
    if p.r() <= 1.0 {
        return Err(Error::Precondition(format!(
            "no Stieltjes class constructed for r <= 1 (got r = {}); moments of every order exist only for r > 1",
            p.r()
        ))
        .into());
    }
    let pert = sup_abs_h(&p)?;
    let member = StieltjesMember::new(pert, eps)?;
    let grid = grid.unwrap_or(Grid {
        min: 0.01,
        max: pert.argmax_x() * 20.0,
        count: 400,
        log: true,
    });
    let mut members = Table::new(["x", "pdf", "perturbation", "member_pdf"]);
    for x in grid.points() {
        members.push(vec![
            Cell::Num(x),
            Cell::Num(gln_pdf(&p, x)?),
            Cell::Num(perturbation_value(&pert, x)),
            Cell::Num(member_pdf(&member, x)?),
        ]);
    }
    let report = verify_moment_equivalence(&p, eps, kmax, tol)?;
    let mut certs = Table::new([
        "k",
        "analytic_exact_zero",
        "numeric_value",
        "numeric_error_estimate",
        "moment",
        "relative_residual",
        "passed",
    ]);
    for c in &report.certificates {
        certs.push(vec![
            Cell::Int(i64::from(c.k)),
            Cell::Bool(c.analytic_exact_zero),
            Cell::Num(c.numeric_value),
            Cell::Num(c.numeric_error_estimate),
            c.moment.map_or(Cell::Text(String::new()), Cell::Num),
            Cell::Num(c.relative_residual),
            Cell::Bool(c.passed),
        ]);
    }
    let value = serde_json::to_value(&report).expect("serializable report");
    let passed = report.all_passed;
    Ok((members, certs, value, passed))
}

fn build(cli: &Cli) -> Result<(Report, Option<CliError>), CliError> {
    let params = &cli.params;
    Ok(match &cli.command {
        Command::Eval { kind, family, grid } => (Report::Table(eval_table(params, *kind, *family, *grid)?), None),
        Command::Figure1 => (Report::Table(figure1_table()), None),
        Command::Sample { n, seed, sampler } => (Report::Table(sample_table(params, *n, *seed, *sampler)?), None),
        Command::Moments { k, method } => (Report::Table(moments_table(params, k, *method)?), None),
        Command::Classify { limit } => (Report::Json(classify_report(params, *limit)?), None),
        Command::Stieltjes { eps, kmax, tol, grid } => {
            let (members, certs, report, passed) = stieltjes_report(params, *eps, *kmax, *tol, *grid)?;
            let failure = (!passed).then(|| CliError::Uncertified("moment-equivalence certificate failed".into()));
            (Report::Tables(vec![members, certs], report), failure)
        }
    })
}

fn write_report(report: &Report, format: Format, precision: usize, out: &mut dyn Write) -> io::Result<()> {
    match (report, format) {
        (Report::Table(t), Format::Csv) => t.write_csv(out, precision),
        (Report::Table(t), Format::Json) => writeln!(out, "{}", serde_json::to_string_pretty(&t.to_json(precision))?),
        (Report::Json(v), Format::Json) => {
            writeln!(out, "{}", serde_json::to_string_pretty(&round_json(v.clone(), precision))?)
        }
        (Report::Json(v), Format::Csv) => flatten_json(v).write_csv(out, precision),
        (Report::Tables(tables, _), Format::Csv) => {
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                t.write_csv(out, precision)?;
            }
            Ok(())
        }
        (Report::Tables(tables, v), Format::Json) => {
            let doc = json!({
                "members": tables[0].to_json(precision),
                "report": round_json(v.clone(), precision),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)
        }
    }
}

/// Runs a parsed command line, writing the result to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (report, failure) = build(cli)?;
    let default_format = match cli.command {
        Command::Classify { .. } => Format::Json,
        _ => Format::Csv,
    };
    let format = cli.output.format.unwrap_or(default_format);
    let mut out: Box<dyn Write> = match &cli.output.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let written = write_report(&report, format, cli.output.precision, &mut *out).and_then(|_| out.flush());
    match written {
        // a closed downstream pipe (e.g. `| head`) is not an error
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => return Ok(()),
        other => other?,
    }
    failure.map_or(Ok(()), Err)
}

/// Parses the process arguments, runs, reports errors, and returns the exit code.
pub fn main_exit_code() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            if cli.output.format == Some(Format::Json) {
                eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}

//! Command-line front end.
//!
//! Every report is a JSON object `{"schema", "command", "config", "result"}`
//! or, with `--format csv`, a CSV table preceded by `#` lines carrying the
//! same schema, command and config. Failures other than usage errors are
//! reported as `{"schema", "command", "config", "error"}` with exit code 1.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dioph::Precision;
use crate::error::Error;
use crate::gallery::{GalleryFunction, REGISTRY};
use crate::limitset::{
    estimate_cord_set, estimate_secant_set, predict_exp, predict_poly, solve_cord_target, ExpOptions,
    SamplingBudget, Side,
};
use crate::quotient::QuotientEngine;
use crate::seqgen::DecaySequence;
use crate::verify::{self, Suite, VerifyConfig};

pub const SCHEMA: &str = "seqderiv/1";

/// What the binary writes and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "seqderiv", version, about = "Sequential secant and cord derivatives")]
struct Cli {
    /// Output format (default: csv for verify, json otherwise).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the gallery, or describe one function.
    Gallery {
        #[arg(long = "fn")]
        function: Option<String>,
    },
    /// Evaluate a gallery function.
    #[command(allow_negative_numbers = true)]
    Eval {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        x: f64,
    },
    /// Newton (or, with --k-seq, cord) quotients along sequences.
    #[command(allow_negative_numbers = true)]
    Trace(TraceArgs),
    /// Estimate the set of sequential secant derivatives.
    #[command(name = "secant-set", allow_negative_numbers = true)]
    SecantSet {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "both")]
        side: String,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Estimate the set of sequential cord derivatives.
    #[command(name = "cord-set", allow_negative_numbers = true)]
    CordSet {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Predicted cord limits for polynomially decaying sequences.
    #[command(name = "predict-poly", allow_negative_numbers = true)]
    PredictPoly(PolyArgs),
    /// Predicted cord limits for exponentially decaying sequences.
    #[command(name = "predict-exp", allow_negative_numbers = true)]
    PredictExp(ExpArgs),
    /// Find steps (h, k) whose cord quotient hits a target.
    #[command(name = "solve-target", allow_negative_numbers = true)]
    SolveTarget {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run check suites.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
struct PointArgs {
    #[arg(long = "fn")]
    #[serde(rename = "fn")]
    function: String,
    #[arg(long, default_value_t = 0.0)]
    x: f64,
}

#[derive(Debug, Args, Serialize)]
struct TraceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    point: PointArgs,
    #[arg(long = "h-seq")]
    h_seq: String,
    #[arg(long = "k-seq")]
    k_seq: Option<String>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long = "infinity-threshold", default_value_t = crate::quotient::DEFAULT_INFINITY_THRESHOLD)]
    infinity_threshold: f64,
}

#[derive(Debug, Args, Serialize)]
struct SamplingArgs {
    #[arg(long, default_value_t = 20_000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "cluster-tol", default_value_t = 1e-3)]
    cluster_tol: f64,
    #[arg(long = "infinity-threshold", default_value_t = crate::quotient::DEFAULT_INFINITY_THRESHOLD)]
    infinity_threshold: f64,
}

impl SamplingArgs {
    fn budget(&self) -> SamplingBudget {
        SamplingBudget {
            samples: self.budget,
            seed: self.seed,
            cluster_tol: self.cluster_tol,
            infinity_threshold: self.infinity_threshold,
            ..SamplingBudget::default()
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct PolyArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    #[arg(long)]
    right: f64,
    #[arg(long)]
    left: f64,
    #[arg(long = "i-max", default_value_t = 20)]
    i_max: u32,
    #[arg(long = "j-max", default_value_t = 20)]
    j_max: u32,
    /// Margin excluded at both ends when measuring the largest gap.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
}

#[derive(Debug, Args, Serialize)]
struct ExpArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    right: f64,
    #[arg(long)]
    left: f64,
    #[arg(long = "t-min", default_value_t = -20)]
    t_min: i64,
    #[arg(long = "t-max", default_value_t = 20)]
    t_max: i64,
    /// Target limits needing witnesses; repeatable.
    #[arg(long = "target")]
    targets: Vec<f64>,
    /// Allowed distance between a witness's limit and its target.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long = "i-bound", default_value_t = crate::dioph::DEFAULT_I_BOUND)]
    i_bound: u64,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20_000)]
    budget: usize,
    /// Rate pair for the exponential-rate checks (both or neither).
    #[arg(long, requires = "b")]
    a: Option<f64>,
    #[arg(long, requires = "a")]
    b: Option<f64>,
    #[arg(long, default_value_t = 0.4)]
    target: f64,
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    schema: &'static str,
    command: &'a str,
    config: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<R>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorRecord>,
}

#[derive(Serialize)]
struct ErrorRecord {
    kind: &'static str,
    message: String,
}

#[derive(Serialize)]
struct WithPrecision<C: Serialize> {
    #[serde(flatten)]
    args: C,
    format: Format,
    precision: Precision,
}

/// A finished command: JSON result, CSV table, and whether it counts as a
/// failure (verify only).
struct Report {
    json: serde_json::Value,
    csv: String,
    failed: bool,
}

impl Report {
    fn ok<R: Serialize>(result: &R, csv: String) -> Result<Self, Error> {
        let json = serde_json::to_value(result).map_err(|e| Error::Param(format!("serialization: {e}")))?;
        Ok(Self { json, csv, failed: false })
    }
}

fn usage(message: impl std::fmt::Display) -> Outcome {
    Outcome { stdout: String::new(), stderr: format!("error: {message}\n"), code: 2 }
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::Parse(_) | Error::Param(_) | Error::InvalidMap(_))
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidSet(_) => "invalid_set",
        Error::EmptySet => "empty_set",
        Error::Index { .. } => "index",
        Error::Domain(_) => "domain",
        Error::Param(_) => "param",
        Error::InvalidMap(_) => "invalid_map",
        Error::InsufficientData(_) => "insufficient_data",
        Error::Bracket(_) => "bracket",
        Error::SearchFailure(_) => "search_failure",
        Error::Parse(_) => "parse",
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stdout: String::new(), stderr: text, code: 2 }
            } else {
                Outcome { stdout: text, stderr: String::new(), code: 0 }
            };
        }
    };
    let precision = match Precision::from_env() {
        Ok(p) => p,
        Err(e) => return usage(format!("{}: {e}", crate::dioph::PRECISION_ENV)),
    };
    let format = cli.format.unwrap_or(match cli.command {
        Command::Verify(_) => Format::Csv,
        _ => Format::Json,
    });
    let (name, config, report) = dispatch(&cli.command, precision);
    let config = WithPrecision { args: config, format, precision };
    let report = match report {
        Ok(r) => r,
        Err(e) if is_usage(&e) => return usage(e),
        Err(e) => {
            let record = ErrorRecord { kind: kind(&e), message: e.to_string() };
            let stdout = match format {
                Format::Json => json_line(&Envelope::<_, ()> {
                    schema: SCHEMA,
                    command: name,
                    config: &config,
                    result: None,
                    error: Some(record),
                }),
                Format::Csv => {
                    let mut w = csv_writer();
                    w.write_record(["kind", "message"]).expect("in-memory write");
                    w.write_record([record.kind, &record.message]).expect("in-memory write");
                    csv_header(name, &config) + &finish_csv(w)
                }
            };
            return Outcome { stdout, stderr: String::new(), code: 1 };
        }
    };
    let stdout = match format {
        Format::Json => json_line(&Envelope {
            schema: SCHEMA,
            command: name,
            config: &config,
            result: Some(&report.json),
            error: None,
        }),
        Format::Csv => csv_header(name, &config) + &report.csv,
    };
    Outcome { stdout, stderr: String::new(), code: u8::from(report.failed) }
}

fn json_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn csv_header<C: Serialize>(command: &str, config: &C) -> String {
    format!(
        "# schema={SCHEMA}\n# command={command}\n# config={}\n",
        serde_json::to_string(config).expect("configs serialize")
    )
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![])
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn parse_fn(spec: &str) -> Result<GalleryFunction, Error> {
    spec.parse()
}

fn parse_seq(spec: &str) -> Result<DecaySequence, Error> {
    spec.parse()
}

type Dispatched<'a> = (&'static str, serde_json::Value, Result<Report, Error>);

fn config_of<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("configs serialize")
}

fn dispatch(command: &Command, precision: Precision) -> Dispatched<'_> {
    match command {
        Command::Gallery { function } => {
            ("gallery", serde_json::json!({ "fn": function }), gallery(function.as_deref()))
        }
        Command::Eval { function, x } => ("eval", serde_json::json!({ "fn": function, "x": x }), eval(function, *x)),
        Command::Trace(a) => ("trace", config_of(a), trace(a)),
        Command::SecantSet { point, side, sampling } => {
            let cfg = serde_json::json!({ "fn": point.function, "x": point.x, "side": side, "sampling": config_of(sampling) });
            ("secant-set", cfg, secant_set(point, side, sampling))
        }
        Command::CordSet { point, sampling } => {
            let cfg = serde_json::json!({ "fn": point.function, "x": point.x, "sampling": config_of(sampling) });
            ("cord-set", cfg, cord_set(point, sampling))
        }
        Command::PredictPoly(a) => ("predict-poly", config_of(a), poly(a)),
        Command::PredictExp(a) => ("predict-exp", config_of(a), exp(a, precision)),
        Command::SolveTarget { point, target, tol } => {
            let cfg = serde_json::json!({ "fn": point.function, "x": point.x, "target": target, "tol": tol });
            ("solve-target", cfg, solve(point, *target, *tol))
        }
        Command::Verify(a) => ("verify", config_of(a), run_verify(a, precision)),
    }
}

fn gallery(function: Option<&str>) -> Result<Report, Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        name: &'a str,
        params: &'a str,
    }
    match function {
        None => {
            let entries: Vec<Entry> = REGISTRY.iter().map(|&(name, params)| Entry { name, params }).collect();
            let mut w = csv_writer();
            w.write_record(["name", "params"]).expect("in-memory write");
            for e in &entries {
                w.write_record([e.name, e.params]).expect("in-memory write");
            }
            Report::ok(&entries, finish_csv(w))
        }
        Some(spec) => {
            let f = parse_fn(spec)?;
            let mut w = csv_writer();
            w.write_record(["key", "value"]).expect("in-memory write");
            w.write_record(["name", f.name()]).expect("in-memory write");
            w.write_record(["continuous", &f.is_continuous().to_string()]).expect("in-memory write");
            for (k, v) in f.params() {
                w.write_record([k.as_str(), v.as_str()]).expect("in-memory write");
            }
            Report::ok(&f, finish_csv(w))
        }
    }
}

fn eval(spec: &str, x: f64) -> Result<Report, Error> {
    let f = parse_fn(spec)?;
    let value = f.eval(x)?;
    let mut w = csv_writer();
    w.write_record(["fn", "x", "value"]).expect("in-memory write");
    w.write_record([f.to_string(), x.to_string(), value.to_string()]).expect("in-memory write");
    Report::ok(&serde_json::json!({ "fn": f, "x": x, "value": value }), finish_csv(w))
}

fn trace(a: &TraceArgs) -> Result<Report, Error> {
    let f = parse_fn(&a.point.function)?;
    let h = parse_seq(&a.h_seq)?;
    let k = a.k_seq.as_deref().map(parse_seq).transpose()?;
    let t = QuotientEngine::new(a.infinity_threshold)?.trace(&f, a.point.x, &h, k.as_ref(), a.n)?;
    Report::ok(&t, t.to_csv())
}

fn secant_set(point: &PointArgs, side: &str, sampling: &SamplingArgs) -> Result<Report, Error> {
    let f = parse_fn(&point.function)?;
    let side: Side = side.parse()?;
    let e = estimate_secant_set(&f, point.x, side, &sampling.budget())?;
    Report::ok(&e, e.to_csv())
}

fn cord_set(point: &PointArgs, sampling: &SamplingArgs) -> Result<Report, Error> {
    let f = parse_fn(&point.function)?;
    let e = estimate_cord_set(&f, point.x, &sampling.budget())?;
    Report::ok(&e, e.to_csv())
}

fn poly(a: &PolyArgs) -> Result<Report, Error> {
    let p = predict_poly(a.a, a.b, a.m, a.right, a.left, a.i_max, a.j_max, a.delta)?;
    let mut w = csv_writer();
    w.write_record(["i", "j", "r", "limit"]).expect("in-memory write");
    for x in &p.weights {
        w.write_record([x.i.to_string(), x.j.to_string(), x.r.to_string(), x.limit.to_string()])
            .expect("in-memory write");
    }
    Report::ok(&p, finish_csv(w))
}

fn exp(a: &ExpArgs, precision: Precision) -> Result<Report, Error> {
    let opts =
        ExpOptions { targets: a.targets.clone(), limit_tol: a.tol, i_bound: a.i_bound, precision, ..ExpOptions::default() };
    let e = predict_exp(a.a, a.b, a.right, a.left, (a.t_min, a.t_max), &opts)?;
    Report::ok(&e, e.to_csv())
}

fn solve(point: &PointArgs, target: f64, tol: f64) -> Result<Report, Error> {
    let f = parse_fn(&point.function)?;
    let s = solve_cord_target(&f, point.x, target, tol)?;
    let mut w = csv_writer();
    w.write_record(["h", "k", "quotient", "iterations"]).expect("in-memory write");
    w.write_record([s.h.to_string(), s.k.to_string(), s.quotient.to_string(), s.iterations.to_string()])
        .expect("in-memory write");
    Report::ok(&s, finish_csv(w))
}

fn run_verify(a: &VerifyArgs, precision: Precision) -> Result<Report, Error> {
    let suite: Suite = a.suite.parse()?;
    let mut cfg = VerifyConfig { seed: a.seed, budget: a.budget, target: a.target, precision, ..VerifyConfig::default() };
    if let (Some(x), Some(y)) = (a.a, a.b) {
        cfg.exp_pairs = vec![(x, y)];
    }
    let report = verify::run(suite, &cfg)?;
    let mut r = Report::ok(&report, report.to_csv())?;
    r.failed = !report.passed;
    Ok(r)
}

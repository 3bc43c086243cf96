//! Check suites: each suite runs a fixed list of numerical checks and
//! reports one row per check. Reports depend only on the configuration, so
//! two runs with the same seed print the same bytes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dioph::{self, Alpha, Commensurability, Precision};
use crate::error::{Error, Result};
use crate::extreal::{excess, hausdorff, normalize, ClosedExtSet, Component, ExtReal};
use crate::gallery::GalleryFunction;
use crate::limitset::{
    estimate_cord_set, estimate_secant_set, gap_bound, predict_exp, predict_poly, solve_cord_target,
    subsequential_limits, Classification, ExpOptions, SamplingBudget, Side,
};
use crate::quotient::QuotientEngine;
use crate::seqgen::{subsequence, DecaySequence, IndexMap};

/// Tolerances and sizes of the individual checks.
pub mod limits {
    pub const SMOOTH_PAIRS: usize = 100;
    pub const SMOOTH_WINDOW: (f64, f64) = (1e-9, 1e-7);
    pub const SMOOTH_TOL: f64 = 1e-6;
    pub const TARGET_TOL: f64 = 1e-9;
    pub const ABS_HAUSDORFF: f64 = 0.02;
    pub const ENVELOPE_BUDGET: usize = 100_000;
    pub const ENVELOPE_HAUSDORFF: f64 = 0.05;
    pub const INCLUSION_TOL: f64 = 0.02;
    pub const POLY_INDEX_MAX: u32 = 400;
    pub const POLY_GAP_INDEX_MAX: u32 = 60;
    pub const POLY_LIMIT_TOL: f64 = 1e-3;
    pub const POLY_TRACE_LEN: usize = 200;
    pub const LATTICE_TOL: f64 = 1e-6;
    pub const LATTICE_GAP_MARGIN: f64 = 1e-3;
    pub const LATTICE_T_RANGE: (i64, i64) = (-60, 60);
    pub const WITNESS_I_BOUND: u64 = 10_000;
    pub const WITNESS_TOL: f64 = 1e-3;
    pub const WEIERSTRASS_DECADES: std::ops::RangeInclusive<i32> = 2..=7;
    pub const WEIERSTRASS_GRID: usize = 2000;
    pub const WEIERSTRASS_FLOOR: f64 = 100.0;
    pub const KERNEL_SETS: usize = 1000;
    pub const KERNEL_DECOMPOSITIONS: usize = 10_000;
    pub const KERNEL_ULPS: f64 = 4.0;
    pub const KERNEL_CF_DEPTH: usize = 12;
}

use limits::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Kernel,
    Smooth,
    Abs,
    Envelope,
    Inclusion,
    PolyRates,
    ExpRates,
    Weierstrass,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Kernel,
        Suite::Smooth,
        Suite::Abs,
        Suite::Envelope,
        Suite::Inclusion,
        Suite::PolyRates,
        Suite::ExpRates,
        Suite::Weierstrass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernel => "kernel",
            Suite::Smooth => "smooth",
            Suite::Abs => "abs",
            Suite::Envelope => "envelope",
            Suite::Inclusion => "inclusion",
            Suite::PolyRates => "poly-rates",
            Suite::ExpRates => "exp-rates",
            Suite::Weierstrass => "weierstrass",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Samples for the limit-set estimates (the envelope check always uses
    /// [`limits::ENVELOPE_BUDGET`]).
    pub budget: usize,
    /// Rate pairs `(a, b)` for the exponential-rate checks.
    pub exp_pairs: Vec<(f64, f64)>,
    /// Target limit for incommensurable rate pairs.
    pub target: f64,
    pub precision: Precision,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            budget: SamplingBudget::default().samples,
            exp_pairs: vec![(2.0, 4.0), (2.0, 3.0)],
            target: 0.4,
            precision: Precision::Extended,
        }
    }
}

/// One row of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub value: String,
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    /// `suite,check,status,value,bound` rows.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(["suite", "check", "status", "value", "bound"]).expect("in-memory write");
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "fail" };
            w.write_record([c.suite, &c.name, status, &c.value, &c.bound]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Runs `suite` (every suite, in order, for [`Suite::All`]).
pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.budget < crate::limitset::MIN_TRACE_LEN {
        return Err(Error::Param(format!("budget must be at least {}", crate::limitset::MIN_TRACE_LEN)));
    }
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut checks = vec![];
    for s in suites {
        checks.extend(run_one(s, cfg));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { suite, passed, checks })
}

fn run_one(suite: Suite, cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = Rows { suite: suite.name(), rows: vec![] };
    match suite {
        Suite::Kernel => kernel(&mut out, cfg),
        Suite::Smooth => smooth(&mut out, cfg),
        Suite::Abs => abs(&mut out, cfg),
        Suite::Envelope => envelope(&mut out, cfg),
        Suite::Inclusion => inclusion(&mut out, cfg),
        Suite::PolyRates => poly_rates(&mut out),
        Suite::ExpRates => exp_rates(&mut out, cfg),
        Suite::Weierstrass => weierstrass(&mut out),
        Suite::All => unreachable!("expanded by run"),
    }
    out.rows
}

struct Rows {
    suite: &'static str,
    rows: Vec<Check>,
}

impl Rows {
    fn push(&mut self, name: impl Into<String>, passed: bool, value: impl Into<String>, bound: impl Into<String>) {
        self.rows.push(Check {
            suite: self.suite,
            name: name.into(),
            passed,
            value: value.into(),
            bound: bound.into(),
        });
    }

    /// `value ≤ bound`.
    fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.push(name, value <= bound, sci(value), format!("<= {}", sci(bound)));
    }

    fn error(&mut self, name: impl Into<String>, e: &Error) {
        self.push(name, false, format!("error: {e}"), "");
    }

    /// Records an error row and returns `None` on failure.
    fn ok<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        r.map_err(|e| self.error(name, &e)).ok()
    }
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

fn budget(cfg: &VerifyConfig, samples: usize) -> SamplingBudget {
    SamplingBudget::with_samples(samples, cfg.seed)
}

fn rng(cfg: &VerifyConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn kernel(out: &mut Rows, cfg: &VerifyConfig) {
    let mut r = rng(cfg, 1);
    let mut not_idempotent = 0;
    for _ in 0..KERNEL_SETS {
        let s = random_set(&mut r);
        let again = normalize(s.intervals().to_vec(), s.points().to_vec());
        if again.as_ref() != Ok(&s) {
            not_idempotent += 1;
        }
    }
    out.push("normalize idempotent", not_idempotent == 0, format!("{not_idempotent}/{KERNEL_SETS} violations"), "0");

    let mut violations = 0;
    for _ in 0..KERNEL_SETS {
        let (a, b, c) = (random_set(&mut r), random_set(&mut r), random_set(&mut r));
        let d = |x: &ClosedExtSet, y: &ClosedExtSet| hausdorff(x, y).expect("sets are non-empty");
        let (ab, ba, bc, ac) = (d(&a, &b), d(&b, &a), d(&b, &c), d(&a, &c));
        let ok = d(&a, &a) == 0.0 && ab >= 0.0 && ab == ba && ac <= ab + bc + 1e-12;
        violations += usize::from(!ok);
    }
    out.push("hausdorff metric axioms", violations == 0, format!("{violations}/{KERNEL_SETS} violations"), "0");

    let fns = [
        GalleryFunction::square(),
        GalleryFunction::sine(),
        GalleryFunction::cube(),
        GalleryFunction::abs(),
        GalleryFunction::glued_g(-1.0, 2.0, -3.0, 1.0).expect("valid parameters"),
    ];
    let eng = QuotientEngine::default();
    let mut worst = 0.0f64;
    for _ in 0..KERNEL_DECOMPOSITIONS {
        let f = &fns[r.gen_range(0..fns.len())];
        let x = r.gen_range(-0.5..0.5);
        let (h, k) = (log_uniform(&mut r, (1e-8, 0.1)), log_uniform(&mut r, (1e-8, 0.1)));
        match eng.decompose(f, x, h, k) {
            Ok(d) if d.magnitude() > 0.0 => {
                worst = worst.max((d.reconstructed() - d.cord).abs() / (f64::EPSILON * d.magnitude()));
            }
            Ok(d) => worst = worst.max(if d.reconstructed() == d.cord { 0.0 } else { f64::INFINITY }),
            Err(e) => return out.error("decomposition identity", &e),
        }
    }
    out.push(
        "decomposition identity",
        worst <= KERNEL_ULPS,
        format!("{worst:.3} eps*magnitude"),
        format!("<= {KERNEL_ULPS} eps*magnitude"),
    );

    let alphas = [
        ("ln2/ln3", Alpha::log_ratio(2.0, 3.0, cfg.precision)),
        ("ln2/ln5", Alpha::log_ratio(2.0, 5.0, cfg.precision)),
        ("sqrt2", Alpha::from_f64(std::f64::consts::SQRT_2)),
        ("pi", Alpha::from_f64(std::f64::consts::PI)),
    ];
    for (label, alpha) in alphas {
        let name = format!("convergents alternate ({label})");
        let Some(alpha) = out.ok(&name, alpha) else { continue };
        let Some(cf) = out.ok(&name, alpha.continued_fraction(KERNEL_CF_DEPTH)) else { continue };
        let scaled = alpha.scaled();
        let bad = dioph::convergents(&cf)
            .iter()
            .enumerate()
            .filter(|&(k, &(p, q))| {
                let lhs = BigUint::from(p) << 128u32;
                let rhs = BigUint::from(q) * &scaled;
                if k % 2 == 0 {
                    lhs > rhs
                } else {
                    lhs < rhs
                }
            })
            .count();
        out.push(name, bad == 0, format!("{bad}/{} out of order", cf.len()), "0");
    }
}

fn random_point(r: &mut ChaCha8Rng) -> ExtReal {
    match r.gen_range(0..20) {
        0 => ExtReal::NegInf,
        1 => ExtReal::PosInf,
        _ => ExtReal::Finite(r.gen_range(-10.0..10.0)),
    }
}

/// A non-empty canonical set with up to three intervals and three points.
fn random_set(r: &mut ChaCha8Rng) -> ClosedExtSet {
    loop {
        let intervals: Vec<(ExtReal, ExtReal)> = (0..r.gen_range(0..=3))
            .map(|_| {
                let (a, b) = (random_point(r), random_point(r));
                (a.min(b), a.max(b))
            })
            .collect();
        let points: Vec<ExtReal> = (0..r.gen_range(0..=3)).map(|_| random_point(r)).collect();
        let s = normalize(intervals, points).expect("intervals are ordered");
        if !s.is_empty() {
            return s;
        }
    }
}

fn smooth(out: &mut Rows, cfg: &VerifyConfig) {
    let mut r = rng(cfg, 2);
    let mut hs: Vec<f64> = (0..SMOOTH_PAIRS).map(|_| log_uniform(&mut r, SMOOTH_WINDOW)).collect();
    let mut ks: Vec<f64> = (0..SMOOTH_PAIRS).map(|_| log_uniform(&mut r, SMOOTH_WINDOW)).collect();
    hs.sort_by(|a, b| b.total_cmp(a));
    ks.sort_by(|a, b| b.total_cmp(a));
    let eng = QuotientEngine::default();
    let cases = [
        ("cord sin at 0.3", GalleryFunction::sine(), 0.3, 0.3f64.cos()),
        ("cord x^2 at 1", GalleryFunction::square(), 1.0, 2.0),
    ];
    for (name, f, x, expected) in cases {
        let mut worst = 0.0f64;
        for (&h, &k) in hs.iter().zip(&ks) {
            match eng.cord(&f, x, h, k) {
                Ok(q) => worst = worst.max((q.to_f64() - expected).abs()),
                Err(e) => {
                    out.error(name, &e);
                    return;
                }
            }
        }
        out.at_most(name, worst, SMOOTH_TOL);
    }
}

fn abs(out: &mut Rows, cfg: &VerifyConfig) {
    let f = GalleryFunction::abs();
    for i in -10..=10 {
        let target = i as f64 / 10.0;
        let name = format!("target cord K={target:.1}");
        if let Some(s) = out.ok(&name, solve_cord_target(&f, 0.0, target, TARGET_TOL)) {
            // Recompute the quotient from the returned steps.
            let q = QuotientEngine::default().cord(&f, 0.0, s.h, s.k).map(|q| q.to_f64());
            if let Some(q) = out.ok(&name, q) {
                out.at_most(name, (q - target).abs(), TARGET_TOL);
            }
        }
    }
    let expected = ClosedExtSet::interval((-1.0).into(), 1.0.into()).expect("ordered");
    if let Some(e) = out.ok("cord set", estimate_cord_set(&f, 0.0, &budget(cfg, cfg.budget))) {
        let d = hausdorff(&e.set, &expected).unwrap_or(f64::INFINITY);
        out.at_most(format!("cord set {} vs [-1, 1]", e.set), d, ABS_HAUSDORFF);
        class_row(out, "cord set classification", &e.classification, &Classification::ClosedInterval);
    }
}

fn class_row(out: &mut Rows, name: &str, got: &Classification, want: &Classification) {
    out.push(name, got == want, got.name(), want.name());
}

fn envelope(out: &mut Rows, cfg: &VerifyConfig) {
    let (a, b) = (-1.0, 2.0);
    let name = "right secant set of sine_envelope(-1, 2)";
    let Some(f) = out.ok(name, GalleryFunction::sine_envelope(a, b)) else { return };
    let est = estimate_secant_set(&f, 0.0, Side::Right, &budget(cfg, ENVELOPE_BUDGET));
    if let Some(e) = out.ok(name, est) {
        let expected = ClosedExtSet::interval(a.into(), b.into()).expect("ordered");
        let d = hausdorff(&e.set, &expected).unwrap_or(f64::INFINITY);
        out.at_most(format!("{name} vs [-1, 2]"), d, ENVELOPE_HAUSDORFF);
    }
}

/// Continuous gallery members defined on both sides of 0.
pub fn two_sided_continuous() -> Vec<GalleryFunction> {
    vec![
        GalleryFunction::abs(),
        GalleryFunction::glued_g(-1.0, 2.0, -3.0, 1.0).expect("valid parameters"),
        "weierstrass".parse().expect("registry default"),
        GalleryFunction::square(),
        GalleryFunction::sine(),
        GalleryFunction::cube(),
    ]
}

fn inclusion(out: &mut Rows, cfg: &VerifyConfig) {
    let b = budget(cfg, cfg.budget);
    for f in two_sided_continuous() {
        let name = format!("secant set within cord set ({f})");
        let pair = estimate_secant_set(&f, 0.0, Side::Both, &b).and_then(|s| Ok((s, estimate_cord_set(&f, 0.0, &b)?)));
        let Some((secant, cord)) = out.ok(&name, pair) else { continue };
        match excess(&secant.set, &cord.set) {
            Ok(d) => out.at_most(name, d, INCLUSION_TOL),
            Err(e) => out.error(name, &e),
        }
    }
}

fn poly_rates(out: &mut Rows) {
    let (a, b, m, right, left) = (1.0, 3.0, 2.0, 1.0, 0.0);
    let Some(p) = out.ok("weight at (1, 1)", predict_poly(a, b, m, right, left, POLY_INDEX_MAX, POLY_INDEX_MAX, 0.0))
    else {
        return;
    };
    let w11 = p.weights.iter().find(|w| (w.i, w.j) == (1, 1)).map_or(f64::NAN, |w| w.r);
    out.push("weight at (1, 1)", w11 == 0.75, w11.to_string(), "== 0.75");

    let n = POLY_INDEX_MAX as usize;
    let limit = |i: u32, j: u32| p.weights[(i as usize - 1) * n + (j as usize - 1)].limit;
    let mut worst = 0.0f64;
    for i in 1..=POLY_GAP_INDEX_MAX {
        for j in 1..POLY_GAP_INDEX_MAX {
            let gap = (limit(i, j + 1) - limit(i, j)).abs();
            worst = worst.max(gap / gap_bound(m, j, right, left));
        }
    }
    out.push(
        format!("consecutive-j gaps within |R-L|/(2j), i,j <= {POLY_GAP_INDEX_MAX}"),
        worst <= 1.0,
        format!("{worst:.6} of bound"),
        "<= 1",
    );

    let (Ok(h), Ok(k)) = (DecaySequence::power(m, a), DecaySequence::power(m, b)) else {
        return out.push("empirical limits", false, "sequence construction failed", "");
    };
    let f = GalleryFunction::discrete_two_slope(right, left, h.clone(), k.clone());
    let eng = QuotientEngine::default();
    for step in 3..=17 {
        let target = step as f64 * 0.05;
        let name = format!("empirical cord limit near K={target:.2}");
        let best = p
            .weights
            .iter()
            .min_by(|x, y| (x.limit - target).abs().total_cmp(&(y.limit - target).abs()))
            .expect("weights are non-empty");
        let trace = subsequence(&h, IndexMap::affine(best.i as usize, 0))
            .and_then(|hs| Ok((hs, subsequence(&k, IndexMap::affine(best.j as usize, 0))?)))
            .and_then(|(hs, ks)| eng.trace(&f, 0.0, &hs, Some(&ks), POLY_TRACE_LEN))
            .and_then(|t| subsequential_limits(&t, 0.5, 1e-9));
        let Some(limits) = out.ok(&name, trace) else { continue };
        let dist = limits
            .components()
            .iter()
            .flat_map(|c| [c.lo(), c.hi()])
            .map(|v| (v.to_f64() - target).abs())
            .fold(f64::INFINITY, f64::min);
        let single = limits.components().len() == 1;
        out.push(
            format!("{name} via (i, j) = ({}, {})", best.i, best.j),
            single && dist <= POLY_LIMIT_TOL,
            format!("{} ({})", sci(dist), limits),
            format!("<= {}", sci(POLY_LIMIT_TOL)),
        );
    }
}

fn exp_rates(out: &mut Rows, cfg: &VerifyConfig) {
    for &(a, b) in &cfg.exp_pairs {
        let label = format!("a={a}, b={b}");
        let Some(rel) = out.ok(&format!("commensurability ({label})"), dioph::rational_check(a, b, dioph::DEFAULT_EXP_BOUND))
        else {
            continue;
        };
        match rel {
            Commensurability::Rational { .. } => exp_lattice(out, cfg, a, b, &label),
            Commensurability::NoSmallRelation { .. } => exp_witness(out, cfg, a, b, &label),
        }
    }
}

fn exp_lattice(out: &mut Rows, cfg: &VerifyConfig, a: f64, b: f64, label: &str) {
    let name = format!("cord limits on the lattice ({label})");
    let (Ok(h), Ok(k)) = (DecaySequence::exponential(a), DecaySequence::exponential(b)) else {
        return out.push(name, false, "sequence construction failed", "");
    };
    let f = GalleryFunction::discrete_two_slope(1.0, 0.0, h, k);
    let opts = ExpOptions { precision: cfg.precision, ..ExpOptions::default() };
    let Some(pred) = out.ok(&name, predict_exp(a, b, 1.0, 0.0, LATTICE_T_RANGE, &opts)) else { return };
    let Some(est) = out.ok(&name, estimate_cord_set(&f, 0.0, &budget(cfg, cfg.budget))) else { return };
    let lattice: Vec<f64> = pred.set.points().iter().map(|p| p.to_f64()).collect();
    let nearest = |v: f64| lattice.iter().map(|p| (p - v).abs()).fold(f64::INFINITY, f64::min);
    let mut worst = 0.0f64;
    for c in est.set.components() {
        match c {
            Component::Point(p) => worst = worst.max(nearest(p.to_f64())),
            Component::Interval(lo, hi) => worst = worst.max(nearest(lo.to_f64())).max(nearest(hi.to_f64())),
        }
    }
    let found = est.set.components().len();
    out.push(
        format!("{name}, {found} limits"),
        found > 0 && worst <= LATTICE_TOL && est.set.intervals().is_empty(),
        sci(worst),
        format!("<= {}", sci(LATTICE_TOL)),
    );

    let mut sorted = lattice.clone();
    sorted.sort_by(f64::total_cmp);
    let inside = sorted
        .windows(2)
        .filter(|w| w[1] - w[0] > 2.0 * LATTICE_GAP_MARGIN)
        .map(|w| {
            let (lo, hi) = (w[0] + LATTICE_GAP_MARGIN, w[1] - LATTICE_GAP_MARGIN);
            est.set
                .components()
                .iter()
                .filter(|c| c.hi().to_f64() > lo && c.lo().to_f64() < hi)
                .count()
        })
        .sum::<usize>();
    out.push(format!("no limits inside lattice gaps ({label})"), inside == 0, format!("{inside} limits"), "0");
}

fn exp_witness(out: &mut Rows, cfg: &VerifyConfig, a: f64, b: f64, label: &str) {
    let name = format!("witness for K={} ({label})", cfg.target);
    let opts = ExpOptions {
        targets: vec![cfg.target],
        limit_tol: WITNESS_TOL,
        i_bound: WITNESS_I_BOUND,
        precision: cfg.precision,
        ..ExpOptions::default()
    };
    let Some(e) = out.ok(&name, predict_exp(a, b, 1.0, 0.0, (0, 0), &opts)) else { return };
    let Some(w) = e.witnesses.first() else {
        return out.push(name, false, "no witness", format!("i <= {WITNESS_I_BOUND}"));
    };
    // Independent recomputation of the induced limit from (i, j).
    let r = 1.0 / (1.0 + (w.i as f64 * a.ln() - w.j as f64 * b.ln()).exp());
    out.push(
        format!("{name} at (i, j) = ({}, {})", w.i, w.j),
        w.i <= WITNESS_I_BOUND && (r - cfg.target).abs() <= WITNESS_TOL,
        sci((r - cfg.target).abs()),
        format!("<= {}", sci(WITNESS_TOL)),
    );
    class_row(out, &format!("predicted set ({label})"), &e.classification, &Classification::ClosedInterval);
}

fn weierstrass(out: &mut Rows) {
    let (a, b) = (0.5, 13);
    let ab = a * b as f64;
    let bound = 1.0 + 1.5 * std::f64::consts::PI;
    out.push("a*b > 1 + 3*pi/2", ab > bound, ab.to_string(), format!("> {bound:.6}"));
    let Some(f) = out.ok("weierstrass", GalleryFunction::weierstrass(a, b, crate::gallery::DEFAULT_WEIERSTRASS_TOL))
    else {
        return;
    };
    let eng = QuotientEngine::default();
    let mut sups = vec![];
    for d in WEIERSTRASS_DECADES {
        let mut sup = 0.0f64;
        for s in 0..=WEIERSTRASS_GRID {
            let h = 10f64.powf(-(d as f64 + 1.0) + s as f64 / WEIERSTRASS_GRID as f64);
            match eng.newton(&f, 0.0, h) {
                Ok(q) => sup = sup.max(q.to_f64().abs()),
                Err(e) => return out.error(format!("decade {d}"), &e),
            }
        }
        sups.push(sup);
    }
    let listed: Vec<String> = sups.iter().map(|s| format!("{s:.4e}")).collect();
    let monotone = sups.windows(2).all(|w| w[0] <= w[1]);
    let (first, last) = (WEIERSTRASS_DECADES.start(), WEIERSTRASS_DECADES.end());
    out.push(
        format!("per-decade sup |newton| nondecreasing, d={first}..{last}"),
        monotone,
        listed.join(" "),
        "nondecreasing",
    );
    let top = *sups.last().expect("decades are non-empty");
    out.push(format!("sup at d={last}"), top > WEIERSTRASS_FLOOR, sci(top), format!("> {}", sci(WEIERSTRASS_FLOOR)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn cheap_suites_pass() {
        let cfg = VerifyConfig::default();
        for s in [Suite::Kernel, Suite::Smooth, Suite::PolyRates, Suite::Weierstrass] {
            let r = run(s, &cfg).unwrap();
            assert!(r.passed, "{}", r.to_csv());
        }
    }

    #[test]
    fn exp_rates_cover_both_cases() {
        let r = run(Suite::ExpRates, &VerifyConfig::default()).unwrap();
        assert!(r.passed, "{}", r.to_csv());
        assert!(r.checks.iter().any(|c| c.name.starts_with("cord limits on the lattice")));
        assert!(r.checks.iter().any(|c| c.name.starts_with("witness for K=0.4")));
    }

    #[test]
    fn rows_are_deterministic() {
        let cfg = VerifyConfig { seed: 9, ..Default::default() };
        assert_eq!(run(Suite::Kernel, &cfg).unwrap(), run(Suite::Kernel, &cfg).unwrap());
    }

    #[test]
    fn small_budget_is_rejected() {
        let cfg = VerifyConfig { budget: 10, ..Default::default() };
        assert!(matches!(run(Suite::Abs, &cfg), Err(Error::Param(_))));
    }

    #[test]
    fn failing_rows_fail_the_report() {
        let mut rows = Rows { suite: "x", rows: vec![] };
        rows.at_most("big", 2.0, 1.0);
        rows.at_most("small", 0.5, 1.0);
        assert_eq!(rows.rows.iter().map(|c| c.passed).collect::<Vec<_>>(), [false, true]);
        let report = VerifyReport { suite: Suite::Kernel, passed: false, checks: rows.rows };
        assert!(report.to_csv().starts_with("suite,check,status,value,bound\nx,big,fail,"));
    }
}

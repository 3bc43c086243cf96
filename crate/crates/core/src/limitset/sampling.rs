//! Probe generation and the sampled estimators.
//!
//! Interval domains are probed at scales `σ` drawn log-uniformly from
//! `[min_scale, max_scale]` by a seeded Kronecker sequence, so the first
//! half of a budget is exactly the half budget. Only probes in the tail
//! (the smallest `tail_fraction` of the log range) are evaluated. Discrete
//! domains are probed along affine index maps of the two sequences.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{cluster_linked, tail_limits, Evidence, LimitSetEstimate, SamplingBudget, Side, MIN_TRACE_LEN};
use crate::error::{Error, Result};
use crate::extreal::{chart, chart_distance, hausdorff, ClosedExtSet, Component, ExtReal};
use crate::gallery::{Domain, GalleryFunction};
use crate::quotient::QuotientEngine;
use crate::seqgen::{subsequence, DecaySequence, IndexMap};

/// Additive recurrence constants `1/φ₃^d` for the plastic-like root
/// `φ₃⁴ = φ₃ + 1`.
const KRONECKER: [f64; 3] = [0.819_172_513_396_164_5, 0.671_043_606_703_789_3, 0.549_700_477_901_970_3];

/// Phases `θ` of the harmonic probes `1/(θ + 2πk)`, on which `sin(1/h)`
/// equals `sin θ`.
const PHASES: usize = 16;

/// Widest ratio `small/big` of the random cord pairs is `10^-RATIO_DECADES`.
const RATIO_DECADES: f64 = 6.0;

/// Index multipliers and offsets of the discrete traces.
const DISCRETE_MULS: std::ops::RangeInclusive<usize> = 1..=4;
const DISCRETE_ADDS: std::ops::RangeInclusive<usize> = 0..=4;
const DISCRETE_MAX_LEN: usize = 1024;

/// Smallest term used on discrete domains; keeps every quotient in the
/// normal range.
const MIN_TERM: f64 = 1e-300;

/// Points of discrete traces closer than this in the chart are one limit.
const POINT_MERGE: f64 = 1e-12;

/// Multiplier on the expected largest gap between scattered samples.
const LINK_SPREAD: f64 = 8.0;

struct Stream {
    offsets: [f64; 3],
}

impl Stream {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self { offsets: [rng.gen(), rng.gen(), rng.gen()] }
    }

    fn point(&self, i: usize) -> [f64; 3] {
        let n = (i + 1) as f64;
        let mut u = [0.0; 3];
        for d in 0..3 {
            u[d] = (self.offsets[d] + n * KRONECKER[d]).fract();
        }
        u
    }
}

fn scale(b: &SamplingBudget, u: f64) -> f64 {
    b.max_scale * (b.min_scale / b.max_scale).powf(u)
}

fn in_tail(b: &SamplingBudget, u: f64) -> bool {
    u >= 1.0 - b.tail_fraction
}

fn phase(j: usize) -> f64 {
    TAU * (j % PHASES) as f64 / PHASES as f64
}

/// The point `1/(θ + 2πk)` nearest to `σ`.
fn harmonic(theta: f64, sigma: f64) -> f64 {
    let k = ((1.0 / sigma - theta) / TAU).round().max(1.0);
    1.0 / (theta + TAU * k)
}

fn ratio(u: f64) -> f64 {
    10f64.powf(-RATIO_DECADES * u)
}

/// Secant step for probe `i`, or `None` outside the tail.
fn secant_step(b: &SamplingBudget, stream: &Stream, side: Side, i: usize) -> Option<f64> {
    let [u1, u2, _] = stream.point(i);
    if !in_tail(b, u1) {
        return None;
    }
    let sigma = scale(b, u1);
    let h = if i % 8 == 7 { harmonic(phase(i / 8), sigma) } else { sigma };
    let negative = match side {
        Side::Right => false,
        Side::Left => true,
        Side::Both => u2 >= 0.5,
    };
    Some(if negative { -h } else { h })
}

/// Cord pair `(h, k)` for probe `i`, or `None` outside the tail.
fn cord_pair(b: &SamplingBudget, stream: &Stream, i: usize) -> Option<(f64, f64)> {
    let [u1, u2, u3] = stream.point(i);
    if !in_tail(b, u1) {
        return None;
    }
    let sigma = scale(b, u1);
    let idx = i / 8;
    let (big, small) = match i % 8 {
        5 => {
            let p = 1 + idx % 3;
            (sigma, sigma.powi(p as i32))
        }
        6 => (
            harmonic(phase(idx), sigma),
            harmonic(phase(idx / PHASES), sigma * ratio(u2)),
        ),
        7 => (harmonic(phase(idx), sigma), sigma * ratio(u2)),
        _ => (sigma, sigma * ratio(u2)),
    };
    Some(if u3 < 0.5 { (big, small) } else { (small, big) })
}

/// Clusters the full set of tail values and the half-budget subset.
fn sampled_estimate(values: Vec<(usize, ExtReal)>, budget: &SamplingBudget) -> Result<LimitSetEstimate> {
    let half_n = budget.halved().samples;
    let full: Vec<ExtReal> = values.iter().map(|&(_, v)| v).collect();
    let half: Vec<ExtReal> = values.iter().filter(|(i, _)| *i < half_n).map(|&(_, v)| v).collect();
    let set = cluster_linked(&full, budget.cluster_tol, sample_link(&full, budget.cluster_tol));
    let half_set = cluster_linked(&half, budget.cluster_tol, sample_link(&half, budget.cluster_tol));
    finish(set, &half_set, full.len(), budget)
}

/// Chaining gap for `n` scattered samples: `LINK_SPREAD` times the largest
/// gap expected from `n` uniform draws over the chart span, and at least
/// `3·tol`.
fn sample_link(values: &[ExtReal], tol: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 3.0 * tol;
    }
    let (lo, hi) = values.iter().map(|&v| chart(v)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
        (lo.min(c), hi.max(c))
    });
    let spread = LINK_SPREAD * (hi - lo) * (n as f64).ln() / n as f64;
    spread.max(3.0 * tol)
}

fn finish(
    set: ClosedExtSet,
    half_set: &ClosedExtSet,
    tail_values: usize,
    budget: &SamplingBudget,
) -> Result<LimitSetEstimate> {
    let (half_budget_distance, stable) = match (set.is_empty(), half_set.is_empty()) {
        (false, false) => {
            let d = hausdorff(&set, half_set)?;
            (Some(d), d <= budget.stability_tol)
        }
        (true, true) => (None, true),
        _ => (None, false),
    };
    let evidence = Evidence::Sampled { budget: *budget, tail_values, half_budget_distance, stable };
    Ok(LimitSetEstimate::new(set, evidence))
}

/// Evaluates probes in parallel; the first error in index order wins.
fn evaluate<F>(n: usize, probe: F) -> Result<Vec<(usize, ExtReal)>>
where
    F: Fn(usize) -> Option<Result<ExtReal>> + Sync,
{
    let raw: Vec<(usize, Result<ExtReal>)> = (0..n)
        .into_par_iter()
        .filter_map(|i| probe(i).map(|r| (i, r)))
        .collect();
    raw.into_iter().map(|(i, r)| r.map(|v| (i, v))).collect()
}

fn engine(budget: &SamplingBudget) -> Result<QuotientEngine> {
    QuotientEngine::new(budget.infinity_threshold)
}

/// Estimates the set of limits of Newton quotients at `x`.
///
/// On interval domains the probes are geometric scales, with every eighth
/// probe moved to the nearest harmonic point `1/(θ + 2πk)`. On discrete
/// domains (only `x = 0`) the traces run along the sample sequences.
pub fn estimate_secant_set(
    f: &GalleryFunction,
    x: f64,
    side: Side,
    budget: &SamplingBudget,
) -> Result<LimitSetEstimate> {
    budget.validate()?;
    if !f.in_domain(x) {
        return Err(Error::Domain(format!("{} is not defined at {x}", f.name())));
    }
    let eng = engine(budget)?;
    match f.domain() {
        Domain::Discrete { h, k } => {
            check_discrete_point(x)?;
            let mut traces = vec![];
            if side != Side::Left {
                traces.push((h.clone(), 1.0));
            }
            if side != Side::Right {
                traces.push((k.clone(), -1.0));
            }
            let run = |b: &SamplingBudget| -> Result<(ClosedExtSet, usize)> {
                let cap = trace_cap(b, traces.len());
                let mut set = ClosedExtSet::empty();
                let mut used = 0;
                for (seq, sign) in &traces {
                    let len = valid_len(seq, cap);
                    if len < MIN_TRACE_LEN {
                        return Err(Error::InsufficientData(format!(
                            "{} has only {len} usable terms",
                            seq.spec()
                        )));
                    }
                    let values = (1..=len)
                        .map(|n| eng.newton(f, x, sign * seq.term(seq.offset() + n - 1)?))
                        .collect::<Result<Vec<_>>>()?;
                    set = set.union(&tail_limits(&values, b.tail_fraction, b.cluster_tol)?);
                    used += tail_len(len, b.tail_fraction);
                }
                Ok((set, used))
            };
            let (set, used) = run(budget)?;
            let (half, _) = run(&budget.halved())?;
            finish(set, &half, used, budget)
        }
        Domain::Interval { .. } => {
            let stream = Stream::new(budget.seed);
            let values = evaluate(budget.samples, |i| {
                secant_step(budget, &stream, side, i).map(|h| eng.newton(f, x, h))
            })?;
            sampled_estimate(values, budget)
        }
    }
}

/// Estimates the set of limits of cord quotients at `x`.
///
/// Interval domains use pairs `(h, k)` at a common scale `σ` with
/// `min/max ∈ [10⁻⁶, 1]` in either orientation, pairs `(σ, σ^p)` for
/// `p ∈ {1, 2, 3}`, and harmonic probes on one or both sides. Discrete
/// domains use traces along `(αn + β, γn + δ)` for `α, γ ∈ 1..=4`,
/// `β, δ ∈ 0..=2`; each trace contributes its own tail limits and the union
/// keeps distinct limits apart.
pub fn estimate_cord_set(f: &GalleryFunction, x: f64, budget: &SamplingBudget) -> Result<LimitSetEstimate> {
    budget.validate()?;
    if !f.domain().two_sided_at(x) {
        return Err(Error::Domain(format!("{} is not defined on both sides of {x}", f.name())));
    }
    let eng = engine(budget)?;
    match f.domain() {
        Domain::Discrete { h, k } => {
            check_discrete_point(x)?;
            let maps: Vec<(usize, usize, usize, usize)> = DISCRETE_MULS
                .flat_map(|a| DISCRETE_MULS.map(move |c| (a, c)))
                .flat_map(|(a, c)| DISCRETE_ADDS.flat_map(move |b| DISCRETE_ADDS.map(move |d| (a, b, c, d))))
                .collect();
            let run = |bud: &SamplingBudget| -> Result<(ClosedExtSet, usize)> {
                let cap = trace_cap(bud, maps.len());
                let per_trace: Vec<Result<Option<(ClosedExtSet, usize)>>> = maps
                    .par_iter()
                    .map(|&(a, b, c, d)| {
                        let hs = subsequence(h, IndexMap::affine(a, b + h.offset() - 1))?;
                        let ks = subsequence(k, IndexMap::affine(c, d + k.offset() - 1))?;
                        let len = valid_len(&hs, cap).min(valid_len(&ks, cap));
                        if len < MIN_TRACE_LEN {
                            return Ok(None);
                        }
                        let trace = eng.trace(f, x, &hs, Some(&ks), len)?;
                        let limits = tail_limits(&trace.values(), bud.tail_fraction, bud.cluster_tol)?;
                        Ok(Some((limits, tail_len(len, bud.tail_fraction))))
                    })
                    .collect();
                let mut sets = vec![];
                let mut used = 0;
                for r in per_trace {
                    if let Some((s, n)) = r? {
                        sets.push(s);
                        used += n;
                    }
                }
                Ok((merge_limits(&sets), used))
            };
            let (set, used) = run(budget)?;
            let (half, _) = run(&budget.halved())?;
            finish(set, &half, used, budget)
        }
        Domain::Interval { .. } => {
            let stream = Stream::new(budget.seed);
            let values = evaluate(budget.samples, |i| {
                cord_pair(budget, &stream, i).map(|(h, k)| eng.cord(f, x, h, k))
            })?;
            sampled_estimate(values, budget)
        }
    }
}

fn check_discrete_point(x: f64) -> Result<()> {
    if x != 0.0 {
        return Err(Error::Domain(format!(
            "sampled domains accumulate only at 0, got x = {x}"
        )));
    }
    Ok(())
}

fn trace_cap(b: &SamplingBudget, traces: usize) -> usize {
    (b.samples / traces.max(1)).clamp(MIN_TRACE_LEN, DISCRETE_MAX_LEN)
}

fn tail_len(len: usize, tail_fraction: f64) -> usize {
    ((len as f64 * tail_fraction).ceil() as usize).clamp(1, len)
}

/// Number of leading terms (at most `cap`) that exist and stay above
/// [`MIN_TERM`].
fn valid_len(seq: &DecaySequence, cap: usize) -> usize {
    (0..cap)
        .take_while(|&i| seq.term(seq.offset() + i).is_ok_and(|t| t >= MIN_TERM))
        .count()
}

/// Union of per-trace limit sets; points closer than [`POINT_MERGE`] in the
/// chart collapse to the first of them.
fn merge_limits(sets: &[ClosedExtSet]) -> ClosedExtSet {
    let mut intervals = vec![];
    let mut points: Vec<ExtReal> = vec![];
    for s in sets {
        for c in s.components() {
            match c {
                Component::Point(p) => points.push(p),
                Component::Interval(lo, hi) => intervals.push((lo, hi)),
            }
        }
    }
    points.sort();
    let mut kept: Vec<ExtReal> = vec![];
    for p in points {
        if kept.last().is_none_or(|&q| chart_distance(p, q) >= POINT_MERGE) {
            kept.push(p);
        }
    }
    ClosedExtSet::new(intervals, kept).expect("components of canonical sets")
}

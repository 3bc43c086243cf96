//! Estimation of secant and cord limit sets, target search along the
//! straight-line path between two cord witnesses, and the analytic
//! predictors for two-slope functions.

mod predict;
mod sampling;
mod target;

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

pub use predict::{
    gap_bound, predict_exp, predict_poly, ExpOptions, ExpWitness, PolyPrediction, PolyWeight,
};
pub use sampling::{estimate_cord_set, estimate_secant_set};
pub use target::{solve_cord_target, target_cord, CordPair, TargetSolution, MAX_BISECTIONS};

use crate::dioph::{Commensurability, Precision};
use crate::error::{Error, Result};
use crate::extreal::{chart, ClosedExtSet, Component, ExtReal};
use crate::quotient::QuotientTrace;

/// Shortest trace accepted by [`subsequential_limits`].
pub const MIN_TRACE_LEN: usize = 100;

/// Chart width below which an interval component counts as narrow when
/// classifying.
pub const NARROW_WIDTH: f64 = 0.1;

/// Which side of `x` a secant estimate samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Both,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "both" => Ok(Side::Both),
            _ => Err(Error::Parse(format!("side must be left, right or both, got {s:?}"))),
        }
    }
}

/// Sampling parameters for the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingBudget {
    /// Number of probe points (at least [`MIN_TRACE_LEN`]).
    pub samples: usize,
    pub seed: u64,
    /// Fraction of the log-scale range, from the small end, kept as tail.
    pub tail_fraction: f64,
    /// Clustering tolerance in the chart metric.
    pub cluster_tol: f64,
    /// Hausdorff distance allowed between the full and half-budget
    /// estimates for the result to count as stable.
    pub stability_tol: f64,
    pub min_scale: f64,
    pub max_scale: f64,
    pub infinity_threshold: f64,
}

impl Default for SamplingBudget {
    fn default() -> Self {
        Self {
            samples: 20_000,
            seed: 0,
            tail_fraction: 0.5,
            cluster_tol: 1e-3,
            stability_tol: 0.02,
            min_scale: 1e-8,
            max_scale: 1e-2,
            infinity_threshold: crate::quotient::DEFAULT_INFINITY_THRESHOLD,
        }
    }
}

impl SamplingBudget {
    pub fn with_samples(samples: usize, seed: u64) -> Self {
        Self { samples, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Param(m));
        if self.samples < MIN_TRACE_LEN {
            return bad(format!("budget must be at least {MIN_TRACE_LEN}, got {}", self.samples));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return bad(format!("tail fraction must lie in (0, 1], got {}", self.tail_fraction));
        }
        for (name, v) in [
            ("cluster_tol", self.cluster_tol),
            ("stability_tol", self.stability_tol),
            ("infinity_threshold", self.infinity_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.min_scale > 0.0 && self.min_scale < self.max_scale && self.max_scale.is_finite()) {
            return bad(format!("need 0 < min_scale < max_scale, got {} and {}", self.min_scale, self.max_scale));
        }
        Ok(())
    }

    pub(crate) fn halved(&self) -> Self {
        Self { samples: self.samples / 2, ..*self }
    }
}

/// Structural reading of an estimated set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Empty,
    SinglePoint,
    ClosedInterval,
    /// Two or more separated components, each a point or a narrow
    /// interval; `points` lists one representative per component.
    DiscreteWithAccumulation { points: Vec<ExtReal> },
    Unknown,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Empty => "empty",
            Self::SinglePoint => "single_point",
            Self::ClosedInterval => "closed_interval",
            Self::DiscreteWithAccumulation { .. } => "discrete_with_accumulation",
            Self::Unknown => "unknown",
        }
    }
}

/// Reads the shape of a set. Components narrower than [`NARROW_WIDTH`] in
/// the chart count as points when there are several of them.
pub fn classify(set: &ClosedExtSet) -> Classification {
    let comps = set.components();
    match comps.as_slice() {
        [] => Classification::Empty,
        [Component::Point(_)] => Classification::SinglePoint,
        [Component::Interval(..)] => Classification::ClosedInterval,
        _ => {
            let narrow = |c: &Component| chart(c.hi()) - chart(c.lo()) <= NARROW_WIDTH;
            if comps.iter().all(narrow) {
                let points = comps.iter().map(|c| representative(*c)).collect();
                Classification::DiscreteWithAccumulation { points }
            } else {
                Classification::Unknown
            }
        }
    }
}

fn representative(c: Component) -> ExtReal {
    match c {
        Component::Point(p) => p,
        Component::Interval(lo, hi) => crate::extreal::unchart(0.5 * (chart(lo) + chart(hi))),
    }
}

/// How an estimate was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Evidence {
    Sampled {
        budget: SamplingBudget,
        /// Quotient values that entered the clustering.
        tail_values: usize,
        /// Hausdorff distance to the half-budget estimate, when both are
        /// non-empty.
        half_budget_distance: Option<f64>,
        stable: bool,
    },
    Predicted {
        relation: Commensurability,
        alpha: f64,
        precision: Precision,
    },
}

impl Evidence {
    pub fn is_stable(&self) -> bool {
        match self {
            Evidence::Sampled { stable, .. } => *stable,
            Evidence::Predicted { .. } => true,
        }
    }
}

/// An estimated limit set with its classification and evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSetEstimate {
    pub set: ClosedExtSet,
    pub classification: Classification,
    pub evidence: Evidence,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<ExpWitness>,
}

impl LimitSetEstimate {
    pub(crate) fn new(set: ClosedExtSet, evidence: Evidence) -> Self {
        Self { classification: classify(&set), set, evidence, witnesses: vec![] }
    }

    /// Components as CSV rows `kind,lo,hi,center` (center in the chart).
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(vec![]);
        w.write_record(["kind", "lo", "hi", "center"]).expect("in-memory write");
        for c in self.set.components() {
            let kind = match c {
                Component::Point(_) => "point",
                Component::Interval(..) => "interval",
            };
            w.write_record([
                kind.to_string(),
                c.lo().to_string(),
                c.hi().to_string(),
                representative(c).to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Single-linkage clustering of values in the chart.
///
/// Sorted chart values whose gaps are below `3·tol` chain together. A chain
/// narrower than `tol` becomes a point (its median value); wider chains
/// become intervals. Chart values within `tol` of `±π/2` snap to `±∞`.
pub fn cluster(values: &[ExtReal], tol: f64) -> ClosedExtSet {
    cluster_linked(values, tol, 3.0 * tol)
}

/// [`cluster`] with an explicit chaining gap `link`.
pub(crate) fn cluster_linked(values: &[ExtReal], tol: f64, link: f64) -> ClosedExtSet {
    let mut v: Vec<(f64, ExtReal)> = values.iter().map(|&x| (chart(x), x)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let snap = |c: f64, x: ExtReal| {
        if c >= FRAC_PI_2 - tol {
            ExtReal::PosInf
        } else if c <= -FRAC_PI_2 + tol {
            ExtReal::NegInf
        } else {
            x
        }
    };
    let (mut intervals, mut points) = (vec![], vec![]);
    let mut start = 0;
    for end in 1..=v.len() {
        if end < v.len() && v[end].0 - v[end - 1].0 < link {
            continue;
        }
        if start == end {
            continue;
        }
        let (lo, hi) = (v[start], v[end - 1]);
        if hi.0 - lo.0 < tol {
            let (c, x) = v[start + (end - start - 1) / 2];
            points.push(snap(c, x));
        } else {
            let (a, b) = (snap(lo.0, lo.1), snap(hi.0, hi.1));
            if a == b {
                points.push(a);
            } else {
                intervals.push((a, b));
            }
        }
        start = end;
    }
    ClosedExtSet::new(intervals, points).expect("chains are sorted")
}

/// Clusters the tail of a trace: the last `ceil(tail_fraction·len)` values.
pub fn subsequential_limits(
    trace: &QuotientTrace,
    tail_fraction: f64,
    cluster_tol: f64,
) -> Result<ClosedExtSet> {
    tail_limits(&trace.values(), tail_fraction, cluster_tol)
}

pub(crate) fn tail_limits(values: &[ExtReal], tail_fraction: f64, cluster_tol: f64) -> Result<ClosedExtSet> {
    if values.len() < MIN_TRACE_LEN {
        return Err(Error::InsufficientData(format!(
            "trace has {} entries, need at least {MIN_TRACE_LEN}",
            values.len()
        )));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Param(format!("tail fraction must lie in (0, 1], got {tail_fraction}")));
    }
    if !(cluster_tol > 0.0) {
        return Err(Error::Param(format!("cluster_tol must be positive, got {cluster_tol}")));
    }
    let keep = ((values.len() as f64 * tail_fraction).ceil() as usize).clamp(1, values.len());
    Ok(cluster(&values[values.len() - keep..], cluster_tol))
}

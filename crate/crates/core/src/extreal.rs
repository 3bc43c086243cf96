//! The extended real line, its arctangent chart, and closed subsets made of
//! finitely many intervals and isolated points.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `R ∪ {−∞, +∞}`.
///
/// `Finite` never holds NaN or an IEEE infinity; use [`ExtReal::new`] to
/// convert an arbitrary `f64`.
#[derive(Debug, Clone, Copy)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Converts an `f64`, mapping IEEE infinities onto the explicit variants.
    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::Param("NaN is not an extended real".into()))
        } else if v == f64::INFINITY {
            Ok(ExtReal::PosInf)
        } else if v == f64::NEG_INFINITY {
            Ok(ExtReal::NegInf)
        } else {
            Ok(ExtReal::Finite(v))
        }
    }

    /// Like [`ExtReal::new`] but panics on NaN. For literals in tests and
    /// call sites that have already excluded NaN.
    pub fn from_f64(v: f64) -> Self {
        Self::new(v).expect("NaN passed to ExtReal::from_f64")
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The value as an `f64`, with IEEE infinities for the infinite points.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Arctangent chart onto `[−π/2, π/2]`.
    pub fn chart(self) -> f64 {
        chart(self)
    }

    fn rank(self) -> u8 {
        match self {
            ExtReal::NegInf => 0,
            ExtReal::Finite(_) => 1,
            ExtReal::PosInf => 2,
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                a.partial_cmp(b).expect("finite extended reals are never NaN")
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::PosInf => f.write_str("+inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::NegInf => s.serialize_str("-inf"),
            ExtReal::PosInf => s.serialize_str("+inf"),
            ExtReal::Finite(v) => s.serialize_f64(*v),
        }
    }
}

struct ExtRealVisitor;

impl Visitor<'_> for ExtRealVisitor {
    type Value = ExtReal;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number or one of \"+inf\", \"-inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
        ExtReal::new(v).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
        Ok(ExtReal::Finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
        Ok(ExtReal::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
        match v {
            "+inf" | "inf" => Ok(ExtReal::PosInf),
            "-inf" => Ok(ExtReal::NegInf),
            other => Err(E::custom(format!("unknown extended-real token {other:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(ExtRealVisitor)
    }
}

/// Arctangent chart: `−∞ ↦ −π/2`, `+∞ ↦ π/2`, strictly increasing.
pub fn chart(x: ExtReal) -> f64 {
    match x {
        ExtReal::NegInf => -FRAC_PI_2,
        ExtReal::Finite(v) => v.atan(),
        ExtReal::PosInf => FRAC_PI_2,
    }
}

/// Inverse of [`chart`]; arguments are clamped to `[−π/2, π/2]`.
pub fn unchart(c: f64) -> ExtReal {
    if c >= FRAC_PI_2 {
        ExtReal::PosInf
    } else if c <= -FRAC_PI_2 {
        ExtReal::NegInf
    } else {
        ExtReal::Finite(c.tan())
    }
}

/// Chart distance `|chart(x) − chart(y)|`.
pub fn chart_distance(x: ExtReal, y: ExtReal) -> f64 {
    (chart(x) - chart(y)).abs()
}

/// One connected piece of a [`ClosedExtSet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    Point(ExtReal),
    Interval(ExtReal, ExtReal),
}

impl Component {
    pub fn lo(self) -> ExtReal {
        match self {
            Component::Point(p) => p,
            Component::Interval(lo, _) => lo,
        }
    }

    pub fn hi(self) -> ExtReal {
        match self {
            Component::Point(p) => p,
            Component::Interval(_, hi) => hi,
        }
    }
}

/// A closed subset of the extended reals: a finite union of closed intervals
/// and isolated points, always held in canonical form.
///
/// Canonical form: intervals sorted, pairwise disjoint, `lo < hi`; points
/// sorted, distinct, and outside every interval.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ClosedExtSet {
    intervals: Vec<(ExtReal, ExtReal)>,
    points: Vec<ExtReal>,
}

impl ClosedExtSet {
    /// Builds a set from raw parts and normalizes it.
    pub fn new(intervals: Vec<(ExtReal, ExtReal)>, points: Vec<ExtReal>) -> Result<Self> {
        normalize(intervals, points)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(x: ExtReal) -> Self {
        Self { intervals: Vec::new(), points: vec![x] }
    }

    /// `[lo, hi]`; collapses to a point when `lo == hi`.
    pub fn interval(lo: ExtReal, hi: ExtReal) -> Result<Self> {
        Self::new(vec![(lo, hi)], Vec::new())
    }

    pub fn from_points<I: IntoIterator<Item = ExtReal>>(points: I) -> Self {
        normalize(Vec::new(), points.into_iter().collect()).expect("points cannot be invalid")
    }

    pub fn intervals(&self) -> &[(ExtReal, ExtReal)] {
        &self.intervals
    }

    pub fn points(&self) -> &[ExtReal] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    /// Connected components in increasing order.
    pub fn components(&self) -> Vec<Component> {
        let mut out: Vec<Component> = self
            .intervals
            .iter()
            .map(|&(lo, hi)| Component::Interval(lo, hi))
            .chain(self.points.iter().map(|&p| Component::Point(p)))
            .collect();
        out.sort_by_key(|c| c.lo());
        out
    }

    pub fn min(&self) -> Option<ExtReal> {
        self.components().first().map(|c| c.lo())
    }

    pub fn max(&self) -> Option<ExtReal> {
        self.components().last().map(|c| c.hi())
    }

    pub fn contains(&self, x: ExtReal) -> bool {
        self.points.binary_search(&x).is_ok()
            || self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Re-runs normalization on the stored parts.
    pub fn normalized(&self) -> Self {
        normalize(self.intervals.clone(), self.points.clone())
            .expect("a canonical set always renormalizes")
    }

    /// Chart distance from `x` to the nearest point of the set.
    pub fn distance_to(&self, x: ExtReal) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(distance_in_chart(&self.chart_components(), chart(x)))
    }

    /// Union of two sets.
    pub fn union(&self, other: &Self) -> Self {
        let mut intervals = self.intervals.clone();
        intervals.extend_from_slice(&other.intervals);
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        normalize(intervals, points).expect("union of canonical sets is valid")
    }

    fn chart_components(&self) -> Vec<(f64, f64)> {
        self.components().iter().map(|c| (chart(c.lo()), chart(c.hi()))).collect()
    }
}

impl<'de> Deserialize<'de> for ClosedExtSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            intervals: Vec<(ExtReal, ExtReal)>,
            #[serde(default)]
            points: Vec<ExtReal>,
        }
        let raw = Raw::deserialize(d)?;
        normalize(raw.intervals, raw.points).map_err(de::Error::custom)
    }
}

impl fmt::Display for ClosedExtSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.components().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match c {
                Component::Point(p) => write!(f, "{p}")?,
                Component::Interval(lo, hi) => write!(f, "[{lo}, {hi}]")?,
            }
        }
        f.write_str("}")
    }
}

/// Brings raw intervals and points into canonical form.
///
/// Degenerate intervals become points, overlapping or touching intervals
/// merge, and points covered by an interval are absorbed.
pub fn normalize(
    mut intervals: Vec<(ExtReal, ExtReal)>,
    mut points: Vec<ExtReal>,
) -> Result<ClosedExtSet> {
    if let Some(&(lo, hi)) = intervals.iter().find(|(lo, hi)| lo > hi) {
        return Err(Error::InvalidSet(format!("interval [{lo}, {hi}] has lo > hi")));
    }
    points.extend(intervals.iter().filter(|(lo, hi)| lo == hi).map(|&(lo, _)| lo));
    intervals.retain(|(lo, hi)| lo < hi);
    intervals.sort();

    let mut merged: Vec<(ExtReal, ExtReal)> = Vec::with_capacity(intervals.len());
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }

    points.sort();
    points.dedup();
    points.retain(|&p| !covered(&merged, p));

    Ok(ClosedExtSet { intervals: merged, points })
}

fn covered(sorted: &[(ExtReal, ExtReal)], p: ExtReal) -> bool {
    let idx = sorted.partition_point(|&(lo, _)| lo <= p);
    idx > 0 && p <= sorted[idx - 1].1
}

fn distance_in_chart(components: &[(f64, f64)], c: f64) -> f64 {
    components
        .iter()
        .map(|&(lo, hi)| {
            if c < lo {
                lo - c
            } else if c > hi {
                c - hi
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// `sup_{a ∈ A} d(a, B)`. The distance to `B` is piecewise linear on each
/// component of `A`, so its maximum sits at an endpoint of `A` or at the
/// midpoint of a gap of `B`.
fn directed(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut candidates: Vec<f64> = a.iter().flat_map(|&(lo, hi)| [lo, hi]).collect();
    for w in b.windows(2) {
        let mid = 0.5 * (w[0].1 + w[1].0);
        if a.iter().any(|&(lo, hi)| lo <= mid && mid <= hi) {
            candidates.push(mid);
        }
    }
    candidates.into_iter().map(|c| distance_in_chart(b, c)).fold(0.0, f64::max)
}

/// Hausdorff distance in the chart metric.
pub fn hausdorff(a: &ClosedExtSet, b: &ClosedExtSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let (ca, cb) = (a.chart_components(), b.chart_components());
    Ok(directed(&ca, &cb).max(directed(&cb, &ca)))
}

/// `sup_{a ∈ A} d(a, B)` in the chart metric: how far `A` sticks out of `B`.
pub fn excess(a: &ClosedExtSet, b: &ClosedExtSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(directed(&a.chart_components(), &b.chart_components()))
}

/// `[min A, max A]`, or the single point when `min A = max A`.
pub fn convex_hull(a: &ClosedExtSet) -> Result<ClosedExtSet> {
    match (a.min(), a.max()) {
        (Some(lo), Some(hi)) => ClosedExtSet::interval(lo, hi),
        _ => Err(Error::EmptySet),
    }
}

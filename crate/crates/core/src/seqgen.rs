//! Null sequences `h_n ↘ 0`: generators, subsequences and empirical rate
//! classification.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Number of terms checked by [`DecaySequence::validate`].
pub const DEFAULT_HORIZON: usize = 10_000;
/// A valid sequence must drop below this within the horizon.
pub const DEFAULT_DECAY_EPS: f64 = 1e-3;
/// Relative residual below which a rate fit is accepted.
pub const FIT_TOLERANCE: f64 = 1e-2;

/// A strictly increasing map of positive integers, used to pass to a
/// subsequence `n ↦ term(map(n))`.
#[derive(Clone)]
pub struct IndexMap {
    f: Arc<dyn Fn(usize) -> usize + Send + Sync>,
    label: String,
}

impl IndexMap {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize) -> usize + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), label: label.into() }
    }

    /// `n ↦ mul·n + add`.
    pub fn affine(mul: usize, add: usize) -> Self {
        Self::new(format!("{mul}n+{add}"), move |n| mul * n + add)
    }

    pub fn identity() -> Self {
        Self::affine(1, 0)
    }

    pub fn apply(&self, n: usize) -> usize {
        (self.f)(n)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for IndexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexMap({})", self.label)
    }
}

/// How the terms of a [`DecaySequence`] are produced.
#[derive(Debug, Clone)]
pub enum Family {
    /// `1 / (p + q n)`.
    Harmonic { p: f64, q: f64 },
    /// `1 / P(n)` with `P(n) = Σ c·n^e` given as `(c, e)` pairs.
    Polynomial { terms: Vec<(f64, f64)> },
    /// `a^(−n)`.
    Exponential { a: f64 },
    /// Listed terms; the first one has index `offset`.
    Explicit(Vec<f64>),
    /// `n ↦ base.term(map(n))`.
    Subsequence { base: Box<DecaySequence>, map: IndexMap },
}

/// A positive sequence decreasing to zero, indexed from `offset ≥ 1`.
#[derive(Debug, Clone)]
pub struct DecaySequence {
    family: Family,
    offset: usize,
    spec: String,
}

/// Result of [`rate_classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rate", rename_all = "snake_case")]
pub enum Rate {
    /// `1/term(n) ~ a·n^m`.
    Polynomial { m: f64, a: f64 },
    /// `term(n) = a^(−n)`.
    Exponential { a: f64 },
    Unknown,
}

impl DecaySequence {
    pub fn harmonic(p: f64, q: f64) -> Result<Self> {
        if !(q > 0.0) || !p.is_finite() || !q.is_finite() {
            return Err(Error::Param(format!("harmonic needs finite p and q > 0, got p={p}, q={q}")));
        }
        let offset = first_positive_index(|n| p + q * n as f64)?;
        Ok(Self { family: Family::Harmonic { p, q }, offset, spec: format!("harmonic:{p},{q}") })
    }

    /// `1 / (a n^m)`.
    pub fn power(m: f64, a: f64) -> Result<Self> {
        let mut s = Self::polynomial(vec![(a, m)])?;
        s.spec = format!("poly:{m},{a}");
        Ok(s)
    }

    /// `1 / P(n)` for `P(n) = Σ c·n^e`. The leading exponent must be
    /// positive with a positive coefficient.
    pub fn polynomial(terms: Vec<(f64, f64)>) -> Result<Self> {
        let &(a, m) = terms
            .iter()
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .ok_or_else(|| Error::Param("polynomial needs at least one term".into()))?;
        if !(m > 0.0 && a > 0.0) || terms.iter().any(|(c, e)| !c.is_finite() || !e.is_finite()) {
            return Err(Error::Param(format!("polynomial leading term {a}·n^{m} must have a, m > 0")));
        }
        let spec = terms.iter().map(|(c, e)| format!("{c}n^{e}")).collect::<Vec<_>>().join("+");
        let eval = |n: usize| poly_value(&terms, n);
        let offset = first_positive_index(eval)?;
        Ok(Self { family: Family::Polynomial { terms }, offset, spec: format!("poly[{spec}]") })
    }

    pub fn exponential(a: f64) -> Result<Self> {
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::Param(format!("exponential needs a > 1, got {a}")));
        }
        Ok(Self { family: Family::Exponential { a }, offset: 1, spec: format!("exp:{a}") })
    }

    /// Listed terms, checked for positivity and strict decrease.
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Param("explicit sequence needs at least one term".into()));
        }
        let spec = format!(
            "list:{}",
            values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        let s = Self { family: Family::Explicit(values), offset: 1, spec };
        s.validate()?;
        Ok(s)
    }

    /// Starts the sequence at index `offset` instead of its default.
    pub fn with_offset(mut self, offset: usize) -> Result<Self> {
        if offset < self.offset {
            return Err(Error::Index { index: offset, offset: self.offset });
        }
        if let Family::Explicit(values) = &mut self.family {
            values.drain(..(offset - self.offset).min(values.len()));
            if values.is_empty() {
                return Err(Error::Param("offset past the end of the explicit list".into()));
            }
        }
        self.offset = offset;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Compact textual form, e.g. `exp:2`.
    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// Largest valid index, if the sequence is finite.
    pub fn last_index(&self) -> Option<usize> {
        match &self.family {
            Family::Explicit(v) => Some(self.offset + v.len() - 1),
            _ => None,
        }
    }

    /// The `n`-th term.
    pub fn term(&self, n: usize) -> Result<f64> {
        if n < self.offset {
            return Err(Error::Index { index: n, offset: self.offset });
        }
        let v = match &self.family {
            Family::Harmonic { p, q } => 1.0 / (p + q * n as f64),
            Family::Polynomial { terms } => 1.0 / poly_value(terms, n),
            Family::Exponential { a } => a.powf(-(n as f64)),
            Family::Explicit(values) => *values
                .get(n - self.offset)
                .ok_or(Error::Index { index: n, offset: self.offset })?,
            Family::Subsequence { base, map } => base.term(map.apply(n))?,
        };
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("term {n} of {} is {v}, not a positive real", self.spec)))
        }
    }

    /// `ln(1/term(n))`, computed without forming the (possibly underflowing)
    /// term itself.
    pub fn log_inverse_term(&self, n: usize) -> Result<f64> {
        if n < self.offset {
            return Err(Error::Index { index: n, offset: self.offset });
        }
        match &self.family {
            Family::Exponential { a } => Ok(n as f64 * a.ln()),
            Family::Subsequence { base, map } => base.log_inverse_term(map.apply(n)),
            _ => Ok(-self.term(n)?.ln()),
        }
    }

    /// Empirical check with the default horizon and threshold.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(DEFAULT_HORIZON, DEFAULT_DECAY_EPS)
    }

    /// Checks positivity and strict decrease over a prefix of at most
    /// `horizon` terms, and that the terms drop below `eps` within it.
    /// Explicit lists are finite prefixes: every listed term is checked and
    /// the `eps` requirement is waived.
    pub fn validate_with(&self, horizon: usize, eps: f64) -> Result<()> {
        let end = match self.last_index() {
            Some(last) => last.min(self.offset + horizon),
            None => self.offset + horizon,
        };
        let mut prev = self.term(self.offset)?;
        if prev < eps {
            return Ok(());
        }
        for n in self.offset + 1..=end {
            let t = self.term(n)?;
            if t >= prev {
                return Err(Error::Domain(format!(
                    "{} is not strictly decreasing at n = {n}",
                    self.spec
                )));
            }
            if t < eps && self.last_index().is_none() {
                return Ok(());
            }
            prev = t;
        }
        if self.last_index().is_some() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{} has not dropped below {eps} after {horizon} terms",
                self.spec
            )))
        }
    }
}

fn poly_value(terms: &[(f64, f64)], n: usize) -> f64 {
    let n = n as f64;
    terms.iter().map(|&(c, e)| c * n.powf(e)).sum()
}

fn first_positive_index(denominator: impl Fn(usize) -> f64) -> Result<usize> {
    (1..=1_000)
        .find(|&n| denominator(n) > 0.0)
        .ok_or_else(|| Error::Domain("denominator is not positive for any n ≤ 1000".into()))
}

/// `n ↦ seq.term(index_map(n))` for `n ≥ 1`. The map is checked to be
/// strictly increasing over the default horizon and to land in the domain
/// of `seq`.
pub fn subsequence(seq: &DecaySequence, index_map: IndexMap) -> Result<DecaySequence> {
    let first = index_map.apply(1);
    if first < seq.offset {
        return Err(Error::Index { index: first, offset: seq.offset });
    }
    let horizon = seq
        .last_index()
        .map_or(DEFAULT_HORIZON, |last| last.min(DEFAULT_HORIZON));
    let mut prev = first;
    for n in 2..=horizon {
        let next = index_map.apply(n);
        if next <= prev {
            return Err(Error::InvalidMap(n));
        }
        if seq.last_index().is_some_and(|last| next > last) {
            break;
        }
        prev = next;
    }
    let spec = format!("{}∘({})", seq.spec, index_map.label());
    Ok(DecaySequence {
        family: Family::Subsequence { base: Box::new(seq.clone()), map: index_map },
        offset: 1,
        spec,
    })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Classifies the decay rate from the terms with index in `[N/2, N]`
/// (counted from the offset).
///
/// Fits `ln(1/term)` against `ln n` and against `n`; the residual is
/// measured relative to the spread of `ln(1/term)`. Exactly one fit must be
/// within [`FIT_TOLERANCE`], otherwise the result is `Unknown`.
pub fn rate_classify(seq: &DecaySequence, horizon: usize) -> Rate {
    if horizon < 16 {
        return Rate::Unknown;
    }
    let start = seq.offset + horizon / 2;
    let end = seq.offset + horizon - 1;
    if seq.last_index().is_some_and(|last| last < end) {
        return Rate::Unknown;
    }
    let mut ns = Vec::new();
    let mut ys = Vec::new();
    for n in start..=end {
        match seq.log_inverse_term(n) {
            Ok(y) if y.is_finite() => {
                ns.push(n as f64);
                ys.push(y);
            }
            _ => return Rate::Unknown,
        }
    }
    let spread = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ys.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(spread > 0.0) {
        return Rate::Unknown;
    }
    let logs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (_, _, poly_rms) = linear_fit(&logs, &ys);
    let (exp_slope, _, exp_rms) = linear_fit(&ns, &ys);
    let poly_ok = poly_rms / spread <= FIT_TOLERANCE;
    let exp_ok = exp_rms / spread <= FIT_TOLERANCE;
    match (poly_ok, exp_ok) {
        (true, false) => {
            // Two-point tail estimate: exact for pure power laws.
            let (y0, y1) = (ys[0], ys[ys.len() - 1]);
            let (l0, l1) = (logs[0], logs[logs.len() - 1]);
            let m = (y1 - y0) / (l1 - l0);
            let a = (y1 - m * l1).exp();
            Rate::Polynomial { m, a }
        }
        (false, true) => Rate::Exponential { a: exp_slope.exp() },
        _ => Rate::Unknown,
    }
}

impl FromStr for DecaySequence {
    type Err = Error;

    /// Parses `harmonic:p,q`, `poly:m,a`, `exp:a` or `list:v1,v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("sequence spec {s:?} lacks a ':'")))?;
        let nums = args
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let want = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!("{kind} takes {k} argument(s), got {}", nums.len())))
            }
        };
        let seq = match kind.trim() {
            "harmonic" => {
                want(2)?;
                Self::harmonic(nums[0], nums[1])?
            }
            "poly" => {
                want(2)?;
                Self::power(nums[0], nums[1])?
            }
            "exp" => {
                want(1)?;
                Self::exponential(nums[0])?
            }
            "list" => return Self::explicit(nums),
            other => return Err(Error::Parse(format!("unknown sequence family {other:?}"))),
        };
        seq.validate()?;
        Ok(seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn term_examples() {
        let h = DecaySequence::harmonic(0.0, 1.0).unwrap();
        assert_eq!(h.term(5).unwrap(), 0.2);
        let e = DecaySequence::exponential(2.0).unwrap();
        assert_eq!(e.term(3).unwrap(), 0.125);
        let p = DecaySequence::polynomial(vec![(1.0, 2.0), (1.0, 1.0)]).unwrap();
        assert_eq!(p.term(10).unwrap(), 1.0 / 110.0);
    }

    #[test]
    fn term_errors() {
        let e = DecaySequence::exponential(2.0).unwrap().with_offset(3).unwrap();
        assert_eq!(e.term(2), Err(Error::Index { index: 2, offset: 3 }));
        // Underflow is reported, not returned as a zero term.
        assert!(matches!(e.term(2000), Err(Error::Domain(_))));
        // p + q n ≤ 0 for small n moves the offset forward.
        let h = DecaySequence::harmonic(-3.5, 1.0).unwrap();
        assert_eq!(h.offset(), 4);
        assert!(DecaySequence::harmonic(1.0, 0.0).is_err());
        assert!(DecaySequence::exponential(1.0).is_err());
    }

    #[test]
    fn explicit_lists_are_checked() {
        assert!(DecaySequence::explicit(vec![0.5, 0.25, 0.125]).is_ok());
        assert!(DecaySequence::explicit(vec![0.5, 0.5]).is_err());
        assert!(DecaySequence::explicit(vec![0.5, -0.1]).is_err());
        let l = DecaySequence::explicit(vec![0.5, 0.25]).unwrap();
        assert_eq!(l.term(2).unwrap(), 0.25);
        assert!(matches!(l.term(3), Err(Error::Index { .. })));
    }

    #[test]
    fn validate_rejects_slow_sequences() {
        let slow = DecaySequence::harmonic(0.0, 1e-6).unwrap();
        assert!(slow.validate().is_err());
        assert!(DecaySequence::exponential(1.001).unwrap().validate().is_ok());
    }

    #[test]
    fn subsequence_examples() {
        let h = DecaySequence::harmonic(0.0, 1.0).unwrap();
        let even = subsequence(&h, IndexMap::affine(2, 0)).unwrap();
        for n in 1..50 {
            assert_eq!(even.term(n).unwrap(), 1.0 / (2 * n) as f64);
        }
        let same = subsequence(&h, IndexMap::identity()).unwrap();
        for n in 1..50 {
            assert_eq!(same.term(n).unwrap(), h.term(n).unwrap());
        }
        let stuck = IndexMap::new("n then 5", |n| if n < 5 { n } else { 5 });
        assert_eq!(subsequence(&h, stuck).unwrap_err(), Error::InvalidMap(6));
        let flat = IndexMap::new("n<5 else 4", |n| if n < 5 { n } else { 4 });
        assert_eq!(subsequence(&h, flat).unwrap_err(), Error::InvalidMap(5));
    }

    #[test]
    fn rate_examples() {
        let s = DecaySequence::power(2.0, 1.0).unwrap();
        assert_eq!(rate_classify(&s, 64), Rate::Polynomial { m: 2.0, a: 1.0 });
        let e = DecaySequence::exponential(2.0).unwrap();
        match rate_classify(&e, 64) {
            Rate::Exponential { a } => assert!((a - 2.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let s3 = DecaySequence::power(2.0, 3.0).unwrap();
        match rate_classify(&s3, 64) {
            Rate::Polynomial { m, a } => {
                assert!((m - 2.0).abs() < 1e-12);
                assert!((a - 3.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        // n² + n: leading behaviour n², a = 1.
        let p = DecaySequence::polynomial(vec![(1.0, 2.0), (1.0, 1.0)]).unwrap();
        match rate_classify(&p, 10_000) {
            Rate::Polynomial { m, a } => {
                assert!((m - 2.0).abs() < 1e-3);
                assert!((a - 1.0).abs() < 1e-2);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(rate_classify(&s, 8), Rate::Unknown);
        // Exponential sequences far past f64 underflow still classify.
        assert!(matches!(rate_classify(&e, 10_000), Rate::Exponential { .. }));
    }

    #[test]
    fn parse_specs() {
        let s: DecaySequence = "harmonic:0,1".parse().unwrap();
        assert_eq!(s.term(4).unwrap(), 0.25);
        let s: DecaySequence = "poly:2,3".parse().unwrap();
        assert_eq!(s.term(1).unwrap(), 1.0 / 3.0);
        let s: DecaySequence = "exp:4".parse().unwrap();
        assert_eq!(s.term(2).unwrap(), 1.0 / 16.0);
        let s: DecaySequence = "list:0.5,0.25,0.1".parse().unwrap();
        assert_eq!(s.term(3).unwrap(), 0.1);
        assert!("exp".parse::<DecaySequence>().is_err());
        assert!("exp:2,3".parse::<DecaySequence>().is_err());
        assert!("cubic:2".parse::<DecaySequence>().is_err());
        assert!("exp:x".parse::<DecaySequence>().is_err());
    }

    proptest! {
        #[test]
        fn built_in_families_decrease(p in -5.0f64..5.0, q in 0.1f64..10.0, m in 0.5f64..4.0,
                                      a in 0.1f64..10.0, base in 1.01f64..10.0) {
            let seqs = [
                DecaySequence::harmonic(p, q).unwrap(),
                DecaySequence::power(m, a).unwrap(),
                DecaySequence::exponential(base).unwrap(),
            ];
            for s in &seqs {
                let mut prev = s.term(s.offset()).unwrap();
                for n in s.offset() + 1..s.offset() + 200 {
                    let Ok(t) = s.term(n) else { break };
                    prop_assert!(t > 0.0 && t < prev, "{} at {n}", s.spec());
                    prev = t;
                }
            }
        }

        #[test]
        fn exponential_rate_within_one_percent(base in 1.05f64..20.0, horizon in 32usize..400) {
            let s = DecaySequence::exponential(base).unwrap();
            match rate_classify(&s, horizon) {
                Rate::Exponential { a } => prop_assert!((a - base).abs() <= 0.01 * base),
                other => prop_assert!(false, "{other:?}"),
            }
        }
    }
}

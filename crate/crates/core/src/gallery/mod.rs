//! Example and counterexample functions: closed-form functions on intervals
//! and functions sampled on `{0} ∪ {h_n} ∪ {−k_n}`.

mod envelope;
pub mod weierstrass;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use envelope::{dense_slope, sine_envelope, DenseCell, SlopeSequence};
pub use weierstrass::weierstrass;

use crate::error::{Error, Result};
use crate::extreal::ClosedExtSet;
use crate::seqgen::DecaySequence;

/// Default truncation tolerance for Weierstrass evaluations.
pub const DEFAULT_WEIERSTRASS_TOL: f64 = 1e-12;

/// Where a [`GalleryFunction`] may be evaluated.
#[derive(Debug, Clone)]
pub enum Domain {
    /// Closed interval; the bounds may be infinite.
    Interval { lo: f64, hi: f64 },
    /// `{0} ∪ {h_n} ∪ {−k_n}`.
    Discrete { h: DecaySequence, k: DecaySequence },
}

impl Domain {
    pub fn real_line() -> Self {
        Domain::Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Domain::Discrete { .. })
    }

    /// Whether points on both sides of `x` belong to the domain.
    pub fn two_sided_at(&self, x: f64) -> bool {
        match self {
            Domain::Interval { lo, hi } => *lo < x && x < *hi,
            Domain::Discrete { .. } => x == 0.0,
        }
    }
}

/// The function families of the gallery, with their parameters.
#[derive(Debug, Clone)]
pub enum Kind {
    Weierstrass { a: f64, b: i64, tol: f64 },
    SineEnvelope { a: f64, b: f64 },
    DenseSlope { target: ClosedExtSet, slopes: SlopeSequence },
    TwoSlope { right: f64, left: f64 },
    Abs,
    SqrtSin,
    GluedG { a: f64, b: f64, c: f64, d: f64 },
    Square,
    Sine,
    Cube,
    Sqrt,
}

/// An evaluable real function with its domain.
#[derive(Debug, Clone)]
pub struct GalleryFunction {
    kind: Kind,
    domain: Domain,
}

impl GalleryFunction {
    fn new(kind: Kind, domain: Domain) -> Self {
        Self { kind, domain }
    }

    pub fn weierstrass(a: f64, b: i64, tol: f64) -> Result<Self> {
        weierstrass::check_params(a, b)?;
        if !(tol > 0.0) {
            return Err(Error::Param(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self::new(Kind::Weierstrass { a, b, tol }, Domain::real_line()))
    }

    /// `f_{a,b}` on `[0, 1]`.
    pub fn sine_envelope(a: f64, b: f64) -> Result<Self> {
        envelope::check_envelope(a, b)?;
        Ok(Self::new(Kind::SineEnvelope { a, b }, Domain::Interval { lo: 0.0, hi: 1.0 }))
    }

    /// Two-slope function on `{0} ∪ {h_n} ∪ {−k_n}` with `f(h_n) = R h_n`
    /// and `f(−k_n) = −L k_n`.
    pub fn discrete_two_slope(right: f64, left: f64, h: DecaySequence, k: DecaySequence) -> Self {
        Self::new(Kind::TwoSlope { right, left }, Domain::Discrete { h, k })
    }

    pub fn abs() -> Self {
        Self::new(Kind::Abs, Domain::real_line())
    }

    /// `√x sin(1/x)` on `[0, 1]`.
    pub fn sqrt_sin() -> Self {
        Self::new(Kind::SqrtSin, Domain::Interval { lo: 0.0, hi: 1.0 })
    }

    /// `f_{a,b}(x)` for `x ≥ 0` and `f_{−d,−c}(−x)` for `x < 0`, on `[−1, 1]`.
    pub fn glued_g(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        envelope::check_envelope(a, b)?;
        envelope::check_envelope(-d, -c)?;
        Ok(Self::new(Kind::GluedG { a, b, c, d }, Domain::Interval { lo: -1.0, hi: 1.0 }))
    }

    pub fn square() -> Self {
        Self::new(Kind::Square, Domain::real_line())
    }

    pub fn sine() -> Self {
        Self::new(Kind::Sine, Domain::real_line())
    }

    pub fn cube() -> Self {
        Self::new(Kind::Cube, Domain::real_line())
    }

    pub fn sqrt() -> Self {
        Self::new(Kind::Sqrt, Domain::Interval { lo: 0.0, hi: f64::INFINITY })
    }

    pub(crate) fn from_dense_slope(target: ClosedExtSet, slopes: SlopeSequence) -> Self {
        Self::new(Kind::DenseSlope { target, slopes }, Domain::Interval { lo: 0.0, hi: 1.0 })
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Registry name of the family.
    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Weierstrass { .. } => "weierstrass",
            Kind::SineEnvelope { .. } => "sine_envelope",
            Kind::DenseSlope { .. } => "dense_slope",
            Kind::TwoSlope { .. } => "two_slope",
            Kind::Abs => "abs",
            Kind::SqrtSin => "sqrt_sin",
            Kind::GluedG { .. } => "glued_g",
            Kind::Square => "square",
            Kind::Sine => "sin",
            Kind::Cube => "cube",
            Kind::Sqrt => "sqrt",
        }
    }

    /// Family parameters as strings, for reports.
    pub fn params(&self) -> BTreeMap<String, String> {
        let mut p = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            p.insert(k.to_string(), v);
        };
        match &self.kind {
            Kind::Weierstrass { a, b, tol } => {
                put("a", a.to_string());
                put("b", b.to_string());
                put("tol", tol.to_string());
            }
            Kind::SineEnvelope { a, b } => {
                put("a", a.to_string());
                put("b", b.to_string());
            }
            Kind::DenseSlope { target, slopes } => {
                put("target", target.to_string());
                put("slopes", slopes.to_string());
            }
            Kind::TwoSlope { right, left } => {
                put("R", right.to_string());
                put("L", left.to_string());
                if let Domain::Discrete { h, k } = &self.domain {
                    put("h", h.spec().to_string());
                    put("k", k.spec().to_string());
                }
            }
            Kind::GluedG { a, b, c, d } => {
                put("a", a.to_string());
                put("b", b.to_string());
                put("c", c.to_string());
                put("d", d.to_string());
            }
            _ => {}
        }
        p
    }

    /// Continuous on its (interval) domain.
    pub fn is_continuous(&self) -> bool {
        !matches!(self.kind, Kind::DenseSlope { .. } | Kind::TwoSlope { .. })
    }

    /// Exact derivative at `x` for the smooth controls.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match self.kind {
            Kind::Square => Some(2.0 * x),
            Kind::Sine => Some(x.cos()),
            Kind::Cube => Some(3.0 * x * x),
            _ => None,
        }
    }

    pub fn in_domain(&self, x: f64) -> bool {
        match &self.domain {
            Domain::Interval { lo, hi } => x.is_finite() && *lo <= x && x <= *hi,
            Domain::Discrete { h, k } => {
                x == 0.0
                    || (x > 0.0 && find_index(h, x).is_some())
                    || (x < 0.0 && find_index(k, -x).is_some())
            }
        }
    }

    /// Evaluates the function; points outside the domain are an error.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let outside = || Error::Domain(format!("{} is not defined at {x}", self.name()));
        match &self.domain {
            Domain::Interval { lo, hi } => {
                if !(x.is_finite() && *lo <= x && x <= *hi) {
                    return Err(outside());
                }
            }
            Domain::Discrete { h, k } => {
                let member = x == 0.0
                    || (x > 0.0 && find_index(h, x).is_some())
                    || (x < 0.0 && find_index(k, -x).is_some());
                if !member {
                    return Err(outside());
                }
            }
        }
        Ok(match &self.kind {
            Kind::Weierstrass { a, b, tol } => weierstrass(*a, *b, x, *tol)?,
            Kind::SineEnvelope { a, b } => sine_envelope(*a, *b, x)?,
            Kind::DenseSlope { slopes, .. } => envelope::dense_eval(slopes, x),
            Kind::TwoSlope { right, left } => {
                if x > 0.0 {
                    right * x
                } else if x < 0.0 {
                    left * x
                } else {
                    0.0
                }
            }
            Kind::Abs => x.abs(),
            Kind::SqrtSin => {
                if x == 0.0 {
                    0.0
                } else {
                    x.sqrt() * (1.0 / x).sin()
                }
            }
            Kind::GluedG { a, b, c, d } => {
                if x >= 0.0 {
                    sine_envelope(*a, *b, x)?
                } else {
                    sine_envelope(-d, -c, -x)?
                }
            }
            Kind::Square => x * x,
            Kind::Sine => x.sin(),
            Kind::Cube => x * x * x,
            Kind::Sqrt => x.sqrt(),
        })
    }
}

/// Index `n` with `seq.term(n) == x`, found by bisection on the decreasing
/// sequence.
pub fn find_index(seq: &DecaySequence, x: f64) -> Option<usize> {
    if !(x > 0.0) {
        return None;
    }
    let lo = seq.offset();
    let first = seq.term(lo).ok()?;
    if x > first {
        return None;
    }
    if x == first {
        return Some(lo);
    }
    // Find hi with term(hi) < x (or hi past the domain).
    let mut step = 1usize;
    let mut hi = lo + 1;
    loop {
        match seq.term(hi) {
            Ok(t) if t == x => return Some(hi),
            Ok(t) if t > x => {
                step = step.saturating_mul(2);
                hi = hi.checked_add(step)?;
            }
            _ => break,
        }
    }
    // Invariant: term(lo) > x, and term(hi) < x or undefined.
    let mut lo = lo;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match seq.term(mid) {
            Ok(t) if t == x => return Some(mid),
            Ok(t) if t > x => lo = mid,
            _ => hi = mid,
        }
    }
    None
}

/// All registry names, in display order.
pub const REGISTRY: &[(&str, &str)] = &[
    ("weierstrass", "a=0.5,b=13[,tol=1e-12]  Σ aⁿ cos(bⁿπx) on R"),
    ("sine_envelope", "a,b  f_{a,b} on [0,1]"),
    ("dense_slope", "lo,hi | slopes=v1;v2;...  piecewise slopes a_k x with √x cells on [0,1]"),
    ("two_slope", "R,L,h=<seq>,k=<seq>  R x on {h_n}, L x on {−k_n}"),
    ("abs", "|x| on R"),
    ("sqrt_sin", "√x sin(1/x) on [0,1]"),
    ("glued_g", "a,b,c,d  f_{a,b}(x) for x ≥ 0, f_{−d,−c}(−x) for x < 0 on [−1,1]"),
    ("square", "x² on R"),
    ("sin", "sin x on R"),
    ("cube", "x³ on R"),
    ("sqrt", "√x on [0,∞)"),
];

/// Splits `k=v,k=v` where a value may itself contain commas (`h=harmonic:0,1`).
fn parse_params(args: &str) -> Result<BTreeMap<String, String>> {
    let mut out: BTreeMap<String, String> = BTreeMap::new();
    let mut last: Option<String> = None;
    for token in args.split(',').filter(|t| !t.is_empty()) {
        match token.split_once('=') {
            Some((k, v)) => {
                let k = k.trim().to_string();
                out.insert(k.clone(), v.trim().to_string());
                last = Some(k);
            }
            None => {
                let k = last
                    .as_ref()
                    .ok_or_else(|| Error::Parse(format!("parameter {token:?} lacks a name")))?;
                let v = out.get_mut(k).expect("last key is present");
                v.push(',');
                v.push_str(token.trim());
            }
        }
    }
    Ok(out)
}

fn number(params: &BTreeMap<String, String>, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key) {
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("parameter {key}={v:?} is not a number"))),
        None => default.ok_or_else(|| Error::Parse(format!("missing parameter {key}"))),
    }
}

impl FromStr for GalleryFunction {
    type Err = Error;

    /// Parses `name[:k=v,...]`, e.g. `weierstrass:a=0.5,b=13`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let p = parse_params(args)?;
        let name = name.trim();
        let f = match name {
            "weierstrass" => {
                let b = number(&p, "b", Some(13.0))?;
                if b.fract() != 0.0 {
                    return Err(Error::Param(format!("weierstrass b must be an integer, got {b}")));
                }
                Self::weierstrass(
                    number(&p, "a", Some(0.5))?,
                    b as i64,
                    number(&p, "tol", Some(DEFAULT_WEIERSTRASS_TOL))?,
                )?
            }
            "sine_envelope" => Self::sine_envelope(number(&p, "a", None)?, number(&p, "b", None)?)?,
            "dense_slope" => {
                if let Some(list) = p.get("slopes") {
                    let values = list
                        .split(';')
                        .map(|t| {
                            t.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::Parse(format!("bad slope {t:?}")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let target = envelope::cyclic_target(&values);
                    dense_slope(&target, SlopeSequence::Cyclic(values))?
                } else {
                    let (lo, hi) = (number(&p, "lo", None)?, number(&p, "hi", None)?);
                    let slopes = SlopeSequence::van_der_corput(lo, hi)?;
                    let target = slopes.target();
                    dense_slope(&target, slopes)?
                }
            }
            "two_slope" => {
                let seq = |key: &str| -> Result<DecaySequence> {
                    p.get(key)
                        .ok_or_else(|| Error::Parse(format!("missing parameter {key}")))?
                        .parse()
                };
                Self::discrete_two_slope(
                    number(&p, "R", None)?,
                    number(&p, "L", None)?,
                    seq("h")?,
                    seq("k")?,
                )
            }
            "abs" => Self::abs(),
            "sqrt_sin" => Self::sqrt_sin(),
            "glued_g" => Self::glued_g(
                number(&p, "a", None)?,
                number(&p, "b", None)?,
                number(&p, "c", None)?,
                number(&p, "d", None)?,
            )?,
            "square" => Self::square(),
            "sin" => Self::sine(),
            "cube" => Self::cube(),
            "sqrt" => Self::sqrt(),
            other => return Err(Error::Parse(format!("unknown gallery function {other:?}"))),
        };
        Ok(f)
    }
}

impl fmt::Display for GalleryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        let params = self.params();
        if !params.is_empty() {
            let body: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, ":{}", body.join(","))?;
        }
        Ok(())
    }
}

impl Serialize for GalleryFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            name: &'a str,
            params: BTreeMap<String, String>,
            continuous: bool,
        }
        View { name: self.name(), params: self.params(), continuous: self.is_continuous() }
            .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_slope() -> GalleryFunction {
        GalleryFunction::discrete_two_slope(
            1.0,
            0.0,
            DecaySequence::exponential(2.0).unwrap(),
            DecaySequence::exponential(4.0).unwrap(),
        )
    }

    #[test]
    fn discrete_domain_membership() {
        let f = two_slope();
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
        assert_eq!(f.eval(0.25).unwrap(), 0.25);
        assert_eq!(f.eval(-1.0 / 16.0).unwrap(), 0.0);
        assert!(matches!(f.eval(0.3), Err(Error::Domain(_))));
        assert!(matches!(f.eval(-0.5), Err(Error::Domain(_))));
        assert!(matches!(f.eval(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn two_slope_quotients_are_exact_on_dyadic_sequences() {
        let f = GalleryFunction::discrete_two_slope(
            0.7,
            -3.1,
            DecaySequence::exponential(2.0).unwrap(),
            DecaySequence::exponential(4.0).unwrap(),
        );
        for n in 1..200 {
            let h = 2f64.powi(-n);
            let k = 4f64.powi(-n);
            assert_eq!(f.eval(h).unwrap() / h, 0.7);
            assert_eq!(f.eval(-k).unwrap() / -k, -3.1);
        }
    }

    #[test]
    fn find_index_on_each_family() {
        let seqs: Vec<DecaySequence> = vec![
            "harmonic:0.5,2".parse().unwrap(),
            "poly:2,3".parse().unwrap(),
            "exp:3".parse().unwrap(),
            "list:0.9,0.5,0.1,0.01".parse().unwrap(),
        ];
        for s in &seqs {
            for n in s.offset()..s.offset() + 4 {
                let t = s.term(n).unwrap();
                assert_eq!(find_index(s, t), Some(n), "{}", s.spec());
                assert_eq!(find_index(s, t * (1.0 + 1e-9)), None);
            }
        }
    }

    #[test]
    fn closed_forms_and_domains() {
        assert_eq!(GalleryFunction::abs().eval(-2.5).unwrap(), 2.5);
        assert_eq!(GalleryFunction::sqrt_sin().eval(0.0).unwrap(), 0.0);
        assert!(GalleryFunction::sqrt_sin().eval(-0.1).is_err());
        assert!(GalleryFunction::sine_envelope(-1.0, 2.0).unwrap().eval(1.5).is_err());
        assert!(GalleryFunction::sqrt().eval(-1e-3).is_err());
        assert_eq!(GalleryFunction::cube().eval(2.0).unwrap(), 8.0);
        assert!(GalleryFunction::abs().eval(f64::NAN).is_err());
    }

    #[test]
    fn glued_g_mirrors_the_left_envelope() {
        let g = GalleryFunction::glued_g(-1.0, 2.0, -3.0, 1.0).unwrap();
        for &x in &[0.013, 0.2, 0.77] {
            assert_eq!(g.eval(x).unwrap(), sine_envelope(-1.0, 2.0, x).unwrap());
            assert_eq!(g.eval(-x).unwrap(), sine_envelope(-1.0, 3.0, x).unwrap());
        }
        assert!(GalleryFunction::glued_g(-1.0, 2.0, 1.0, -3.0).is_err());
    }

    #[test]
    fn registry_parses() {
        let w: GalleryFunction = "weierstrass:a=0.5,b=13".parse().unwrap();
        assert!((w.eval(0.0).unwrap() - 2.0).abs() < 1e-11);
        let s: GalleryFunction = "sine_envelope:a=-1,b=2".parse().unwrap();
        assert_eq!(s.name(), "sine_envelope");
        let t: GalleryFunction = "two_slope:R=1,L=0,h=exp:2,k=exp:4".parse().unwrap();
        assert_eq!(t.eval(0.5).unwrap(), 0.5);
        let t: GalleryFunction = "two_slope:R=1,L=0,h=harmonic:0,1,k=poly:2,3".parse().unwrap();
        assert_eq!(t.eval(1.0 / 3.0).unwrap(), 1.0 / 3.0);
        let d: GalleryFunction = "dense_slope:slopes=0;1;-2".parse().unwrap();
        assert_eq!(d.name(), "dense_slope");
        let d: GalleryFunction = "dense_slope:lo=-1,hi=1".parse().unwrap();
        assert!(d.eval(0.3).is_ok());
        assert!("nope".parse::<GalleryFunction>().is_err());
        assert!("sine_envelope:a=2,b=1".parse::<GalleryFunction>().is_err());
        assert!("weierstrass:b=12".parse::<GalleryFunction>().is_err());
        for (name, _) in REGISTRY {
            let spec = match *name {
                "sine_envelope" => "sine_envelope:a=-1,b=2",
                "dense_slope" => "dense_slope:lo=0,hi=1",
                "two_slope" => "two_slope:R=1,L=0,h=exp:2,k=exp:4",
                "glued_g" => "glued_g:a=-1,b=2,c=-3,d=1",
                other => other,
            };
            let f: GalleryFunction = spec.parse().unwrap();
            assert_eq!(f.name(), *name);
        }
    }
}

//! Continued fractions, commensurability of logarithms, and witnesses
//! `(i, j)` with `i·α − j` close to a target, for `α = ln a / ln b`.
//!
//! `α` is held in fixed point with 128 fractional bits. Multiples `i·α` are
//! formed by exact wrapping additions, so witnesses for `i` up to `10⁶` and
//! beyond carry no accumulated rounding.

mod extended;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub use extended::ln_fixed;

/// Default search bound on `i` in [`approx_target`].
pub const DEFAULT_I_BOUND: u64 = 1_000_000;

/// Default exponent bound in [`rational_check`].
pub const DEFAULT_EXP_BOUND: u32 = 64;

/// Environment variable selecting the precision of `ln a / ln b`.
pub const PRECISION_ENV: &str = "SEQDERIV_PRECISION";

const SCALE: f64 = 1.0 / 340282366920938463463374607431768211456.0; // 2^-128

/// How `α = ln a / ln b` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// 256-bit fixed-point logarithms, quotient kept to 128 bits.
    #[default]
    Extended,
    /// Host `f64` logarithms.
    Double,
}

impl Precision {
    /// Reads [`PRECISION_ENV`]: unset, empty or `extended` selects
    /// [`Precision::Extended`]; `double` selects [`Precision::Double`].
    pub fn from_env() -> Result<Self> {
        match std::env::var(PRECISION_ENV) {
            Err(_) => Ok(Self::Extended),
            Ok(v) => v.parse(),
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "extended" => Ok(Self::Extended),
            "double" => Ok(Self::Double),
            other => Err(Error::Parse(format!("unknown precision {other:?}"))),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Extended => "extended",
            Self::Double => "double",
        })
    }
}

/// A nonnegative real `whole + frac·2^-128`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alpha {
    whole: u64,
    frac: u128,
}

impl Alpha {
    /// Exact for doubles whose bits all lie at or above `2^-128`; lower bits
    /// are truncated.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::Param(format!("alpha must be finite and nonnegative, got {x}")));
        }
        if x >= 2f64.powi(64) {
            return Err(Error::Param(format!("alpha {x} exceeds 2^64")));
        }
        if x == 0.0 {
            return Ok(Self { whole: 0, frac: 0 });
        }
        let (m, e) = extended::decompose(x);
        let shift = e + 128;
        let scaled = if shift >= 0 {
            BigUint::from(m) << shift as u32
        } else {
            BigUint::from(m) >> (-shift) as u32
        };
        Ok(Self::from_scaled(&scaled))
    }

    /// `ln a / ln b` for `a, b > 1`.
    pub fn log_ratio(a: f64, b: f64, precision: Precision) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(v.is_finite() && v > 1.0) {
                return Err(Error::Param(format!("{name} must be a finite real > 1, got {v}")));
            }
        }
        match precision {
            Precision::Double => Self::from_f64(a.ln() / b.ln()),
            Precision::Extended => {
                let q = (ln_fixed(a) << 128u32) / ln_fixed(b);
                let q = q.to_biguint().expect("both logarithms are positive");
                if q.bits() > 192 {
                    return Err(Error::Param(format!("ln {a} / ln {b} exceeds 2^64")));
                }
                Ok(Self::from_scaled(&q))
            }
        }
    }

    fn from_scaled(v: &BigUint) -> Self {
        let digits = v.to_u64_digits();
        let get = |i: usize| digits.get(i).copied().unwrap_or(0);
        Self { whole: get(2), frac: (get(1) as u128) << 64 | get(0) as u128 }
    }

    /// `α·2^128` as an integer.
    pub fn scaled(&self) -> BigUint {
        (BigUint::from(self.whole) << 128u32) + self.frac
    }

    pub fn whole(&self) -> u64 {
        self.whole
    }

    pub fn frac(&self) -> u128 {
        self.frac
    }

    /// Nearest double.
    pub fn to_f64(&self) -> f64 {
        fixed_to_f64(&BigInt::from(self.scaled()))
    }

    /// Partial quotients of the continued fraction of this value, exact.
    pub fn continued_fraction(&self, depth: usize) -> Result<Vec<u128>> {
        if depth == 0 {
            return Err(Error::Param("depth must be at least 1".into()));
        }
        euclid(self.scaled(), BigUint::from(1u8) << 128u32, depth)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

fn fixed_to_f64(v: &BigInt) -> f64 {
    v.to_f64().expect("finite") * SCALE
}

fn euclid(mut num: BigUint, mut den: BigUint, depth: usize) -> Result<Vec<u128>> {
    let mut out = Vec::with_capacity(depth);
    while out.len() < depth && !den.is_zero() {
        let q = &num / &den;
        let r = &num - &q * &den;
        let q = q
            .to_u128()
            .ok_or_else(|| Error::Param("partial quotient exceeds 128 bits".into()))?;
        out.push(q);
        num = den;
        den = r;
    }
    Ok(out)
}

/// Partial quotients `a₀; a₁, a₂, …` of a positive double, computed exactly
/// from its binary expansion. Terminates early for values whose expansion is
/// shorter than `depth`.
pub fn continued_fraction(alpha: f64, depth: usize) -> Result<Vec<u128>> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Param(format!("alpha must be finite and positive, got {alpha}")));
    }
    if depth == 0 {
        return Err(Error::Param("depth must be at least 1".into()));
    }
    let (m, e) = extended::decompose(alpha);
    let (num, den) = if e >= 0 {
        (BigUint::from(m) << e as u32, BigUint::from(1u8))
    } else {
        (BigUint::from(m), BigUint::from(1u8) << (-e) as u32)
    };
    euclid(num, den, depth)
}

/// Convergents `(p_k, q_k)` of a continued fraction. Stops before the first
/// convergent that does not fit in `u128`.
pub fn convergents(cf: &[u128]) -> Vec<(u128, u128)> {
    let mut out = Vec::with_capacity(cf.len());
    let (mut p0, mut q0, mut p1, mut q1) = (1u128, 0u128, 0u128, 1u128);
    for &a in cf {
        let p = a.checked_mul(p0).and_then(|v| v.checked_add(p1));
        let q = a.checked_mul(q0).and_then(|v| v.checked_add(q1));
        let (Some(p), Some(q)) = (p, q) else { break };
        out.push((p, q));
        (p1, q1, p0, q0) = (p0, q0, p, q);
    }
    out
}

/// A pair `(i, j)` with `i·α − j` close to the target `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxWitness {
    pub i: u64,
    pub j: u64,
    /// `i·α − j`.
    pub achieved: f64,
    /// `|i·α − j − t|`.
    pub error: f64,
    pub alpha: f64,
    pub t: f64,
}

/// Outcome of [`approx_target`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Approximation {
    Found(ApproxWitness),
    /// No `i ≤ i_bound` reaches `eps`; `best` has the smallest error seen.
    NoWitness { i_bound: u64, eps: f64, best: ApproxWitness },
}

impl Approximation {
    pub fn witness(&self) -> Option<&ApproxWitness> {
        match self {
            Self::Found(w) => Some(w),
            Self::NoWitness { .. } => None,
        }
    }
}

/// Splits a finite double into `floor(t)` and `frac(t)·2^128`, both exact
/// unless `t` has bits below `2^-128` (those are floored away).
fn split_target(t: f64) -> Result<(i128, u128)> {
    if !t.is_finite() || t.abs() >= 2f64.powi(100) {
        return Err(Error::Param(format!("target must be finite and below 2^100, got {t}")));
    }
    if t == 0.0 {
        return Ok((0, 0));
    }
    let (m, e) = extended::decompose(t.abs());
    let mut v = BigInt::from(m);
    if t < 0.0 {
        v = -v;
    }
    // Right shifts of negative values round toward −∞, i.e. floor.
    let shift = e + 128;
    let v = if shift >= 0 { v << shift as u32 } else { v >> (-shift) as u32 };
    let int = &v >> 128u32;
    let frac = &v - (&int << 128u32);
    Ok((int.to_i128().expect("below 2^100"), frac.to_u128().expect("in [0, 2^128)")))
}

/// Smallest `i ∈ [1, i_bound]` for which some integer `j ≥ 0` gives
/// `|i·α − j − t| < eps`, with `j` the nearest such integer.
///
/// Every `i` is examined in increasing order, so the witness has minimal
/// `i`. The search runs in `O(i_bound)` word operations.
pub fn approx_target(alpha: &Alpha, t: f64, eps: f64, i_bound: u64) -> Result<Approximation> {
    if !(eps > 0.0) {
        return Err(Error::Param(format!("eps must be positive, got {eps}")));
    }
    if i_bound == 0 {
        return Err(Error::Param("i_bound must be at least 1".into()));
    }
    let (t_int, t_frac) = split_target(t)?;
    let eps_scaled = if eps >= 1.0 { u128::MAX } else { (eps * 2f64.powi(128)) as u128 };

    let half = 1u128 << 127;
    let (mut whole, mut frac) = (0i128, 0u128);
    let mut best: Option<(u64, i128, u128)> = None;
    for i in 1..=i_bound {
        let (f, carry) = frac.overflowing_add(alpha.frac);
        frac = f;
        whole += alpha.whole as i128 + carry as i128;

        // i·α − t = int + rem·2^-128 with rem ∈ [0, 2^128).
        let rem = frac.wrapping_sub(t_frac);
        let int = whole - t_int - (frac < t_frac) as i128;
        let (j, dist) = if rem >= half { (int + 1, rem.wrapping_neg()) } else { (int, rem) };
        if j < 0 {
            continue;
        }
        if best.is_none_or(|(_, _, d)| dist < d) {
            best = Some((i, j, dist));
        }
        if dist < eps_scaled {
            return Ok(Approximation::Found(witness(alpha, t, i, j as u64)));
        }
    }
    let best = match best {
        Some((i, j, _)) => witness(alpha, t, i, j as u64),
        None => witness(alpha, t, 1, 0),
    };
    Ok(Approximation::NoWitness { i_bound, eps, best })
}

fn witness(alpha: &Alpha, t: f64, i: u64, j: u64) -> ApproxWitness {
    let one = BigInt::from(1u8) << 128u32;
    let achieved = BigInt::from(alpha.scaled()) * i - &one * j;
    let (t_int, t_frac) = split_target(t).expect("validated by caller");
    let target = BigInt::from(t_int) * &one + t_frac;
    let diff: BigInt = &achieved - target;
    ApproxWitness {
        i,
        j,
        achieved: fixed_to_f64(&achieved),
        error: fixed_to_f64(&diff).abs(),
        alpha: alpha.to_f64(),
        t,
    }
}

/// Result of [`rational_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Commensurability {
    /// `a^q = b^p`, `gcd(p, q) = 1`; equivalently `ln a / ln b = p/q`.
    Rational { p: u32, q: u32 },
    /// No relation with `p, q ≤ exp_bound` was found. This is not a claim
    /// of irrationality.
    NoSmallRelation { exp_bound: u32 },
}

fn as_integer(x: f64) -> Option<u64> {
    (x.fract() == 0.0 && x < 2f64.powi(53)).then_some(x as u64)
}

/// Looks for `a^q = b^p` with `1 ≤ p, q ≤ exp_bound`.
///
/// Integer inputs are decided by exact big-integer powers. Other inputs use
/// the convergents of the extended-precision `ln a / ln b`: a relation is
/// reported when a convergent with `q ≤ exp_bound` matches to within
/// `2^-100`, which can misreport pairs whose logarithms agree that closely.
pub fn rational_check(a: f64, b: f64, exp_bound: u32) -> Result<Commensurability> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(v.is_finite() && v > 1.0) {
            return Err(Error::Param(format!("{name} must be a finite real > 1, got {v}")));
        }
    }
    if exp_bound == 0 {
        return Err(Error::Param("exp_bound must be at least 1".into()));
    }
    if let (Some(ia), Some(ib)) = (as_integer(a), as_integer(b)) {
        let (ia, ib) = (BigUint::from(ia), BigUint::from(ib));
        let powers_b: Vec<BigUint> = (1..=exp_bound).map(|p| ib.pow(p)).collect();
        let mut aq = BigUint::from(1u8);
        for q in 1..=exp_bound {
            aq *= &ia;
            if let Some(idx) = powers_b.iter().position(|bp| *bp == aq) {
                return Ok(Commensurability::Rational { p: idx as u32 + 1, q });
            }
        }
        return Ok(Commensurability::NoSmallRelation { exp_bound });
    }

    let alpha = Alpha::log_ratio(a, b, Precision::Extended)?;
    let scaled = BigInt::from(alpha.scaled());
    let cf = alpha.continued_fraction(64)?;
    for (p, q) in convergents(&cf) {
        if q > exp_bound as u128 || p > exp_bound as u128 {
            break;
        }
        if p == 0 {
            continue;
        }
        // |α − p/q| < 2^-100  ⇔  |q·α·2^128 − p·2^128| < q·2^28.
        let diff = &scaled * q - (BigInt::from(p) << 128u32);
        if diff.magnitude() < &(BigUint::from(q) << 28u32) {
            return Ok(Commensurability::Rational { p: p as u32, q: q as u32 });
        }
    }
    Ok(Commensurability::NoSmallRelation { exp_bound })
}

//! Truncated Weierstrass series `W(x) = Σ aⁿ cos(bⁿ π x)`.
//!
//! The phase `bⁿ x mod 2` is computed exactly from the binary expansion of
//! `x`, so high-order terms stay accurate even when `bⁿ x` is far beyond the
//! range where `f64` can represent it.

use std::f64::consts::PI;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// `1 + 3π/2`, the lower bound on `a·b` for the nowhere-differentiability
/// argument.
pub const CONDITION_BOUND: f64 = 1.0 + 1.5 * PI;

/// Checks `0 < a < 1` and `b` odd.
pub fn check_params(a: f64, b: i64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Param(format!("weierstrass needs 0 < a < 1, got {a}")));
    }
    if b % 2 == 0 {
        return Err(Error::Param(format!("weierstrass needs an odd b, got {b}")));
    }
    Ok(())
}

/// Whether `a·b > 1 + 3π/2`. Reported, never enforced.
pub fn satisfies_condition(a: f64, b: i64) -> bool {
    a * b.unsigned_abs() as f64 > CONDITION_BOUND
}

/// Index of the last term kept: the smallest `N` with `a^(N+1)/(1−a) ≤ tol`.
pub fn last_term(a: f64, tol: f64) -> usize {
    let mut n = 0usize;
    let mut tail = a / (1.0 - a);
    while tail > tol {
        tail *= a;
        n += 1;
    }
    n
}

/// Partial sum through the term chosen by [`last_term`], accumulated with
/// Neumaier compensation.
pub fn weierstrass(a: f64, b: i64, x: f64, tol: f64) -> Result<f64> {
    check_params(a, b)?;
    if !(tol > 0.0) {
        return Err(Error::Param(format!("tolerance must be positive, got {tol}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("weierstrass is defined on R, got {x}")));
    }
    let n_max = last_term(a, tol);
    let mut sum = NeumaierSum::default();
    let mut weight = 1.0;
    for phase in Phases::new(b.unsigned_abs(), x).take(n_max + 1) {
        sum.add(weight * cos_pi(phase));
        weight *= a;
    }
    Ok(sum.value())
}

/// Kahan–Babuška–Neumaier running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// `cos(π t)` for `t ≥ 0`, reduced to `[0, 1/4]` with exact steps so that
/// `cos_pi(1/2) = 0` and `cos_pi(1) = −1` hold exactly.
pub fn cos_pi(t: f64) -> f64 {
    let mut t = t % 2.0;
    if t > 1.0 {
        t = 2.0 - t;
    }
    let (u, sign) = if t > 0.5 { (1.0 - t, -1.0) } else { (t, 1.0) };
    let v = if u <= 0.25 { (PI * u).cos() } else { (PI * (0.5 - u)).sin() };
    sign * v
}

/// `bⁿ |x| mod 2` for `n = 0, 1, 2, …`, exact up to the final conversion to
/// `f64`. Requires `b` odd.
enum Phases {
    Constant(f64),
    Narrow { r: u128, mask: u128, b: u128, scale: f64 },
    Wide { r: BigUint, modulus: BigUint, b: BigUint, shift: u64 },
}

impl Phases {
    fn new(b: u64, x: f64) -> Self {
        let bits = x.abs().to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mut m, mut e2) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
        if m == 0 {
            return Phases::Constant(0.0);
        }
        let tz = m.trailing_zeros();
        m >>= tz;
        e2 += tz as i64;
        // |x| = m · 2^e2 with m odd.
        if e2 > 0 {
            return Phases::Constant(0.0);
        }
        if e2 == 0 {
            // Odd integer times an odd power: always 1 mod 2.
            return Phases::Constant(1.0);
        }
        let e = (-e2) as u32;
        if e < 128 {
            let mask = if e + 1 == 128 { u128::MAX } else { (1u128 << (e + 1)) - 1 };
            Phases::Narrow { r: m as u128 & mask, mask, b: b as u128, scale: 2f64.powi(-(e as i32)) }
        } else {
            let modulus = BigUint::from(1u8) << (e + 1);
            Phases::Wide {
                r: BigUint::from(m) % &modulus,
                modulus,
                b: BigUint::from(b),
                shift: e as u64 - 60,
            }
        }
    }
}

impl Iterator for Phases {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        match self {
            Phases::Constant(v) => Some(*v),
            Phases::Narrow { r, mask, b, scale } => {
                let out = *r as f64 * *scale;
                *r = r.wrapping_mul(*b) & *mask;
                Some(out)
            }
            Phases::Wide { r, modulus, b, shift } => {
                let top = (&*r >> *shift).to_u64_digits().first().copied().unwrap_or(0);
                let out = top as f64 * 2f64.powi(-60);
                *r = (&*r * &*b) % &*modulus;
                Some(out)
            }
        }
    }
}

//! Fixed-point natural logarithms with 256 fractional bits.
//!
//! `ln x = k·ln 2 + 2·atanh((y − 1)/(y + 1))` with `x = y·2^k`, `y ∈ [1, 2)`;
//! the series argument is at most 1/3, so each term gains over 3 bits.

use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};

/// Fractional bits of every fixed-point value in this module.
pub const FRAC_BITS: u32 = 256;

/// `2·atanh(p/q)·2^FRAC_BITS` for `|p/q| ≤ 1/3`.
fn two_atanh(p: &BigInt, q: &BigInt) -> BigInt {
    let p2 = p * p;
    let q2 = q * q;
    let mut power = (p.clone() << FRAC_BITS) / q;
    let mut sum = BigInt::from(0);
    let mut k = 1u32;
    while power.sign() != Sign::NoSign {
        sum += &power / k;
        power = power * &p2 / &q2;
        k += 2;
    }
    sum << 1
}

fn ln2() -> &'static BigInt {
    static LN2: OnceLock<BigInt> = OnceLock::new();
    LN2.get_or_init(|| two_atanh(&BigInt::from(1), &BigInt::from(3)))
}

/// Splits a positive finite double into `m·2^e` with `m` a 53-bit integer.
pub(crate) fn decompose(x: f64) -> (u64, i32) {
    debug_assert!(x > 0.0 && x.is_finite());
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

/// `ln x · 2^FRAC_BITS` for a positive finite double, accurate to a few
/// units in the last place.
pub fn ln_fixed(x: f64) -> BigInt {
    let (m, e) = decompose(x);
    let s = 63 - m.leading_zeros() as i32;
    let k = s + e;
    let unit = BigInt::from(1u64) << s as u32;
    let m = BigInt::from(m);
    ln2() * k + two_atanh(&(&m - &unit), &(&m + &unit))
}

//! Constructions on `[0, 1]` with prescribed right-hand secant sets: the
//! sine envelopes `f_{a,b}` and the piecewise-linear dense-slope function.

use std::fmt;

use crate::error::{Error, Result};
use crate::extreal::{ClosedExtSet, ExtReal};

use super::GalleryFunction;

pub(crate) fn check_envelope(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Param(format!("envelope needs finite a < b, got a={a}, b={b}")));
    }
    Ok(())
}

/// `f_{a,b}(x)` on `[0, 1]`.
///
/// For `|a| ≤ |b|`: `b x sin(1/x)` where `b sin(1/x) ≥ a`, else `a x`.
/// For `|b| < |a|`: `a x sin(1/x)` where `b sin(1/x) ≥ a`, else `b x`.
/// The second branch is kept exactly as published; for it the selector is
/// always true, so its secant set is `[a, |a|]` rather than `[a, b]`.
pub fn sine_envelope(a: f64, b: f64, x: f64) -> Result<f64> {
    check_envelope(a, b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("sine envelope is defined on [0,1], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let s = (1.0 / x).sin();
    let upper = b * s >= a;
    Ok(if a.abs() <= b.abs() {
        if upper {
            b * x * s
        } else {
            a * x
        }
    } else if upper {
        a * x * s
    } else {
        b * x
    })
}

/// The slope sequence `a_1, a_2, …` of a dense-slope function.
#[derive(Debug, Clone, PartialEq)]
pub enum SlopeSequence {
    /// `a_k = values[(k − 1) mod len]`.
    Cyclic(Vec<f64>),
    /// `a_k = lo + (hi − lo)·v(k)` with `v` the base-2 van der Corput
    /// sequence; dense in `[lo, hi]`.
    VanDerCorput { lo: f64, hi: f64 },
}

impl SlopeSequence {
    pub fn van_der_corput(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Param(format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(SlopeSequence::VanDerCorput { lo, hi })
    }

    /// `a_k` for `k ≥ 1`.
    pub fn slope(&self, k: usize) -> f64 {
        match self {
            SlopeSequence::Cyclic(v) => v[(k - 1) % v.len()],
            SlopeSequence::VanDerCorput { lo, hi } => lo + (hi - lo) * radical_inverse(k as u64),
        }
    }

    /// Closure of the slopes together with `+∞` (from the `√x` cells).
    pub fn target(&self) -> ClosedExtSet {
        match self {
            SlopeSequence::Cyclic(v) => cyclic_target(v),
            SlopeSequence::VanDerCorput { lo, hi } => ClosedExtSet::new(
                vec![(ExtReal::from_f64(*lo), ExtReal::from_f64(*hi))],
                vec![ExtReal::PosInf],
            )
            .expect("lo < hi"),
        }
    }
}

impl fmt::Display for SlopeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopeSequence::Cyclic(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "cyclic({})", parts.join(";"))
            }
            SlopeSequence::VanDerCorput { lo, hi } => write!(f, "vdc[{lo},{hi}]"),
        }
    }
}

pub(crate) fn cyclic_target(values: &[f64]) -> ClosedExtSet {
    ClosedExtSet::from_points(
        values.iter().map(|&v| ExtReal::from_f64(v)).chain([ExtReal::PosInf]),
    )
}

fn radical_inverse(mut k: u64) -> f64 {
    let mut inv = 0.0;
    let mut scale = 0.5;
    while k > 0 {
        if k & 1 == 1 {
            inv += scale;
        }
        k >>= 1;
        scale *= 0.5;
    }
    inv
}

/// Location of a point `x ∈ (0, 1]` in the dense-slope partition.
///
/// Block `n` is `(1/(n+1), 1/n]`, split into `n + 1` equal cells; cell `k`
/// of block `n` is `(ξ_{n,k−1}, ξ_{n,k}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseCell {
    pub block: usize,
    pub cell: usize,
}

impl DenseCell {
    pub fn locate(x: f64) -> Option<Self> {
        if !(x > 0.0 && x <= 1.0) {
            return None;
        }
        let mut n = ((1.0 / x).floor() as usize).max(1);
        while n > 1 && x > 1.0 / n as f64 {
            n -= 1;
        }
        while x <= 1.0 / (n + 1) as f64 {
            n += 1;
        }
        let left = 1.0 / (n + 1) as f64;
        let width = (1.0 / n as f64 - left) / (n + 1) as f64;
        let k = ((x - left) / width).ceil() as usize;
        Some(Self { block: n, cell: k.clamp(1, n + 1) })
    }

    /// Whether the cell carries `f(x) = √x` rather than a slope.
    pub fn is_root_cell(self) -> bool {
        self.cell == self.block + 1
    }

    /// `(ξ_{n,k−1}, ξ_{n,k}]` as a pair.
    pub fn bounds(self) -> (f64, f64) {
        let n = self.block as f64;
        let left = 1.0 / (n + 1.0);
        let width = (1.0 / n - left) / (n + 1.0);
        (left + (self.cell - 1) as f64 * width, left + self.cell as f64 * width)
    }
}

pub(crate) fn dense_eval(slopes: &SlopeSequence, x: f64) -> f64 {
    match DenseCell::locate(x) {
        None => 0.0,
        Some(c) if c.is_root_cell() => x.sqrt(),
        Some(c) => slopes.slope(c.cell) * x,
    }
}

/// Piecewise function on `[0, 1]` whose right-hand secant set at 0 is the
/// closure of the slopes plus `+∞`. `target` records the intended set; the
/// slopes being dense in it is the caller's responsibility.
pub fn dense_slope(target: &ClosedExtSet, slopes: SlopeSequence) -> Result<GalleryFunction> {
    if let SlopeSequence::Cyclic(v) = &slopes {
        if v.is_empty() {
            return Err(Error::Param("dense slope sequence is empty".into()));
        }
        if v.iter().any(|s| !s.is_finite()) {
            return Err(Error::Param("slopes must be finite".into()));
        }
    }
    if target.is_empty() {
        return Err(Error::Param("target set is empty".into()));
    }
    Ok(GalleryFunction::from_dense_slope(target.clone(), slopes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn envelope_examples() {
        assert_eq!(sine_envelope(-1.0, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(sine_envelope(3.0, 7.0, 0.0).unwrap(), 0.0);
        let v = sine_envelope(-1.0, 2.0, 2.0 / PI).unwrap();
        assert!((v - 4.0 / PI).abs() < 1e-15);
        let v = sine_envelope(-1.0, 2.0, 2.0 / (3.0 * PI)).unwrap();
        assert!((v + 2.0 / (3.0 * PI)).abs() < 1e-15);
        assert!(matches!(sine_envelope(-1.0, 2.0, 1.01), Err(Error::Domain(_))));
        assert!(matches!(sine_envelope(2.0, -1.0, 0.5), Err(Error::Param(_))));
    }

    #[test]
    fn second_branch_is_verbatim() {
        // |b| < |a|: the selector b sin(1/x) ≥ a always holds, so the value is
        // a x sin(1/x) everywhere.
        for i in 1..500 {
            let x = i as f64 / 500.0;
            let v = sine_envelope(-3.0, 1.0, x).unwrap();
            assert_eq!(v, -3.0 * x * (1.0 / x).sin());
        }
    }

    #[test]
    fn cells_tile_each_block() {
        for n in 1..40usize {
            let mut prev_hi = 1.0 / (n + 1) as f64;
            for k in 1..=n + 1 {
                let cell = DenseCell { block: n, cell: k };
                let (lo, hi) = cell.bounds();
                assert!((lo - prev_hi).abs() < 1e-15);
                let mid = 0.5 * (lo + hi);
                assert_eq!(DenseCell::locate(mid), Some(cell));
                prev_hi = hi;
            }
            assert!((prev_hi - 1.0 / n as f64).abs() < 1e-15);
        }
        assert_eq!(DenseCell::locate(1.0), Some(DenseCell { block: 1, cell: 2 }));
        assert_eq!(DenseCell::locate(0.0), None);
    }

    #[test]
    fn dense_slope_values() {
        let slopes = SlopeSequence::Cyclic(vec![0.5, -1.0, 2.0]);
        let f = dense_slope(&slopes.target(), slopes.clone()).unwrap();
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
        // Block 3 = (1/4, 1/3], four cells; the last one is the root cell.
        let root = DenseCell { block: 3, cell: 4 };
        let (lo, hi) = root.bounds();
        let x = 0.5 * (lo + hi);
        assert_eq!(f.eval(x).unwrap(), x.sqrt());
        let (lo, hi) = DenseCell { block: 3, cell: 2 }.bounds();
        let x = 0.5 * (lo + hi);
        assert_eq!(f.eval(x).unwrap(), -x);
        assert!(dense_slope(&slopes.target(), SlopeSequence::Cyclic(vec![])).is_err());
    }

    #[test]
    fn van_der_corput_slopes_fill_the_interval() {
        let s = SlopeSequence::van_der_corput(-1.0, 3.0).unwrap();
        assert_eq!(s.slope(1), 1.0);
        assert_eq!(s.slope(2), 0.0);
        assert_eq!(s.slope(3), 2.0);
        let mut v: Vec<f64> = (1..1024).map(|k| s.slope(k)).collect();
        v.sort_by(f64::total_cmp);
        let max_gap = v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!(max_gap <= 4.0 / 512.0);
    }

    proptest! {
        #[test]
        fn envelope_bounds(a in -5.0f64..5.0, width in 0.01f64..5.0, x in 1e-6f64..1.0) {
            let b = a + width;
            prop_assume!(a.abs() <= b.abs());
            let v = sine_envelope(a, b, x).unwrap();
            let tol = 4.0 * f64::EPSILON * b.abs().max(a.abs()) * x;
            prop_assert!(a * x - tol <= v && v <= b.abs() * x + tol);
        }

        #[test]
        fn slope_cells_reproduce_their_slope(x in 1e-4f64..1.0) {
            let slopes = SlopeSequence::van_der_corput(-2.0, 5.0).unwrap();
            let f = dense_slope(&slopes.target(), slopes.clone()).unwrap();
            let cell = DenseCell::locate(x).unwrap();
            prop_assume!(!cell.is_root_cell());
            let q = f.eval(x).unwrap() / x;
            let a = slopes.slope(cell.cell);
            // One rounding in a·x and one in the division.
            prop_assert!((q - a).abs() <= 2.0 * f64::EPSILON * a.abs());
        }

        #[test]
        fn slope_cells_exact_at_dyadic_points(m in 1u32..(1 << 20)) {
            // Slopes carry at most ~25 significant bits and x at most 20, so
            // a·x is exact and so is the quotient.
            let slopes = SlopeSequence::van_der_corput(-2.0, 5.0).unwrap();
            let f = dense_slope(&slopes.target(), slopes.clone()).unwrap();
            let x = m as f64 / (1u32 << 20) as f64;
            let cell = DenseCell::locate(x).unwrap();
            prop_assume!(!cell.is_root_cell());
            prop_assert_eq!(f.eval(x).unwrap() / x, slopes.slope(cell.cell));
        }
    }
}

//! Newton, symmetric and cord difference quotients, the convex
//! decomposition of a cord quotient, and quotient traces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::gallery::GalleryFunction;
use crate::seqgen::DecaySequence;

/// Quotients above this magnitude are reported as `±∞`.
pub const DEFAULT_INFINITY_THRESHOLD: f64 = 1e12;

/// Evaluates difference quotients with a fixed infinity threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuotientEngine {
    pub infinity_threshold: f64,
}

impl Default for QuotientEngine {
    fn default() -> Self {
        Self { infinity_threshold: DEFAULT_INFINITY_THRESHOLD }
    }
}

/// Cord quotient split as `r·right + (1 − r)·left` (x = 0 form after the
/// shift `t ↦ f(t + x) − f(x)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    /// `h / (h + k)`.
    pub r: f64,
    /// `k / (h + k)`, computed directly rather than as `1 − r`.
    pub complement: f64,
    /// `(f(x+h) − f(x)) / h`.
    pub right: f64,
    /// `(f(x−k) − f(x)) / (−k)`.
    pub left: f64,
    /// `(f(x+h) − f(x−k)) / (h + k)`.
    pub cord: f64,
}

impl Decomposition {
    pub fn reconstructed(&self) -> f64 {
        self.r * self.right + self.complement * self.left
    }

    /// Scale for rounding comparisons: `|r·right| + |(1−r)·left|`.
    pub fn magnitude(&self) -> f64 {
        (self.r * self.right).abs() + (self.complement * self.left).abs()
    }
}

impl QuotientEngine {
    pub fn new(infinity_threshold: f64) -> Result<Self> {
        if !(infinity_threshold > 0.0) {
            return Err(Error::Param(format!(
                "infinity threshold must be positive, got {infinity_threshold}"
            )));
        }
        Ok(Self { infinity_threshold })
    }

    /// Maps a raw quotient onto the extended reals.
    pub fn classify(&self, q: f64) -> Result<ExtReal> {
        if q.is_nan() {
            Err(Error::Domain("quotient is NaN".into()))
        } else if q > self.infinity_threshold {
            Ok(ExtReal::PosInf)
        } else if q < -self.infinity_threshold {
            Ok(ExtReal::NegInf)
        } else {
            Ok(ExtReal::Finite(q))
        }
    }

    /// `(f(x+h) − f(x)) / h`.
    pub fn newton(&self, f: &GalleryFunction, x: f64, h: f64) -> Result<ExtReal> {
        self.classify(raw_newton(f, x, h)?)
    }

    /// `(f(x+h) − f(x−k)) / (h+k)` for `h, k > 0`.
    pub fn cord(&self, f: &GalleryFunction, x: f64, h: f64, k: f64) -> Result<ExtReal> {
        self.classify(raw_cord(f, x, h, k)?)
    }

    /// `(f(x+h) − f(x−h)) / 2h`.
    pub fn symmetric(&self, f: &GalleryFunction, x: f64, h: f64) -> Result<ExtReal> {
        self.cord(f, x, h, h)
    }

    /// Splits the cord quotient at `x` into its one-sided parts.
    pub fn decompose(&self, f: &GalleryFunction, x: f64, h: f64, k: f64) -> Result<Decomposition> {
        check_steps(h, k)?;
        let (fr, f0, fl) = (f.eval(x + h)?, f.eval(x)?, f.eval(x - k)?);
        let sum = h + k;
        Ok(Decomposition {
            r: h / sum,
            complement: k / sum,
            right: (fr - f0) / h,
            left: (fl - f0) / -k,
            cord: (fr - fl) / sum,
        })
    }

    /// Quotients for the first `n` indices of `h` (and `k`, for cords).
    pub fn trace(
        &self,
        f: &GalleryFunction,
        x: f64,
        h: &DecaySequence,
        k: Option<&DecaySequence>,
        n: usize,
    ) -> Result<QuotientTrace> {
        if n == 0 {
            return Err(Error::Param("trace length must be at least 1".into()));
        }
        let start_h = h.offset();
        let start_k = k.map_or(1, |k| k.offset());
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let hv = h.term(start_h + i)?;
            let (kv, value) = match k {
                None => (None, self.newton(f, x, hv)?),
                Some(k) => {
                    let kv = k.term(start_k + i)?;
                    (Some(kv), self.cord(f, x, hv, kv)?)
                }
            };
            entries.push(TraceEntry { n: start_h + i, h: hv, k: kv, value });
        }
        Ok(QuotientTrace {
            meta: TraceMeta {
                function: f.to_string(),
                x,
                h_seq: h.spec().to_string(),
                k_seq: k.map(|k| k.spec().to_string()),
            },
            entries,
        })
    }
}

fn check_steps(h: f64, k: f64) -> Result<()> {
    if !(h > 0.0 && k > 0.0) {
        return Err(Error::Param(format!("cord steps must be positive, got h={h}, k={k}")));
    }
    Ok(())
}

fn raw_newton(f: &GalleryFunction, x: f64, h: f64) -> Result<f64> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::Param(format!("newton step must be finite and nonzero, got {h}")));
    }
    let (fx, fxh) = (f.eval(x)?, f.eval(x + h)?);
    Ok((fxh - fx) / h)
}

fn raw_cord(f: &GalleryFunction, x: f64, h: f64, k: f64) -> Result<f64> {
    check_steps(h, k)?;
    let (right, left) = (f.eval(x + h)?, f.eval(x - k)?);
    Ok((right - left) / (h + k))
}

/// Newton quotient with the default engine.
pub fn newton_quotient(f: &GalleryFunction, x: f64, h: f64) -> Result<ExtReal> {
    QuotientEngine::default().newton(f, x, h)
}

/// Cord quotient with the default engine.
pub fn cord_quotient(f: &GalleryFunction, x: f64, h: f64, k: f64) -> Result<ExtReal> {
    QuotientEngine::default().cord(f, x, h, k)
}

/// Symmetric quotient with the default engine.
pub fn symmetric_quotient(f: &GalleryFunction, x: f64, h: f64) -> Result<ExtReal> {
    QuotientEngine::default().symmetric(f, x, h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub n: usize,
    pub h: f64,
    pub k: Option<f64>,
    pub value: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMeta {
    pub function: String,
    pub x: f64,
    pub h_seq: String,
    pub k_seq: Option<String>,
}

/// Recorded quotient values along a sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientTrace {
    pub meta: TraceMeta,
    pub entries: Vec<TraceEntry>,
}

impl QuotientTrace {
    pub fn values(&self) -> Vec<ExtReal> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// CSV with columns `n,h,k,value`; an absent `k` is an empty field.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(["n", "h", "k", "value"]).expect("in-memory write");
        for e in &self.entries {
            w.write_record([
                e.n.to_string(),
                e.h.to_string(),
                e.k.map(|k| k.to_string()).unwrap_or_default(),
                e.value.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(v: f64) -> ExtReal {
        ExtReal::from_f64(v)
    }

    fn close(a: ExtReal, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn newton_examples() {
        let q = newton_quotient(&GalleryFunction::square(), 1.0, 0.1).unwrap();
        assert!(close(q, 2.1, 1e-14));
        assert_eq!(newton_quotient(&GalleryFunction::abs(), 0.0, -0.5).unwrap(), x(-1.0));
        let q = newton_quotient(&GalleryFunction::sqrt(), 0.0, 1e-4).unwrap();
        assert!(close(q, 100.0, 1e-12));
        assert!(matches!(newton_quotient(&GalleryFunction::abs(), 0.0, 0.0), Err(Error::Param(_))));
        assert!(matches!(
            newton_quotient(&GalleryFunction::sqrt(), 0.0, -1e-4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn infinity_threshold() {
        let e = QuotientEngine::default();
        assert_eq!(e.newton(&GalleryFunction::sqrt(), 0.0, 1e-30).unwrap(), ExtReal::PosInf);
        let e = QuotientEngine::new(50.0).unwrap();
        assert_eq!(e.newton(&GalleryFunction::sqrt(), 0.0, 1e-4).unwrap(), ExtReal::PosInf);
        assert!(QuotientEngine::new(0.0).is_err());
    }

    #[test]
    fn cord_examples() {
        let abs = GalleryFunction::abs();
        assert_eq!(cord_quotient(&abs, 0.0, 0.01, 0.01).unwrap(), x(0.0));
        let q = cord_quotient(&abs, 0.0, 0.1, 0.01).unwrap();
        assert!(close(q, 9.0 / 11.0, 1e-15));
        let q = cord_quotient(&GalleryFunction::square(), 1.0, 0.1, 0.1).unwrap();
        assert!(close(q, 2.0, 1e-14));
        assert!(matches!(cord_quotient(&abs, 0.0, 0.1, 0.0), Err(Error::Param(_))));
        assert!(matches!(cord_quotient(&abs, 0.0, -0.1, 0.1), Err(Error::Param(_))));
        assert!(matches!(
            cord_quotient(&GalleryFunction::sqrt_sin(), 0.0, 0.1, 0.1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn symmetric_examples() {
        let q = symmetric_quotient(&GalleryFunction::cube(), 0.0, 0.1).unwrap();
        assert!(close(q, 0.01, 1e-16));
        // Taylor oracle: (sin h − sin(−h)) / 2h = 1 − h²/6 + h⁴/120 − …
        let h: f64 = 1e-3;
        let taylor = 1.0 - h * h / 6.0 + h.powi(4) / 120.0;
        let q = symmetric_quotient(&GalleryFunction::sine(), 0.0, h).unwrap();
        assert!(close(q, taylor, 1e-15));
        assert!(close(q, 0.99999983, 5e-9));
        for &h in &[0.5, 1e-3, 1e-9] {
            assert_eq!(symmetric_quotient(&GalleryFunction::abs(), 0.0, h).unwrap(), x(0.0));
        }
    }

    #[test]
    fn decompose_examples() {
        let two = GalleryFunction::discrete_two_slope(
            2.0,
            0.0,
            DecaySequence::exponential(2.0).unwrap(),
            DecaySequence::exponential(2.0).unwrap(),
        );
        let d = QuotientEngine::default().decompose(&two, 0.0, 0.25, 0.25).unwrap();
        assert_eq!((d.r, d.right, d.left, d.cord), (0.5, 2.0, 0.0, 1.0));
        assert_eq!(d.reconstructed(), 1.0);

        // |x| with h = 1/n, k = (1/2)/n: r = 2/3 and cord = 2r − 1 = 1/3.
        let n = 37.0;
        let d = QuotientEngine::default()
            .decompose(&GalleryFunction::abs(), 0.0, 1.0 / n, 0.5 / n)
            .unwrap();
        assert!((d.r - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.cord - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.cord - (2.0 * d.r - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn trace_examples() {
        let e = QuotientEngine::default();
        let h: DecaySequence = "harmonic:0,1".parse().unwrap();
        let t = e.trace(&GalleryFunction::square(), 1.0, &h, None, 3).unwrap();
        let expect = [3.0, 2.5, 2.0 + 1.0 / 3.0];
        for (v, want) in t.values().iter().zip(expect) {
            assert!(close(*v, want, 1e-14));
        }

        let two: GalleryFunction = "two_slope:R=1,L=0,h=exp:2,k=exp:4".parse().unwrap();
        let (hs, ks) = ("exp:2".parse().unwrap(), "exp:4".parse().unwrap());
        let t = e.trace(&two, 0.0, &hs, Some(&ks), 3).unwrap();
        assert_eq!(t.values(), vec![x(2.0 / 3.0), x(4.0 / 5.0), x(8.0 / 9.0)]);
        assert!(matches!(e.trace(&two, 0.0, &hs, Some(&ks), 0), Err(Error::Param(_))));
    }

    #[test]
    fn trace_csv_layout() {
        let e = QuotientEngine::default();
        let h: DecaySequence = "exp:2".parse().unwrap();
        let t = e.trace(&GalleryFunction::sqrt(), 0.0, &h, None, 2).unwrap();
        assert_eq!(t.to_csv(), "n,h,k,value\n1,0.5,,1.4142135623730951\n2,0.25,,2\n");
        let tiny: DecaySequence = "list:1e-30,1e-31".parse().unwrap();
        let t = e.trace(&GalleryFunction::sqrt(), 0.0, &tiny, None, 2).unwrap();
        assert!(t.to_csv().ends_with(",+inf\n"));
    }

    proptest! {
        #[test]
        fn decomposition_identity(sel in 0usize..5, x0 in -0.5f64..0.5,
                                  lh in -12.0f64..-1.0, lk in -12.0f64..-1.0) {
            let f = [
                GalleryFunction::abs(),
                GalleryFunction::square(),
                GalleryFunction::sine(),
                GalleryFunction::glued_g(-1.0, 2.0, -3.0, 1.0).unwrap(),
                GalleryFunction::weierstrass(0.5, 13, 1e-12).unwrap(),
            ][sel].clone();
            let (h, k) = (10f64.powf(lh), 10f64.powf(lk));
            let x0 = if sel == 3 { 0.0 } else { x0 };
            let d = QuotientEngine::default().decompose(&f, x0, h, k).unwrap();
            prop_assert!((d.r + d.complement - 1.0).abs() <= 2.0 * f64::EPSILON);
            let err = (d.cord - d.reconstructed()).abs();
            prop_assert!(err <= 4.0 * f64::EPSILON * d.magnitude().max(f64::MIN_POSITIVE),
                         "err {err:e} vs scale {:e}", d.magnitude());
        }

        #[test]
        fn cord_converges_for_smooth_controls(x0 in -2.0f64..2.0, lh in -9.0f64..-7.0,
                                              lk in -9.0f64..-7.0, sel in 0usize..3) {
            let f = [GalleryFunction::square(), GalleryFunction::sine(), GalleryFunction::cube()]
                [sel].clone();
            let q = cord_quotient(&f, x0, 10f64.powf(lh), 10f64.powf(lk)).unwrap();
            prop_assert!((q.to_f64() - f.derivative(x0).unwrap()).abs() <= 1e-6);
        }

        #[test]
        fn cord_between_one_sided_quotients(right in -64i32..64, left in -64i32..64,
                                            i in 1usize..50, j in 1usize..25) {
            // Dyadic slopes on power-of-two steps: every operation is exact
            // except the final division, so the bound holds with no slack.
            let (right, left) = (right as f64 / 8.0, left as f64 / 8.0);
            let f = GalleryFunction::discrete_two_slope(
                right, left,
                DecaySequence::exponential(2.0).unwrap(),
                DecaySequence::exponential(4.0).unwrap(),
            );
            let (h, k) = (2f64.powi(-(i as i32)), 4f64.powi(-(j as i32)));
            let e = QuotientEngine::default();
            let rn = e.newton(&f, 0.0, h).unwrap();
            let ln = e.newton(&f, 0.0, -k).unwrap();
            let q = e.cord(&f, 0.0, h, k).unwrap();
            prop_assert!(rn.min(ln) <= q && q <= rn.max(ln));
            prop_assert_eq!(rn, ExtReal::from_f64(right));
            prop_assert_eq!(ln, ExtReal::from_f64(left));
        }
    }
}

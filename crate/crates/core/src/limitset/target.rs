//! Realizing a prescribed cord quotient by bisection along the straight
//! path between two witnesses whose quotients bracket the target.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gallery::GalleryFunction;
use crate::quotient::QuotientEngine;

/// Bisection steps before [`target_cord`] reports a search failure.
pub const MAX_BISECTIONS: usize = 200;

/// Scales and ratios scanned by [`solve_cord_target`] for witnesses.
const SCAN_SCALES: [f64; 7] = [1e-3, 3.16e-4, 1e-4, 3.16e-5, 1e-5, 3.16e-6, 1e-6];
const SCAN_RATIO_STEPS: i32 = 96;
const SCAN_RATIO_DECADES: f64 = 12.0;

/// Steps `h, k > 0` of a cord quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CordPair {
    pub h: f64,
    pub k: f64,
}

impl CordPair {
    pub fn new(h: f64, k: f64) -> Result<Self> {
        if !(h > 0.0 && k > 0.0 && h.is_finite() && k.is_finite()) {
            return Err(Error::Param(format!("cord steps must be positive, got h={h}, k={k}")));
        }
        Ok(Self { h, k })
    }

    /// `t·self + (1 − t)·other`.
    fn towards(self, other: Self, t: f64) -> Self {
        Self { h: t * self.h + (1.0 - t) * other.h, k: t * self.k + (1.0 - t) * other.k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetSolution {
    pub h: f64,
    pub k: f64,
    pub quotient: f64,
    pub iterations: usize,
}

fn quotient(f: &GalleryFunction, x: f64, p: CordPair) -> Result<f64> {
    QuotientEngine::default().cord(f, x, p.h, p.k).map(|q| q.to_f64())
}

/// Finds `(h, k)` on the path `t ↦ t·below + (1 − t)·above` whose cord
/// quotient is within `tol` of `target`.
///
/// The endpoint quotients must strictly bracket the target, unless one of
/// them is already within `tol`, in which case it is returned as is.
pub fn target_cord(
    f: &GalleryFunction,
    x: f64,
    target: f64,
    tol: f64,
    endpoints: (CordPair, CordPair),
) -> Result<TargetSolution> {
    if !f.is_continuous() {
        return Err(Error::Param(format!("{} is not continuous", f.name())));
    }
    if !(tol > 0.0) || !target.is_finite() {
        return Err(Error::Param(format!("need finite target and tol > 0, got {target}, {tol}")));
    }
    let (a, b) = endpoints;
    let (qa, qb) = (quotient(f, x, a)?, quotient(f, x, b)?);
    for (p, q) in [(a, qa), (b, qb)] {
        if (q - target).abs() <= tol {
            return Ok(TargetSolution { h: p.h, k: p.k, quotient: q, iterations: 0 });
        }
    }
    let (below, above) = if qa < target && target < qb {
        (a, b)
    } else if qb < target && target < qa {
        (b, a)
    } else {
        return Err(Error::Bracket(target));
    };
    // g(t) = q(t·below + (1−t)·above) − target: g(0) > 0, g(1) < 0.
    let (mut t_pos, mut t_neg) = (0.0f64, 1.0f64);
    for iter in 1..=MAX_BISECTIONS {
        let t = 0.5 * (t_pos + t_neg);
        if t == t_pos || t == t_neg {
            return Err(Error::SearchFailure(iter));
        }
        let p = below.towards(above, t);
        let q = quotient(f, x, p)?;
        if (q - target).abs() <= tol {
            return Ok(TargetSolution { h: p.h, k: p.k, quotient: q, iterations: iter });
        }
        if q > target {
            t_pos = t;
        } else {
            t_neg = t;
        }
    }
    Err(Error::SearchFailure(MAX_BISECTIONS))
}

/// Scans a grid of pairs for witnesses around `target` and bisects between
/// the closest one below and the closest one above. A scanned pair already
/// within `tol` is returned directly.
pub fn solve_cord_target(f: &GalleryFunction, x: f64, target: f64, tol: f64) -> Result<TargetSolution> {
    if !(tol > 0.0) || !target.is_finite() {
        return Err(Error::Param(format!("need finite target and tol > 0, got {target}, {tol}")));
    }
    let mut below: Option<(f64, CordPair)> = None;
    let mut above: Option<(f64, CordPair)> = None;
    for &sigma in &SCAN_SCALES {
        for step in -SCAN_RATIO_STEPS..=SCAN_RATIO_STEPS {
            let rho = 10f64.powf(SCAN_RATIO_DECADES * step as f64 / SCAN_RATIO_STEPS as f64);
            let pair = if rho <= 1.0 {
                CordPair { h: sigma, k: sigma * rho }
            } else {
                CordPair { h: sigma / rho, k: sigma }
            };
            let q = quotient(f, x, pair)?;
            if (q - target).abs() <= tol {
                return Ok(TargetSolution { h: pair.h, k: pair.k, quotient: q, iterations: 0 });
            }
            if q < target && below.is_none_or(|(b, _)| q > b) {
                below = Some((q, pair));
            }
            if q > target && above.is_none_or(|(a, _)| q < a) {
                above = Some((q, pair));
            }
        }
    }
    match (below, above) {
        (Some((_, lo)), Some((_, hi))) => target_cord(f, x, target, tol, (lo, hi)),
        _ => Err(Error::Bracket(target)),
    }
}

//! Closed-form cord limit sets of two-slope functions sampled along
//! polynomially or exponentially decaying sequences.
//!
//! Along index maps `n ↦ (i n, j n)`, the weight `r = h/(h + k)` converges,
//! and the cord quotient converges to `r R + (1 − r) L`.

use serde::Serialize;

use super::{Classification, Evidence, LimitSetEstimate};
use crate::dioph::{self, Alpha, Approximation, Commensurability, Precision};
use crate::error::{Error, Result};
use crate::extreal::{ClosedExtSet, ExtReal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolyWeight {
    pub i: u32,
    pub j: u32,
    pub r: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyPrediction {
    pub weights: Vec<PolyWeight>,
    pub limits: ClosedExtSet,
    /// Largest gap between consecutive predicted limits inside
    /// `[min(L, R) + δ, max(L, R) − δ]`.
    pub max_gap: f64,
    pub delta: f64,
}

/// Upper bound `|R − L|·m/(4j)` on the change of the limit between `j` and
/// `j + 1` at fixed `i`; equals `|R − L|/(2j)` for `m = 2`.
pub fn gap_bound(m: f64, j: u32, right: f64, left: f64) -> f64 {
    (right - left).abs() * m / (4.0 * j as f64)
}

/// Predicted limits for `h_n = 1/p(n)`, `k_n = 1/q(n)` with
/// `p(n)/n^m → a` and `q(n)/n^m → b`, along `n ↦ (i n, j n)`:
/// `r = j^m b / (j^m b + i^m a)`.
#[allow(clippy::too_many_arguments)]
pub fn predict_poly(
    a: f64,
    b: f64,
    m: f64,
    right: f64,
    left: f64,
    i_max: u32,
    j_max: u32,
    delta: f64,
) -> Result<PolyPrediction> {
    for (name, v) in [("a", a), ("b", b), ("m", m)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Param(format!("{name} must be positive, got {v}")));
        }
    }
    if i_max == 0 || j_max == 0 {
        return Err(Error::Param("index bounds must be at least 1".into()));
    }
    if !(right.is_finite() && left.is_finite() && delta >= 0.0) {
        return Err(Error::Param("R and L must be finite and δ nonnegative".into()));
    }
    let mut weights = Vec::with_capacity(i_max as usize * j_max as usize);
    for i in 1..=i_max {
        let ia = (i as f64).powf(m) * a;
        for j in 1..=j_max {
            let jb = (j as f64).powf(m) * b;
            let r = jb / (jb + ia);
            weights.push(PolyWeight { i, j, r, limit: r * right + (1.0 - r) * left });
        }
    }
    let mut values: Vec<f64> = weights.iter().map(|w| w.limit).collect();
    values.extend([right, left]);
    let limits = ClosedExtSet::from_points(values.iter().map(|&v| ExtReal::from_f64(v)));
    let (lo, hi) = (right.min(left) + delta, right.max(left) - delta);
    let mut inside: Vec<f64> = values.into_iter().filter(|v| (lo..=hi).contains(v)).collect();
    inside.sort_by(f64::total_cmp);
    let max_gap = inside.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok(PolyPrediction { weights, limits, max_gap, delta })
}

/// Options for [`predict_exp`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpOptions {
    /// Targets `K` for which witnesses are requested in the
    /// incommensurable case.
    pub targets: Vec<f64>,
    /// Required distance between a witness's limit and its target.
    pub limit_tol: f64,
    pub i_bound: u64,
    pub exp_bound: u32,
    pub precision: Precision,
}

impl Default for ExpOptions {
    fn default() -> Self {
        Self {
            targets: vec![],
            limit_tol: 1e-3,
            i_bound: dioph::DEFAULT_I_BOUND,
            exp_bound: dioph::DEFAULT_EXP_BOUND,
            precision: Precision::Extended,
        }
    }
}

/// A pair `(i, j)` whose weight `r = 1/(1 + b^{iα − j})` puts the cord
/// limit near `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpWitness {
    pub target: f64,
    pub i: u64,
    pub j: u64,
    pub limit: f64,
    pub error: f64,
}

/// Cord limits of `h_n = a^{−n}`, `k_n = b^{−n}` with one-sided slopes
/// `R`, `L`.
///
/// If `a^q = b^p` the ratios `k/h` live on the lattice `β^t`,
/// `β = b^{1/q}`, and the limits are `r R + (1 − r) L` with
/// `r = 1/(1 + β^t)` for `t` in `t_range`, plus `R` and `L`. Otherwise the
/// set is the interval between `L` and `R`, and each requested target gets
/// a witness from [`dioph::approx_target`].
pub fn predict_exp(
    a: f64,
    b: f64,
    right: f64,
    left: f64,
    t_range: (i64, i64),
    opts: &ExpOptions,
) -> Result<LimitSetEstimate> {
    if !(right.is_finite() && left.is_finite()) {
        return Err(Error::Param("R and L must be finite".into()));
    }
    if t_range.0 > t_range.1 {
        return Err(Error::Param(format!("empty t range {t_range:?}")));
    }
    let relation = dioph::rational_check(a, b, opts.exp_bound)?;
    let alpha = Alpha::log_ratio(a, b, opts.precision)?;
    let evidence = Evidence::Predicted { relation, alpha: alpha.to_f64(), precision: opts.precision };
    if right == left {
        return Ok(LimitSetEstimate::new(ClosedExtSet::singleton(right.into()), evidence));
    }
    let at = |r: f64| r * right + (1.0 - r) * left;
    match relation {
        Commensurability::Rational { q, .. } => {
            let beta = b.powf(1.0 / q as f64);
            let points = (t_range.0..=t_range.1)
                .map(|t| ExtReal::from_f64(at(1.0 / (1.0 + beta.powi(t as i32)))))
                .chain([right.into(), left.into()]);
            let set = ClosedExtSet::from_points(points);
            Ok(LimitSetEstimate::new(set, evidence))
        }
        Commensurability::NoSmallRelation { .. } => {
            let set = ClosedExtSet::interval(right.min(left).into(), right.max(left).into())?;
            let mut est = LimitSetEstimate::new(set, evidence);
            debug_assert_eq!(est.classification, Classification::ClosedInterval);
            for &target in &opts.targets {
                est.witnesses.push(exp_witness(&alpha, b, right, left, target, opts)?);
            }
            Ok(est)
        }
    }
}

/// Solves `r R + (1 − r) L = K` for `t = log_b((1 − r)/r)` and asks for
/// `i α − j` within `ε` of `t`. Since `|dr/dt| ≤ ln b / 4`, an `ε` of
/// `4·tol/(|R − L| ln b)` keeps the limit within `tol`.
fn exp_witness(
    alpha: &Alpha,
    b: f64,
    right: f64,
    left: f64,
    target: f64,
    opts: &ExpOptions,
) -> Result<ExpWitness> {
    let (lo, hi) = (right.min(left), right.max(left));
    if !(lo < target && target < hi) {
        return Err(Error::Param(format!("target {target} is not strictly between L and R")));
    }
    let r = (target - left) / (right - left);
    let t = ((1.0 - r) / r).ln() / b.ln();
    let eps = 0.9 * 4.0 * opts.limit_tol / ((right - left).abs() * b.ln());
    match dioph::approx_target(alpha, t, eps, opts.i_bound)? {
        Approximation::Found(w) => {
            let r = 1.0 / (1.0 + b.powf(w.achieved));
            let limit = r * right + (1.0 - r) * left;
            Ok(ExpWitness { target, i: w.i, j: w.j, limit, error: (limit - target).abs() })
        }
        Approximation::NoWitness { i_bound, .. } => Err(Error::SearchFailure(i_bound as usize)),
    }
}

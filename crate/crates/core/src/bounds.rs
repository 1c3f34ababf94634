//! The unachievable region of PR space.
//!
//! For a skew `π`, no confusion matrix can reach a precision below
//! `π r / (1 − π + π r)` at recall `r`. The worst possible ranking attains
//! that bound everywhere, so it doubles as the *minimum PR curve*, and its
//! area is the floor of AUCPR on any data set with that skew.

use serde::{Deserialize, Serialize};

use crate::confusion::{check_skew, PRPoint};
use crate::error::{Error, Result};

/// Below this skew the area formulas switch to their power series.
const SERIES_SKEW: f64 = 1e-3;

/// Slack allowed when testing a point against the bound; floating-point
/// evaluation of the boundary and of `tp / (tp + fp)` can disagree in the
/// last few ulps at the equality case.
pub const ACHIEVABILITY_TOL: f64 = 1e-12;

/// A recall interval `[lo, hi]` with `0 <= lo < hi <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecallRange {
    lo: f64,
    hi: f64,
}

impl RecallRange {
    pub const FULL: RecallRange = RecallRange { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidRange { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_full(&self) -> bool {
        self.lo == 0.0 && self.hi == 1.0
    }

    pub fn contains(&self, other: &RecallRange) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl Default for RecallRange {
    fn default() -> Self {
        Self::FULL
    }
}

impl std::str::FromStr for RecallRange {
    type Err = Error;

    /// Parses `a:b`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRange {
            lo: f64::NAN,
            hi: f64::NAN,
        };
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let lo = a.trim().parse().map_err(|_| bad())?;
        let hi = b.trim().parse().map_err(|_| bad())?;
        RecallRange::new(lo, hi)
    }
}

impl std::fmt::Display for RecallRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// Lowest precision any confusion matrix can have at recall `r`.
pub fn min_precision(r: f64, skew: f64) -> Result<f64> {
    let skew = check_skew(skew)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::DomainError {
            name: "recall",
            value: r,
        });
    }
    Ok(boundary(r, skew))
}

#[inline]
fn boundary(r: f64, skew: f64) -> f64 {
    skew * r / (1.0 - skew + skew * r)
}

/// Whether some confusion matrix with this skew realizes `pt`. Points on
/// the boundary count as achievable.
pub fn is_achievable(pt: &PRPoint, skew: f64) -> Result<bool> {
    let floor = min_precision(pt.recall, skew)?;
    Ok(pt.precision >= floor - ACHIEVABILITY_TOL)
}

/// The minimum PR curve for one skew.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinCurve {
    skew: f64,
    samples: Option<SampledCurve>,
}

/// Polyline of the minimum curve on an even recall grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub grid_step: f64,
    pub points: Vec<PRPoint>,
}

impl MinCurve {
    pub fn skew(&self) -> f64 {
        self.skew
    }

    /// Precision of the curve at `r`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        min_precision(r, self.skew)
    }

    pub fn samples(&self) -> Option<&SampledCurve> {
        self.samples.as_ref()
    }

    /// Attaches a sampled polyline with `ceil(1 / step)` intervals over [0, 1].
    pub fn sampled(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::InvalidGridStep(step));
        }
        let points = recall_grid(0.0, 1.0, step)
            .into_iter()
            .map(|r| PRPoint {
                recall: r,
                precision: boundary(r, self.skew),
            })
            .collect();
        self.samples = Some(SampledCurve {
            grid_step: step,
            points,
        });
        Ok(self)
    }
}

/// Evenly spaced recalls from `lo` to `hi` inclusive. The final step is
/// shortened if `step` does not divide the interval.
pub fn recall_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step - 1e-9).ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    grid.push(hi);
    grid
}

pub fn minimum_pr_curve(skew: f64) -> Result<MinCurve> {
    let skew = check_skew(skew)?;
    Ok(MinCurve {
        skew,
        samples: None,
    })
}

/// Area of the unachievable region over the full recall range,
/// `1 + (1 − π) ln(1 − π) / π`.
pub fn aucpr_min(skew: f64) -> Result<f64> {
    let skew = check_skew(skew)?;
    if skew < SERIES_SKEW {
        // Σ_{k≥1} π^k / (k (k + 1))
        return Ok(power_series(|k, pk| pk / (k * (k + 1.0)), skew));
    }
    Ok(1.0 + (1.0 - skew) * (-skew).ln_1p() / skew)
}

/// Area of the unachievable region between recalls `a` and `b`:
/// `(b − a) + ((1 − π) / π) ln((π(a − 1) + 1) / (π(b − 1) + 1))`.
pub fn aucpr_min_range(skew: f64, range: RecallRange) -> Result<f64> {
    let skew = check_skew(skew)?;
    let (a, b) = (range.lo, range.hi);
    let (ua, ub) = (1.0 - a, 1.0 - b);
    if skew < SERIES_SKEW {
        // Expanding both logs, the order-0 terms cancel against (b − a):
        // Σ_{k≥1} π^k (d_k − d_{k+1}) with d_k = (ua^k − ub^k) / k.
        let d = |k: f64| (ua.powf(k) - ub.powf(k)) / k;
        return Ok(power_series(|k, pk| pk * (d(k) - d(k + 1.0)), skew));
    }
    let log_ratio = (-skew * ua).ln_1p() - (-skew * ub).ln_1p();
    Ok((b - a) + (1.0 - skew) / skew * log_ratio)
}

/// Sums `term(k, x^k)` for k = 1, 2, … until the terms stop contributing.
fn power_series(term: impl Fn(f64, f64) -> f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut pk = 1.0;
    for k in 1..200 {
        pk *= x;
        let t = term(k as f64, pk);
        sum += t;
        if t.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    sum
}

/// Average precision of the worst ranking: `(1/pos) Σ_{i=1..pos} i / (i + neg)`.
pub fn ap_min(pos: u64, neg: u64) -> Result<f64> {
    if pos == 0 {
        return Err(Error::NoPositives);
    }
    let negf = neg as f64;
    let sum: f64 = (1..=pos).map(|i| i as f64 / (i as f64 + negf)).sum();
    Ok(sum / pos as f64)
}

//! PR curves with interpolation that is linear in count space.
//!
//! Between two thresholds `(tp_a, fp_a)` and `(tp_b, fp_b)` the false
//! positive count grows linearly with the true positive count,
//! `fp(tp) = fp_a + s (tp − tp_a)`. Precision along the segment is then
//! `tp / ((1 + s) tp + c)` with `c = fp_a − s tp_a`, a hyperbola in PR space
//! rather than a straight line. Area is integrated exactly from that form.

use serde::{Deserialize, Serialize};

use crate::bounds::{min_precision, recall_grid, RecallRange};
use crate::confusion::{ClassBalance, PRPoint};
use crate::dataset::{cutpoints, Cutpoints, ScoredDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PRCurve {
    cutpoints: Cutpoints,
}

/// One count-space segment with positive recall width.
#[derive(Debug, Clone, Copy)]
struct Segment {
    tp_a: f64,
    tp_b: f64,
    slope: f64,
    intercept: f64,
}

impl Segment {
    /// Precision at `tp` in `[tp_a, tp_b]`; at `tp = 0` on a segment through
    /// the origin this is the right limit `1 / (1 + s)`.
    fn precision(&self, tp: f64) -> f64 {
        let denom = (1.0 + self.slope) * tp + self.intercept;
        if denom <= 0.0 {
            1.0 / (1.0 + self.slope)
        } else {
            tp / denom
        }
    }

    /// `∫ tp / (k tp + c) dtp` over `[t1, t2]`, with `k = 1 + s`.
    fn integral(&self, t1: f64, t2: f64) -> f64 {
        let k = 1.0 + self.slope;
        let c = self.intercept;
        let dt = t2 - t1;
        if dt <= 0.0 {
            return 0.0;
        }
        let d1 = k * t1 + c;
        if c == 0.0 || k.abs() < 1e-12 || d1 <= 0.0 {
            return dt / k;
        }
        // dt/k − (c/k²) ln(1 + x), rearranged so the leading terms cancel analytically.
        let x = k * dt / d1;
        t1 * dt / d1 - c / (k * k) * ln_1p_minus_x(x)
    }
}

/// `ln(1 + x) − x`, accurate for small `x`.
fn ln_1p_minus_x(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        // −x²/2 + x³/3 − x⁴/4 + x⁵/5
        let x2 = x * x;
        return x2 * (-0.5 + x * (1.0 / 3.0 + x * (-0.25 + x * 0.2)));
    }
    x.ln_1p() - x
}

/// How an area was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaMethod {
    ExactClosedForm,
    Numeric { step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaResult {
    pub value: f64,
    pub range: RecallRange,
    pub method: AreaMethod,
}

impl PRCurve {
    pub fn from_cutpoints(cutpoints: Cutpoints) -> Self {
        Self { cutpoints }
    }

    pub fn balance(&self) -> ClassBalance {
        self.cutpoints.balance()
    }

    pub fn skew(&self) -> f64 {
        self.balance().skew()
    }

    pub fn cutpoints(&self) -> &Cutpoints {
        &self.cutpoints
    }

    fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.cutpoints.points().windows(2).filter_map(|w| {
            let (tp_a, fp_a) = (w[0].0 as f64, w[0].1 as f64);
            let (tp_b, fp_b) = (w[1].0 as f64, w[1].1 as f64);
            if tp_b == tp_a {
                return None;
            }
            let slope = (fp_b - fp_a) / (tp_b - tp_a);
            Some(Segment {
                tp_a,
                tp_b,
                slope,
                intercept: fp_a - slope * tp_a,
            })
        })
    }

    /// Interpolated precision at recall `r`.
    ///
    /// Where several thresholds share one recall, the first segment to reach
    /// it (lowest false positive count) is used. At `r = 0` this is the right
    /// limit of the first segment with recall width.
    pub fn precision_at(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::DomainError {
                name: "recall",
                value: r,
            });
        }
        let pos = self.balance().pos() as f64;
        let tp = (r * pos).clamp(0.0, pos);
        let seg = self
            .segments()
            .find(|s| tp <= s.tp_b)
            .expect("curve reaches recall 1");
        Ok(seg.precision(tp.max(seg.tp_a)))
    }

    /// Interpolated points at every integer true positive count, including
    /// the vertical drops between thresholds that share a recall.
    pub fn interpolated_points(&self) -> Vec<PRPoint> {
        let pos = self.balance().pos() as f64;
        let mut out = Vec::new();
        for w in self.cutpoints.points().windows(2) {
            let (tp_a, fp_a) = w[0];
            let (tp_b, fp_b) = w[1];
            if tp_b == tp_a {
                if tp_a > 0 {
                    out.push(point(tp_b as f64, fp_b as f64, pos));
                }
                continue;
            }
            let slope = (fp_b - fp_a) as f64 / (tp_b - tp_a) as f64;
            for tp in tp_a.max(1)..=tp_b {
                let fp = fp_a as f64 + slope * (tp - tp_a) as f64;
                out.push(point(tp as f64, fp, pos));
            }
        }
        out
    }

    /// Precision at each threshold that predicts at least one positive.
    pub fn threshold_points(&self) -> Vec<PRPoint> {
        let pos = self.balance().pos() as f64;
        self.cutpoints.points()[1..]
            .iter()
            .map(|&(tp, fp)| point(tp as f64, fp as f64, pos))
            .collect()
    }
}

fn point(tp: f64, fp: f64, pos: f64) -> PRPoint {
    PRPoint {
        recall: tp / pos,
        precision: if tp == 0.0 { 0.0 } else { tp / (tp + fp) },
    }
}

pub fn pr_curve(data: &ScoredDataset) -> Result<PRCurve> {
    Ok(PRCurve::from_cutpoints(cutpoints(data)?))
}

/// Exact area under the interpolated curve over `range`.
pub fn aucpr(curve: &PRCurve, range: RecallRange) -> Result<AreaResult> {
    let pos = curve.balance().pos() as f64;
    let (lo, hi) = (range.lo() * pos, range.hi() * pos);
    let mut value = 0.0;
    for seg in curve.segments() {
        let t1 = seg.tp_a.max(lo);
        let t2 = seg.tp_b.min(hi);
        if t2 > t1 {
            value += seg.integral(t1, t2);
        }
    }
    value = (value / pos).clamp(0.0, range.width());
    Ok(AreaResult {
        value,
        range,
        method: AreaMethod::ExactClosedForm,
    })
}

/// Composite Simpson estimate of the area, with subintervals of at most
/// `step` in recall. Each curve segment is integrated separately because
/// precision jumps where thresholds share a recall.
pub fn aucpr_numeric(curve: &PRCurve, range: RecallRange, step: f64) -> Result<AreaResult> {
    if !(step > 0.0 && step <= range.width()) {
        return Err(Error::InvalidGridStep(step));
    }
    let pos = curve.balance().pos() as f64;
    let (lo, hi) = (range.lo() * pos, range.hi() * pos);
    let mut value = 0.0;
    for seg in curve.segments() {
        let (t1, t2) = (seg.tp_a.max(lo), seg.tp_b.min(hi));
        if t2 <= t1 {
            continue;
        }
        let n = (((t2 - t1) / pos / step).ceil() as usize).max(1);
        let h = (t2 - t1) / n as f64;
        for i in 0..n {
            let a = t1 + i as f64 * h;
            let b = if i + 1 == n { t2 } else { a + h };
            let mid = 0.5 * (a + b);
            value +=
                (b - a) / 6.0 * (seg.precision(a) + 4.0 * seg.precision(mid) + seg.precision(b));
        }
    }
    Ok(AreaResult {
        value: value / pos,
        range,
        method: AreaMethod::Numeric { step },
    })
}

/// Order of positives and negatives within a group of tied scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieOrder {
    /// Negatives ranked first.
    #[default]
    Pessimistic,
    /// Positives ranked first.
    Optimistic,
}

/// Mean precision at the rank of each positive example.
pub fn average_precision(data: &ScoredDataset) -> Result<f64> {
    average_precision_with(data, TieOrder::Pessimistic)
}

pub fn average_precision_with(data: &ScoredDataset, ties: TieOrder) -> Result<f64> {
    let pos = data.count_positives();
    if pos == 0 {
        return Err(Error::DegenerateDataset {
            pos,
            neg: data.len() as u64,
        });
    }
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut sum = 0.0;
    for (p, n) in data.tie_groups() {
        let ahead = match ties {
            TieOrder::Pessimistic => n,
            TieOrder::Optimistic => 0,
        };
        for j in 1..=p {
            sum += (tp + j) as f64 / (tp + fp + ahead + j) as f64;
        }
        tp += p;
        fp += n;
    }
    Ok(sum / pos as f64)
}

/// Mean precision across folds at one grid recall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedPoint {
    pub recall: f64,
    pub precision: f64,
    /// Each fold's interpolated precision.
    pub fold_precisions: Vec<f64>,
    /// Each fold's minimum achievable precision at this recall.
    pub fold_min_precisions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerticalAverage {
    pub grid_step: f64,
    pub fold_skews: Vec<f64>,
    pub points: Vec<AveragedPoint>,
}

pub const DEFAULT_GRID_STEP: f64 = 0.01;

/// Vertical average of fold curves on an inclusive recall grid.
///
/// The per-fold minimum precisions are reported alongside the mean: folds
/// with different skews have different floors, and the plain mean does not
/// correct for that.
pub fn vertical_average(curves: &[PRCurve], grid_step: f64) -> Result<VerticalAverage> {
    if curves.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::InvalidGridStep(grid_step));
    }
    let fold_skews: Vec<f64> = curves.iter().map(PRCurve::skew).collect();
    let points = recall_grid(0.0, 1.0, grid_step)
        .into_iter()
        .map(|recall| {
            let fold_precisions = curves
                .iter()
                .map(|c| c.precision_at(recall))
                .collect::<Result<Vec<_>>>()?;
            let fold_min_precisions = fold_skews
                .iter()
                .map(|&s| min_precision(recall, s))
                .collect::<Result<Vec<_>>>()?;
            let precision = fold_precisions.iter().sum::<f64>() / curves.len() as f64;
            Ok(AveragedPoint {
                recall,
                precision,
                fold_precisions,
                fold_min_precisions,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerticalAverage {
        grid_step,
        fold_skews,
        points,
    })
}

//! Summary scores that account for the unachievable region.

use serde::{Deserialize, Serialize};

use crate::bounds::{aucpr_min_range, RecallRange};
use crate::confusion::check_skew;
use crate::error::{Error, Result};

/// Slack on the analytic AUCPR range before a value is rejected.
pub const AUCPR_BOUNDS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    Aucnpr,
    RandomNormalized,
    FBeta,
    ModifiedF1,
}

/// A score together with the skew and recall range it was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreValue {
    pub value: f64,
    pub kind: ScoreKind,
    pub skew: Option<f64>,
    pub range: Option<RecallRange>,
}

impl ScoreValue {
    pub fn aucnpr(aucpr_value: f64, skew: f64, range: RecallRange) -> Result<Self> {
        Ok(Self {
            value: aucnpr(aucpr_value, skew, range)?,
            kind: ScoreKind::Aucnpr,
            skew: Some(skew),
            range: Some(range),
        })
    }

    pub fn random_normalized(aucpr_value: f64, skew: f64) -> Result<Self> {
        Ok(Self {
            value: random_normalized_aucpr(aucpr_value, skew)?,
            kind: ScoreKind::RandomNormalized,
            skew: Some(skew),
            range: Some(RecallRange::FULL),
        })
    }

    pub fn f_beta(r: f64, p: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            value: f_beta(r, p, beta)?,
            kind: ScoreKind::FBeta,
            skew: None,
            range: None,
        })
    }

    pub fn modified_f1(r: f64, p: f64, skew: f64) -> Result<Self> {
        Ok(Self {
            value: modified_f1(r, p, skew)?,
            kind: ScoreKind::ModifiedF1,
            skew: Some(skew),
            range: None,
        })
    }
}

/// AUCPR rescaled so the worst ranking scores 0 and the best scores 1,
/// whatever the skew.
pub fn aucnpr(aucpr_value: f64, skew: f64, range: RecallRange) -> Result<f64> {
    let min = aucpr_min_range(skew, range)?;
    let max = range.width();
    if !aucpr_value.is_finite()
        || aucpr_value < min - AUCPR_BOUNDS_TOL
        || aucpr_value > max + AUCPR_BOUNDS_TOL
    {
        return Err(Error::OutOfBounds {
            value: aucpr_value,
            min,
            max,
        });
    }
    Ok(((aucpr_value - min) / (max - min)).clamp(0.0, 1.0))
}

/// AUCPR rescaled against random guessing, `(aucpr − π) / (1 − π)`.
/// Negative below random; kept for comparison with [`aucnpr`].
pub fn random_normalized_aucpr(aucpr_value: f64, skew: f64) -> Result<f64> {
    let skew = check_skew(skew)?;
    Ok((aucpr_value - skew) / (1.0 - skew))
}

fn unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::DomainError { name, value })
    }
}

/// `(1 + β²) p r / (β² p + r)`.
pub fn f_beta(r: f64, p: f64, beta: f64) -> Result<f64> {
    let r = unit("recall", r)?;
    let p = unit("precision", p)?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidBeta(beta));
    }
    if r == 0.0 && p == 0.0 {
        return Err(Error::UndefinedScore);
    }
    let b2 = beta * beta;
    Ok((1.0 + b2) * p * r / (b2 * p + r))
}

/// Harmonic mean of recall and `(p − π) / (1 − π)`, or 0 when the point is
/// no better than random guessing.
pub fn modified_f1(r: f64, p: f64, skew: f64) -> Result<f64> {
    let r = unit("recall", r)?;
    let p = unit("precision", p)?;
    let skew = check_skew(skew)?;
    if p <= skew {
        return Ok(0.0);
    }
    let np = (p - skew) / (1.0 - skew);
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * r * np / (r + np))
}

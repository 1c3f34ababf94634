//! Per-fold and per-task metrics, their means, and merged-set metrics.
//!
//! Groups with different skews have different AUCPR floors, so a mean of raw
//! AUCPR mixes scores with different ranges. Means of AUCNPR are reported
//! alongside, and the spread of skews across groups is flagged.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{ap_min, aucpr_min_range, RecallRange};
use crate::curves::{aucpr, average_precision, pr_curve, PRCurve};
use crate::dataset::{Record, ScoredDataset};
use crate::error::{Error, Result};
use crate::scores::{aucnpr, f_beta, modified_f1};

/// Threshold chosen to maximize F-beta on one curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub beta: f64,
    pub recall: f64,
    pub precision: f64,
    pub f_beta: f64,
    pub modified_f1: f64,
}

impl OperatingPoint {
    /// Best F-beta over all thresholds of `curve`; ties keep the earliest
    /// (highest) threshold.
    pub fn best(curve: &PRCurve, beta: f64) -> Result<Self> {
        let skew = curve.skew();
        let mut best: Option<OperatingPoint> = None;
        for pt in curve.threshold_points() {
            if pt.recall == 0.0 && pt.precision == 0.0 {
                continue;
            }
            let f = f_beta(pt.recall, pt.precision, beta)?;
            if best.is_none_or(|b| f > b.f_beta) {
                best = Some(OperatingPoint {
                    beta,
                    recall: pt.recall,
                    precision: pt.precision,
                    f_beta: f,
                    modified_f1: modified_f1(pt.recall, pt.precision, skew)?,
                });
            }
        }
        best.ok_or(Error::UndefinedScore)
    }
}

/// Every summary of one evaluation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub group: Option<String>,
    pub pos: u64,
    pub neg: u64,
    pub skew: f64,
    pub aucpr: f64,
    pub aucpr_min: f64,
    pub aucpr_max: f64,
    pub aucnpr: f64,
    pub ap: f64,
    pub ap_min: f64,
    pub range: RecallRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_point: Option<OperatingPoint>,
}

impl MetricsReport {
    pub fn compute(data: &ScoredDataset, range: RecallRange) -> Result<Self> {
        let curve = pr_curve(data)?;
        let balance = curve.balance();
        let skew = balance.skew();
        let area = aucpr(&curve, range)?.value;
        Ok(Self {
            group: None,
            pos: balance.pos(),
            neg: balance.neg(),
            skew,
            aucpr: area,
            aucpr_min: aucpr_min_range(skew, range)?,
            aucpr_max: range.width(),
            aucnpr: aucnpr(area, skew, range)?,
            ap: average_precision(data)?,
            ap_min: ap_min(balance.pos(), balance.neg())?,
            range,
            operating_point: None,
        })
    }

    /// Adds the best F-beta threshold.
    pub fn with_operating_point(mut self, data: &ScoredDataset, beta: f64) -> Result<Self> {
        self.operating_point = Some(OperatingPoint::best(&pr_curve(data)?, beta)?);
        Ok(self)
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Fold,
    Task,
}

impl GroupBy {
    fn key<'a>(&self, record: &'a Record) -> Option<&'a str> {
        match self {
            GroupBy::Fold => record.fold.as_deref(),
            GroupBy::Task => record.task.as_deref(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            GroupBy::Fold => "fold",
            GroupBy::Task => "task",
        }
    }
}

impl std::str::FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fold" => Ok(GroupBy::Fold),
            "task" => Ok(GroupBy::Task),
            other => Err(format!("unknown grouping `{other}`; expected fold or task")),
        }
    }
}

/// Splits records by fold or task id, ordered by id.
pub fn split_groups(data: &ScoredDataset, by: GroupBy) -> Result<BTreeMap<String, ScoredDataset>> {
    let mut groups: BTreeMap<String, Vec<Record>> = BTreeMap::new();
    for (index, rec) in data.records().iter().enumerate() {
        let key = by.key(rec).ok_or(Error::MissingGroupId {
            index,
            field: by.name(),
        })?;
        groups.entry(key.to_owned()).or_default().push(rec.clone());
    }
    groups
        .into_iter()
        .map(|(k, recs)| Ok((k, ScoredDataset::new(recs)?)))
        .collect()
}

/// One report per group, each against the group's own skew.
pub fn group_metrics(
    data: &ScoredDataset,
    by: GroupBy,
    range: RecallRange,
) -> Result<Vec<MetricsReport>> {
    split_groups(data, by)?
        .into_iter()
        .map(|(group, subset)| {
            MetricsReport::compute(&subset, range)
                .map(|r| r.with_group(group.clone()))
                .map_err(|e| match e {
                    Error::DegenerateDataset { pos, neg } => {
                        Error::DegenerateGroup { group, pos, neg }
                    }
                    other => other,
                })
        })
        .collect()
}

/// Report over the pooled records, using the pooled skew. Scores from
/// different groups are compared directly, which presumes they are on a
/// common scale.
pub fn merged_metrics(data: &ScoredDataset, range: RecallRange) -> Result<MetricsReport> {
    Ok(MetricsReport::compute(data, range)?.with_group("merged"))
}

pub const DEFAULT_SKEW_SPREAD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateOptions {
    /// Weight each group by its size instead of equally.
    pub weighted: bool,
    pub skew_spread_threshold: f64,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        Self {
            weighted: false,
            skew_spread_threshold: DEFAULT_SKEW_SPREAD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewSpread {
    pub min: f64,
    pub max: f64,
    pub threshold: f64,
    /// `max − min` exceeds the threshold.
    pub warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub groups: Vec<MetricsReport>,
    pub mean_aucpr: f64,
    pub mean_aucnpr: f64,
    pub weighted: bool,
    pub merged: Option<MetricsReport>,
    pub skew_spread: SkewSpread,
}

impl AggregateReport {
    pub fn with_merged(mut self, merged: MetricsReport) -> Self {
        self.merged = Some(merged);
        self
    }
}

pub fn mean_scores(reports: Vec<MetricsReport>) -> Result<AggregateReport> {
    mean_scores_with(reports, AggregateOptions::default())
}

pub fn mean_scores_with(
    reports: Vec<MetricsReport>,
    opts: AggregateOptions,
) -> Result<AggregateReport> {
    if reports.is_empty() {
        return Err(Error::EmptyInput);
    }
    let weights: Vec<f64> = reports
        .iter()
        .map(|r| {
            if opts.weighted {
                (r.pos + r.neg) as f64
            } else {
                1.0
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let mean = |f: fn(&MetricsReport) -> f64| {
        reports
            .iter()
            .zip(&weights)
            .map(|(r, w)| w * f(r))
            .sum::<f64>()
            / total
    };
    let mean_aucpr = mean(|r| r.aucpr);
    let mean_aucnpr = mean(|r| r.aucnpr);
    let min = reports.iter().map(|r| r.skew).fold(f64::INFINITY, f64::min);
    let max = reports
        .iter()
        .map(|r| r.skew)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(AggregateReport {
        groups: reports,
        mean_aucpr,
        mean_aucnpr,
        weighted: opts.weighted,
        merged: None,
        skew_spread: SkewSpread {
            min,
            max,
            threshold: opts.skew_spread_threshold,
            warning: max - min > opts.skew_spread_threshold,
        },
    })
}

//! Precision-recall analysis that makes the unachievable region explicit.
//!
//! For a class skew `π = pos / (pos + neg)`, some parts of PR space cannot be
//! reached by any classifier. This crate computes that region and the
//! quantities that depend on it:
//!
//! - [`bounds`]: the minimum precision at each recall, the minimum PR curve,
//!   and closed forms for the minimum AUCPR and AP.
//! - [`curves`]: PR curves with count-space interpolation, exact AUCPR,
//!   average precision and vertical averaging.
//! - [`scores`]: AUCNPR, F-beta and a skew-aware F1.
//! - [`aggregate`]: per-fold and per-task reports, means and merged metrics.
//! - [`sampling`]: seeded negative downsampling and ratio sweeps.
//!
//! ```
//! use prspace::{aucnpr, aucpr, aucpr_min, pr_curve, RecallRange, ScoredDataset};
//!
//! let data = ScoredDataset::from_pairs([(false, 0.9), (true, 0.8), (false, 0.3), (true, 0.1)])?;
//! let curve = pr_curve(&data)?;
//! let area = aucpr(&curve, RecallRange::FULL)?.value;
//! assert!(area >= aucpr_min(0.5)?);
//! let normalized = aucnpr(area, curve.skew(), RecallRange::FULL)?;
//! assert!((0.0..=1.0).contains(&normalized));
//! # Ok::<(), prspace::Error>(())
//! ```

pub mod aggregate;
pub mod bounds;
pub mod confusion;
pub mod curves;
pub mod dataset;
pub mod error;
pub mod sampling;
pub mod scores;
pub mod synthetic;

pub use aggregate::{
    group_metrics, mean_scores, mean_scores_with, merged_metrics, AggregateOptions,
    AggregateReport, GroupBy, MetricsReport, OperatingPoint,
};
pub use bounds::{
    ap_min, aucpr_min, aucpr_min_range, is_achievable, min_precision, minimum_pr_curve, MinCurve,
    RecallRange,
};
pub use confusion::{pr_point, validate_confusion, ClassBalance, ConfusionMatrix, PRPoint};
pub use curves::{
    aucpr, average_precision, average_precision_with, pr_curve, vertical_average, AreaMethod,
    AreaResult, PRCurve, TieOrder, VerticalAverage,
};
pub use dataset::{cutpoints, Cutpoints, Record, ScoredDataset};
pub use error::{Error, Result};
pub use sampling::{downsample_negatives, ratio_sweep, Ratio, SweepDispersion, SweepRow};
pub use scores::{aucnpr, f_beta, modified_f1, random_normalized_aucpr, ScoreKind, ScoreValue};

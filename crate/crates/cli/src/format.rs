//! Serialized report shapes for JSON and CSV output.

use prspace::curves::VerticalAverage;
use prspace::{
    AggregateReport, MetricsReport, OperatingPoint, RecallRange, SweepDispersion, SweepRow,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}`; expected json or csv")),
        }
    }
}

/// Rounds floats to six significant digits unless `full` is set.
#[derive(Debug, Clone, Copy, Default)]
pub struct Precision {
    pub full: bool,
}

impl Precision {
    pub fn apply(&self, x: f64) -> f64 {
        if self.full || !x.is_finite() || x == 0.0 {
            x
        } else {
            round_sig6(x)
        }
    }
}

pub fn round_sig6(x: f64) -> f64 {
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// Six significant digits, trailing zeros dropped.
pub fn sig6(x: f64) -> String {
    display(round_sig6(x))
}

/// Plain decimal notation, switching to exponent form for very small or
/// very large magnitudes.
pub fn display(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPointRecord {
    pub beta: f64,
    pub recall: f64,
    pub precision: f64,
    pub f_beta: f64,
    pub modified_f1: f64,
}

/// The analyze report as written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub pos: u64,
    pub neg: u64,
    pub skew: f64,
    pub aucpr: f64,
    pub aucpr_min: f64,
    pub aucnpr: f64,
    pub ap: f64,
    pub ap_min: f64,
    pub range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_point: Option<OperatingPointRecord>,
}

impl ReportRecord {
    pub fn from_report(r: &MetricsReport, prec: Precision) -> Self {
        let f = |x| prec.apply(x);
        Self {
            group: r.group.clone(),
            pos: r.pos,
            neg: r.neg,
            skew: f(r.skew),
            aucpr: f(r.aucpr),
            aucpr_min: f(r.aucpr_min),
            aucnpr: f(r.aucnpr),
            ap: f(r.ap),
            ap_min: f(r.ap_min),
            range: [r.range.lo(), r.range.hi()],
            operating_point: r.operating_point.map(|op| OperatingPointRecord {
                beta: op.beta,
                recall: f(op.recall),
                precision: f(op.precision),
                f_beta: f(op.f_beta),
                modified_f1: f(op.modified_f1),
            }),
        }
    }

    pub fn into_report(self) -> Result<MetricsReport> {
        let range = RecallRange::new(self.range[0], self.range[1])?;
        Ok(MetricsReport {
            group: self.group,
            pos: self.pos,
            neg: self.neg,
            skew: self.skew,
            aucpr: self.aucpr,
            aucpr_min: self.aucpr_min,
            aucpr_max: range.width(),
            aucnpr: self.aucnpr,
            ap: self.ap,
            ap_min: self.ap_min,
            range,
            operating_point: self.operating_point.map(|op| OperatingPoint {
                beta: op.beta,
                recall: op.recall,
                precision: op.precision,
                f_beta: op.f_beta,
                modified_f1: op.modified_f1,
            }),
        })
    }
}

pub fn parse_report_json(text: &str) -> Result<MetricsReport> {
    let record: ReportRecord = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: "<report>".into(),
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    record.into_report()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn csv_string(build: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    build(&mut w).expect("in-memory csv write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn analyze_json(r: &MetricsReport, prec: Precision) -> String {
    to_json(&ReportRecord::from_report(r, prec))
}

pub fn analyze_csv(r: &MetricsReport, prec: Precision) -> String {
    let rec = ReportRecord::from_report(r, prec);
    csv_string(|w| {
        let mut header = vec![
            "pos",
            "neg",
            "skew",
            "aucpr",
            "aucpr_min",
            "aucnpr",
            "ap",
            "ap_min",
            "range_lo",
            "range_hi",
        ];
        let mut row = vec![
            rec.pos.to_string(),
            rec.neg.to_string(),
            display(rec.skew),
            display(rec.aucpr),
            display(rec.aucpr_min),
            display(rec.aucnpr),
            display(rec.ap),
            display(rec.ap_min),
            display(rec.range[0]),
            display(rec.range[1]),
        ];
        if let Some(op) = &rec.operating_point {
            header.extend(["beta", "recall", "precision", "f_beta", "modified_f1"]);
            row.extend([op.beta, op.recall, op.precision, op.f_beta, op.modified_f1].map(display));
        }
        w.write_record(&header)?;
        w.write_record(&row)
    })
}

#[derive(Serialize)]
struct MeanRecord {
    aucpr: f64,
    aucnpr: f64,
    weighted: bool,
}

#[derive(Serialize)]
struct SpreadRecord {
    min: f64,
    max: f64,
    threshold: f64,
    warning: bool,
}

#[derive(Serialize)]
struct AveragedPointRecord {
    recall: f64,
    precision: f64,
    fold_precisions: Vec<f64>,
    fold_min_precisions: Vec<f64>,
}

#[derive(Serialize)]
struct VerticalRecord {
    grid_step: f64,
    groups: Vec<String>,
    fold_skews: Vec<f64>,
    points: Vec<AveragedPointRecord>,
}

#[derive(Serialize)]
struct AggregateRecord {
    groups: Vec<ReportRecord>,
    mean: MeanRecord,
    merged: Option<ReportRecord>,
    skew_spread: SpreadRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertical_average: Option<VerticalRecord>,
}

pub fn aggregate_json(
    agg: &AggregateReport,
    vertical: Option<&VerticalAverage>,
    prec: Precision,
) -> String {
    let f = |x| prec.apply(x);
    let group_ids = agg
        .groups
        .iter()
        .map(|g| g.group.clone().unwrap_or_default())
        .collect();
    let record = AggregateRecord {
        groups: agg
            .groups
            .iter()
            .map(|g| ReportRecord::from_report(g, prec))
            .collect(),
        mean: MeanRecord {
            aucpr: f(agg.mean_aucpr),
            aucnpr: f(agg.mean_aucnpr),
            weighted: agg.weighted,
        },
        merged: agg
            .merged
            .as_ref()
            .map(|m| ReportRecord::from_report(m, prec)),
        skew_spread: SpreadRecord {
            min: f(agg.skew_spread.min),
            max: f(agg.skew_spread.max),
            threshold: agg.skew_spread.threshold,
            warning: agg.skew_spread.warning,
        },
        vertical_average: vertical.map(|v| VerticalRecord {
            grid_step: v.grid_step,
            groups: group_ids,
            fold_skews: v.fold_skews.iter().map(|&x| f(x)).collect(),
            points: v
                .points
                .iter()
                .map(|p| AveragedPointRecord {
                    recall: f(p.recall),
                    precision: f(p.precision),
                    fold_precisions: p.fold_precisions.iter().map(|&x| f(x)).collect(),
                    fold_min_precisions: p.fold_min_precisions.iter().map(|&x| f(x)).collect(),
                })
                .collect(),
        }),
    };
    to_json(&record)
}

/// One row per group, then `mean` and `merged` rows. A vertical average,
/// when present, follows after a blank line as its own table.
pub fn aggregate_csv(
    agg: &AggregateReport,
    vertical: Option<&VerticalAverage>,
    prec: Precision,
) -> String {
    let f = |x: f64| display(prec.apply(x));
    let mut out = csv_string(|w| {
        w.write_record([
            "group",
            "pos",
            "neg",
            "skew",
            "aucpr",
            "aucnpr",
            "aucpr_min",
            "ap",
            "ap_min",
        ])?;
        let report_row = |name: &str, r: &MetricsReport| {
            vec![
                name.to_owned(),
                r.pos.to_string(),
                r.neg.to_string(),
                f(r.skew),
                f(r.aucpr),
                f(r.aucnpr),
                f(r.aucpr_min),
                f(r.ap),
                f(r.ap_min),
            ]
        };
        for g in &agg.groups {
            w.write_record(report_row(g.group.as_deref().unwrap_or(""), g))?;
        }
        let mean = if agg.weighted {
            "weighted_mean"
        } else {
            "mean"
        };
        w.write_record([
            mean,
            "",
            "",
            "",
            &f(agg.mean_aucpr),
            &f(agg.mean_aucnpr),
            "",
            "",
            "",
        ])?;
        if let Some(m) = &agg.merged {
            w.write_record(report_row("merged", m))?;
        }
        Ok(())
    });
    if let Some(v) = vertical {
        out.push('\n');
        out.push_str(&csv_string(|w| {
            let mut header = vec!["recall".to_owned(), "precision".to_owned()];
            for g in &agg.groups {
                header.push(format!("{}_precision", g.group.as_deref().unwrap_or("")));
            }
            for g in &agg.groups {
                header.push(format!(
                    "{}_min_precision",
                    g.group.as_deref().unwrap_or("")
                ));
            }
            w.write_record(&header)?;
            for p in &v.points {
                let mut row = vec![f(p.recall), f(p.precision)];
                row.extend(p.fold_precisions.iter().map(|&x| f(x)));
                row.extend(p.fold_min_precisions.iter().map(|&x| f(x)));
                w.write_record(&row)?;
            }
            Ok(())
        }));
    }
    out
}

#[derive(Serialize)]
struct SweepRowRecord {
    ratio: String,
    seed: u64,
    pos: u64,
    neg: u64,
    aucpr: f64,
    aucnpr: f64,
    original_aucpr: f64,
    original_aucnpr: f64,
}

#[derive(Serialize)]
struct SweepRecord {
    rows: Vec<SweepRowRecord>,
    dispersion: Option<DispersionRecord>,
}

#[derive(Serialize)]
struct DispersionRecord {
    aucpr_sd: f64,
    aucnpr_sd: f64,
}

fn sweep_rows(rows: &[SweepRow], prec: Precision) -> Vec<SweepRowRecord> {
    let f = |x| prec.apply(x);
    rows.iter()
        .map(|r| SweepRowRecord {
            ratio: r.ratio.to_string(),
            seed: r.seed,
            pos: r.downsampled_pos,
            neg: r.downsampled_neg,
            aucpr: f(r.downsampled_aucpr),
            aucnpr: f(r.downsampled_aucnpr),
            original_aucpr: f(r.original_aucpr),
            original_aucnpr: f(r.original_aucnpr),
        })
        .collect()
}

pub fn sweep_json(
    rows: &[SweepRow],
    dispersion: Option<SweepDispersion>,
    prec: Precision,
) -> String {
    to_json(&SweepRecord {
        rows: sweep_rows(rows, prec),
        dispersion: dispersion.map(|d| DispersionRecord {
            aucpr_sd: prec.apply(d.aucpr_sd),
            aucnpr_sd: prec.apply(d.aucnpr_sd),
        }),
    })
}

pub fn sweep_csv(rows: &[SweepRow], prec: Precision) -> String {
    csv_string(|w| {
        for r in sweep_rows(rows, prec) {
            w.serialize(r)?;
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundPoint {
    pub recall: f64,
    pub min_precision: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRecord {
    pub skew: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pos: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neg: Option<u64>,
    pub aucpr_min: f64,
    pub range: [f64; 2],
    pub aucpr_min_range: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ap_min: Option<f64>,
    pub min_precision: Vec<BoundPoint>,
}

pub fn bounds_json(b: &BoundsRecord) -> String {
    to_json(b)
}

/// The curve table, one row per recall, with the scalar bounds repeated on
/// each row so the file stays rectangular.
pub fn bounds_csv(b: &BoundsRecord) -> String {
    csv_string(|w| {
        w.write_record([
            "skew",
            "recall",
            "min_precision",
            "aucpr_min",
            "range_lo",
            "range_hi",
            "aucpr_min_range",
            "ap_min",
        ])?;
        let ap = b.ap_min.map(display).unwrap_or_default();
        for p in &b.min_precision {
            w.write_record([
                display(b.skew),
                display(p.recall),
                display(p.min_precision),
                display(b.aucpr_min),
                display(b.range[0]),
                display(b.range[1]),
                display(b.aucpr_min_range),
                ap.clone(),
            ])?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use prspace::ScoredDataset;

    #[test]
    fn rounding_keeps_six_digits() {
        assert_eq!(round_sig6(0.306_852_819_440_054_7), 0.306853);
        assert_eq!(round_sig6(123_456_789.0), 123_457_000.0);
        assert_eq!(round_sig6(1.0), 1.0);
        assert_eq!(sig6(0.018_175_634_142_324_96), "0.0181756");
        assert_eq!(sig6(2.3456789e-16), "2.34568e-16");
        assert_eq!(sig6(5.000_001_666_667_5e-7), "5e-7");
        let p = Precision { full: false };
        assert_eq!(p.apply(0.0), 0.0);
        assert_eq!(Precision { full: true }.apply(0.1234567), 0.1234567);
    }

    fn report() -> MetricsReport {
        let d = ScoredDataset::from_pairs([(true, 0.9), (false, 0.8), (true, 0.7), (false, 0.1)])
            .unwrap();
        MetricsReport::compute(&d, RecallRange::FULL).unwrap()
    }

    #[test]
    fn analyze_keys_are_exact() {
        let json: serde_json::Value =
            serde_json::from_str(&analyze_json(&report(), Precision::default())).unwrap();
        let mut keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "ap",
                "ap_min",
                "aucnpr",
                "aucpr",
                "aucpr_min",
                "neg",
                "pos",
                "range",
                "skew"
            ]
        );
    }

    #[test]
    fn full_precision_round_trips_exactly() {
        let r = report();
        let back = parse_report_json(&analyze_json(&r, Precision { full: true })).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn analyze_csv_has_header_and_row() {
        let text = analyze_csv(&report(), Precision::default());
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("pos,neg,skew,aucpr"));
        assert!(lines[1].starts_with("2,2,0.5,"));
    }
}

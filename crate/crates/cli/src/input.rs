//! Prediction files: UTF-8, comma-delimited, with a header naming some of
//! `label`, `score`, `fold`, `task`. `label` and `score` are required.

use std::io::Read;
use std::path::Path;

use prspace::{Record, ScoredDataset};

use crate::error::{CliError, Result};

const COLUMNS: [&str; 4] = ["label", "score", "fold", "task"];

pub fn read_predictions(path: &Path) -> Result<ScoredDataset> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_predictions(file, &path.display().to_string())
}

/// Parses prediction rows. `origin` names the source in error messages.
pub fn parse_predictions<R: Read>(input: R, origin: &str) -> Result<ScoredDataset> {
    let parse_err = |line: u64, message: String| CliError::Parse {
        path: origin.to_owned(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();

    let mut index = [None; 4];
    for (i, name) in headers.iter().enumerate() {
        let slot = COLUMNS
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| parse_err(1, format!("unexpected column `{name}`")))?;
        if index[slot].replace(i).is_some() {
            return Err(parse_err(1, format!("duplicate column `{name}`")));
        }
    }
    let (label_col, score_col) = match (index[0], index[1]) {
        (Some(l), Some(s)) => (l, s),
        _ => return Err(parse_err(1, "header must name `label` and `score`".into())),
    };

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let label = match &row[label_col] {
            "0" => false,
            "1" => true,
            other => {
                return Err(parse_err(
                    line,
                    format!("label must be 0 or 1, got `{other}`"),
                ))
            }
        };
        let raw = &row[score_col];
        let score: f64 = raw
            .parse()
            .map_err(|_| parse_err(line, format!("score `{raw}` is not a number")))?;
        if !score.is_finite() {
            return Err(parse_err(line, format!("score `{raw}` is not finite")));
        }
        let optional =
            |col: Option<usize>| col.map(|c| row[c].to_owned()).filter(|s| !s.is_empty());
        records.push(Record {
            label,
            score,
            fold: optional(index[2]),
            task: optional(index[3]),
        });
    }
    Ok(ScoredDataset::new(records)?)
}

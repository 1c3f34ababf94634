//! Scored, labeled examples and their threshold sweep.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::confusion::{ClassBalance, ConfusionMatrix};
use crate::error::{Error, Result};

/// One labeled prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub label: bool,
    pub score: f64,
    pub fold: Option<String>,
    pub task: Option<String>,
}

impl Record {
    pub fn new(label: bool, score: f64) -> Self {
        Self {
            label,
            score,
            fold: None,
            task: None,
        }
    }

    pub fn with_fold(mut self, fold: impl Into<String>) -> Self {
        self.fold = Some(fold.into());
        self
    }

    pub fn with_task(mut self, task: impl Into<String>) -> Self {
        self.task = Some(task.into());
        self
    }
}

/// Labeled examples with finite scores. Scores are only compared, never
/// interpreted as probabilities.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoredDataset {
    records: Vec<Record>,
}

impl ScoredDataset {
    pub fn new(records: Vec<Record>) -> Result<Self> {
        if let Some((index, r)) = records
            .iter()
            .enumerate()
            .find(|(_, r)| !r.score.is_finite())
        {
            return Err(Error::NonFiniteScore {
                index,
                score: r.score,
            });
        }
        Ok(Self { records })
    }

    /// Builds a dataset from `(label, score)` pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (bool, f64)>,
    {
        Self::new(pairs.into_iter().map(|(l, s)| Record::new(l, s)).collect())
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count_positives(&self) -> u64 {
        self.records.iter().filter(|r| r.label).count() as u64
    }

    pub fn balance(&self) -> Result<ClassBalance> {
        let pos = self.count_positives();
        ClassBalance::new(pos, self.records.len() as u64 - pos)
    }

    /// Balance, requiring both classes to be present.
    pub fn checked_balance(&self) -> Result<ClassBalance> {
        let pos = self.count_positives();
        let neg = self.records.len() as u64 - pos;
        if pos == 0 || neg == 0 {
            return Err(Error::DegenerateDataset { pos, neg });
        }
        ClassBalance::new(pos, neg)
    }

    /// Records sorted by descending score and split into tie groups, each
    /// reported as `(positives, negatives)`.
    pub(crate) fn tie_groups(&self) -> Vec<(u64, u64)> {
        let mut sorted: Vec<&Record> = self.records.iter().collect();
        sorted.sort_by(|a, b| descending(a.score, b.score));
        let mut groups = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let score = sorted[i].score;
            let (mut p, mut n) = (0, 0);
            while i < sorted.len() && sorted[i].score == score {
                if sorted[i].label {
                    p += 1;
                } else {
                    n += 1;
                }
                i += 1;
            }
            groups.push((p, n));
        }
        groups
    }
}

fn descending(a: f64, b: f64) -> Ordering {
    b.partial_cmp(&a).expect("scores are finite")
}

impl FromIterator<Record> for ScoredDataset {
    /// Panics on a non-finite score; use [`ScoredDataset::new`] for fallible construction.
    fn from_iter<T: IntoIterator<Item = Record>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect()).expect("finite scores")
    }
}

/// Cumulative `(tp, fp)` after each distinct score threshold, from `(0, 0)`
/// to `(pos, neg)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutpoints {
    balance: ClassBalance,
    points: Vec<(u64, u64)>,
}

impl Cutpoints {
    /// Validates a raw sweep: starts at the origin, ends at `(pos, neg)`,
    /// and strictly advances `tp + fp` without decreasing either count.
    pub fn new(balance: ClassBalance, points: Vec<(u64, u64)>) -> Result<Self> {
        balance.require_both()?;
        let ok_ends = points.first() == Some(&(0, 0))
            && points.last() == Some(&(balance.pos(), balance.neg()));
        let ok_steps = points
            .windows(2)
            .all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1 && w[1] != w[0]);
        if !ok_ends || !ok_steps {
            return Err(Error::InvalidCutpoints);
        }
        Ok(Self { balance, points })
    }

    /// Sweep of the worst ranking: every negative ahead of every positive.
    pub fn worst(balance: ClassBalance) -> Result<Self> {
        balance.require_both()?;
        Ok(Self {
            balance,
            points: vec![(0, 0), (0, balance.neg()), (balance.pos(), balance.neg())],
        })
    }

    /// Sweep of the perfect ranking: every positive ahead of every negative.
    pub fn perfect(balance: ClassBalance) -> Result<Self> {
        balance.require_both()?;
        Ok(Self {
            balance,
            points: vec![(0, 0), (balance.pos(), 0), (balance.pos(), balance.neg())],
        })
    }

    pub fn balance(&self) -> ClassBalance {
        self.balance
    }

    pub fn points(&self) -> &[(u64, u64)] {
        &self.points
    }

    /// Confusion matrix at each threshold, origin excluded.
    pub fn matrices(&self) -> impl Iterator<Item = ConfusionMatrix> + '_ {
        self.points[1..].iter().map(|&(tp, fp)| {
            ConfusionMatrix::from_balance(self.balance, tp, fp).expect("cutpoints within balance")
        })
    }
}

/// Sweeps the decision threshold from the highest score down. Tied scores
/// form one step.
pub fn cutpoints(data: &ScoredDataset) -> Result<Cutpoints> {
    let balance = data.checked_balance()?;
    let mut points = Vec::with_capacity(data.len() + 1);
    points.push((0, 0));
    let (mut tp, mut fp) = (0, 0);
    for (p, n) in data.tie_groups() {
        tp += p;
        fp += n;
        points.push((tp, fp));
    }
    Ok(Cutpoints { balance, points })
}

//! Seeded negative downsampling and ratio sweeps.
//!
//! Each `(ratio, seed)` cell draws from its own ChaCha8 stream, seeded with
//! a SplitMix64 mix of the user seed and the ratio, so results do not depend
//! on the order in which cells are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aggregate::MetricsReport;
use crate::bounds::RecallRange;
use crate::dataset::{Record, ScoredDataset};
use crate::error::{Error, Result};

/// A positive:negative ratio such as `1:5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ratio {
    pos_part: u64,
    neg_part: u64,
}

impl Ratio {
    pub fn new(pos_part: u64, neg_part: u64) -> Result<Self> {
        if pos_part == 0 || neg_part == 0 {
            return Err(Error::InvalidRatio(format!("{pos_part}:{neg_part}")));
        }
        Ok(Self { pos_part, neg_part })
    }

    pub fn pos_part(&self) -> u64 {
        self.pos_part
    }

    pub fn neg_part(&self) -> u64 {
        self.neg_part
    }

    pub fn skew(&self) -> f64 {
        self.pos_part as f64 / (self.pos_part + self.neg_part) as f64
    }

    /// Negatives needed to pair with `pos` positives, rounded to nearest.
    pub fn negatives_for(&self, pos: u64) -> u64 {
        (pos * self.neg_part + self.pos_part / 2) / self.pos_part
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.pos_part, self.neg_part)
    }
}

impl std::str::FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRatio(s.to_owned());
        let (p, n) = s.split_once(':').ok_or_else(bad)?;
        let p = p.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        Ratio::new(p, n).map_err(|_| bad())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the generator used for one sweep cell.
pub fn cell_seed(seed: u64, ratio: Ratio) -> u64 {
    let r = splitmix64(ratio.pos_part) ^ splitmix64(ratio.neg_part.rotate_left(32));
    splitmix64(seed ^ splitmix64(r))
}

/// Keeps every positive and a uniform sample of negatives, without
/// replacement, sized for `ratio`. Retained records keep their input order.
pub fn downsample_negatives(
    data: &ScoredDataset,
    ratio: Ratio,
    seed: u64,
) -> Result<ScoredDataset> {
    let balance = data.checked_balance()?;
    let needed = ratio.negatives_for(balance.pos());
    if needed > balance.neg() {
        return Err(Error::InsufficientNegatives {
            ratio: ratio.to_string(),
            needed,
            available: balance.neg(),
        });
    }
    if needed == 0 {
        return Err(Error::DegenerateDataset {
            pos: balance.pos(),
            neg: 0,
        });
    }
    let neg_slots: Vec<usize> = data
        .records()
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.label)
        .map(|(i, _)| i)
        .collect();
    let mut keep = vec![false; data.len()];
    for (i, r) in data.records().iter().enumerate() {
        keep[i] = r.label;
    }
    if needed == balance.neg() {
        keep.iter_mut().for_each(|k| *k = true);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(seed, ratio));
        for j in rand::seq::index::sample(&mut rng, neg_slots.len(), needed as usize) {
            keep[neg_slots[j]] = true;
        }
    }
    let records: Vec<Record> = data
        .records()
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(r, _)| r.clone())
        .collect();
    ScoredDataset::new(records)
}

/// One `(ratio, seed)` cell of a sweep: metrics on the downsampled set and
/// on the full set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ratio: Ratio,
    pub seed: u64,
    pub downsampled_pos: u64,
    pub downsampled_neg: u64,
    pub downsampled_aucpr: f64,
    pub downsampled_aucnpr: f64,
    pub original_aucpr: f64,
    pub original_aucnpr: f64,
}

/// Rows ordered by ratio as given, then by seed as given.
pub fn ratio_sweep(
    data: &ScoredDataset,
    ratios: &[Ratio],
    seeds: &[u64],
    range: RecallRange,
) -> Result<Vec<SweepRow>> {
    if ratios.is_empty() || seeds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let original = MetricsReport::compute(data, range)?;
    let mut rows = Vec::with_capacity(ratios.len() * seeds.len());
    for &ratio in ratios {
        for &seed in seeds {
            let cell = || -> Result<SweepRow> {
                let sub = downsample_negatives(data, ratio, seed)?;
                let m = MetricsReport::compute(&sub, range)?;
                Ok(SweepRow {
                    ratio,
                    seed,
                    downsampled_pos: m.pos,
                    downsampled_neg: m.neg,
                    downsampled_aucpr: m.aucpr,
                    downsampled_aucnpr: m.aucnpr,
                    original_aucpr: original.aucpr,
                    original_aucnpr: original.aucnpr,
                })
            };
            rows.push(cell().map_err(|e| Error::SweepCell {
                ratio: ratio.to_string(),
                seed,
                source: Box::new(e),
            })?);
        }
    }
    Ok(rows)
}

/// Sample standard deviations of the downsampled columns across rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepDispersion {
    pub aucpr_sd: f64,
    pub aucnpr_sd: f64,
}

impl SweepDispersion {
    pub fn of(rows: &[SweepRow]) -> Option<Self> {
        if rows.len() < 2 {
            return None;
        }
        let a: Vec<f64> = rows.iter().map(|r| r.downsampled_aucpr).collect();
        let n: Vec<f64> = rows.iter().map(|r| r.downsampled_aucnpr).collect();
        Some(Self {
            aucpr_sd: sample_sd(&a),
            aucnpr_sd: sample_sd(&n),
        })
    }

    pub fn aucnpr_is_steadier(&self) -> bool {
        self.aucnpr_sd <= self.aucpr_sd
    }
}

fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

//! Synthetic binormal scorer with calibrated scores.
//!
//! Each example draws a feature from `N(+d/2, 1)` if positive or
//! `N(−d/2, 1)` if negative. Its score is the exact posterior
//! `P(y = 1 | x)` under the generating skew, so scores from different
//! draws of the same scorer are directly comparable.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{Record, ScoredDataset};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinormalScorer {
    /// Distance between the class means, in standard deviations.
    pub separation: f64,
}

impl Default for BinormalScorer {
    fn default() -> Self {
        Self { separation: 1.5 }
    }
}

impl BinormalScorer {
    pub fn new(separation: f64) -> Self {
        Self { separation }
    }

    /// Posterior probability of the positive class at feature `x`.
    pub fn posterior(&self, x: f64, skew: f64) -> f64 {
        let d = self.separation;
        let log_odds = d * x + (skew / (1.0 - skew)).ln();
        1.0 / (1.0 + (-log_odds).exp())
    }

    /// `pos` positives followed by `neg` negatives.
    pub fn generate(&self, pos: usize, neg: usize, seed: u64) -> ScoredDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = self.separation / 2.0;
        let skew = pos as f64 / (pos + neg) as f64;
        let pos_dist = Normal::new(half, 1.0).expect("unit variance");
        let neg_dist = Normal::new(-half, 1.0).expect("unit variance");
        let mut records = Vec::with_capacity(pos + neg);
        for _ in 0..pos {
            let x = pos_dist.sample(&mut rng);
            records.push(Record::new(true, self.posterior(x, skew)));
        }
        for _ in 0..neg {
            let x = neg_dist.sample(&mut rng);
            records.push(Record::new(false, self.posterior(x, skew)));
        }
        ScoredDataset::new(records).expect("posterior is finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_balanced() {
        let s = BinormalScorer::default();
        let a = s.generate(20, 80, 3);
        assert_eq!(a, s.generate(20, 80, 3));
        assert_ne!(a, s.generate(20, 80, 4));
        assert_eq!(a.count_positives(), 20);
        assert!(a.records().iter().all(|r| (0.0..=1.0).contains(&r.score)));
    }

    #[test]
    fn posterior_at_midpoint_is_prior() {
        let s = BinormalScorer::new(2.0);
        assert!((s.posterior(0.0, 0.2) - 0.2).abs() < 1e-15);
    }
}

//! Class balance, confusion matrices and points in PR space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positive and negative example counts of a labeled set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassBalance {
    pos: u64,
    neg: u64,
}

impl ClassBalance {
    pub fn new(pos: u64, neg: u64) -> Result<Self> {
        if pos + neg == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { pos, neg })
    }

    pub fn pos(&self) -> u64 {
        self.pos
    }

    pub fn neg(&self) -> u64 {
        self.neg
    }

    pub fn total(&self) -> u64 {
        self.pos + self.neg
    }

    /// Fraction of positive examples, `pos / (pos + neg)`.
    pub fn skew(&self) -> f64 {
        self.pos as f64 / self.total() as f64
    }

    /// Skew restricted to the open interval (0, 1), as every bound requires.
    pub fn strict_skew(&self) -> Result<f64> {
        if self.pos == 0 || self.neg == 0 {
            return Err(Error::DegenerateSkew(self.skew()));
        }
        Ok(self.skew())
    }

    /// Both classes present.
    pub fn require_both(&self) -> Result<()> {
        if self.pos == 0 || self.neg == 0 {
            return Err(Error::DegenerateDataset {
                pos: self.pos,
                neg: self.neg,
            });
        }
        Ok(())
    }
}

/// Rejects skews outside the open unit interval.
pub fn check_skew(skew: f64) -> Result<f64> {
    if skew.is_finite() && skew > 0.0 && skew < 1.0 {
        Ok(skew)
    } else {
        Err(Error::DegenerateSkew(skew))
    }
}

/// A confusion matrix whose rows and columns agree with its class balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConfusionMatrix {
    tp: u64,
    fp: u64,
    fn_: u64,
    tn: u64,
}

impl ConfusionMatrix {
    pub fn tp(&self) -> u64 {
        self.tp
    }

    pub fn fp(&self) -> u64 {
        self.fp
    }

    pub fn fn_(&self) -> u64 {
        self.fn_
    }

    pub fn tn(&self) -> u64 {
        self.tn
    }

    pub fn balance(&self) -> ClassBalance {
        ClassBalance {
            pos: self.tp + self.fn_,
            neg: self.fp + self.tn,
        }
    }

    /// Matrix obtained by predicting `tp + fp` examples positive on `balance`.
    pub fn from_balance(balance: ClassBalance, tp: u64, fp: u64) -> Result<Self> {
        let fn_ = balance.pos.checked_sub(tp).ok_or(Error::NegativeCell {
            cell: "fn",
            value: balance.pos as i64 - tp as i64,
        })?;
        let tn = balance.neg.checked_sub(fp).ok_or(Error::NegativeCell {
            cell: "tn",
            value: balance.neg as i64 - fp as i64,
        })?;
        Ok(Self { tp, fp, fn_, tn })
    }
}

/// Validates a raw `(tp, fp, fn, tn)` tuple. The balance is implied by the
/// column sums, so the only ways to fail are a negative cell or an empty set.
pub fn validate_confusion(tp: i64, fp: i64, fn_: i64, tn: i64) -> Result<ConfusionMatrix> {
    for (cell, value) in [("tp", tp), ("fp", fp), ("fn", fn_), ("tn", tn)] {
        if value < 0 {
            return Err(Error::NegativeCell { cell, value });
        }
    }
    if tp == 0 && fp == 0 && fn_ == 0 && tn == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(ConfusionMatrix {
        tp: tp as u64,
        fp: fp as u64,
        fn_: fn_ as u64,
        tn: tn as u64,
    })
}

/// A point in PR space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PRPoint {
    pub recall: f64,
    pub precision: f64,
}

impl PRPoint {
    pub fn new(recall: f64, precision: f64) -> Result<Self> {
        for (name, value) in [("recall", recall), ("precision", precision)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::DomainError { name, value });
            }
        }
        Ok(Self { recall, precision })
    }
}

/// Recall and precision of a confusion matrix.
///
/// Precision with `tp = 0, fp > 0` is 0; with `tp = fp = 0` nothing was
/// predicted positive and precision is reported as undefined.
pub fn pr_point(cm: &ConfusionMatrix) -> Result<PRPoint> {
    let balance = cm.balance();
    if balance.pos == 0 {
        return Err(Error::NoPositives);
    }
    if cm.tp == 0 && cm.fp == 0 {
        return Err(Error::UndefinedPrecision);
    }
    let recall = cm.tp as f64 / balance.pos as f64;
    let precision = cm.tp as f64 / (cm.tp + cm.fp) as f64;
    Ok(PRPoint { recall, precision })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_matrix_with_low_recall() {
        let cm = validate_confusion(20, 80, 80, 120).unwrap();
        assert_eq!(cm.balance(), ClassBalance::new(100, 200).unwrap());
        let pt = pr_point(&cm).unwrap();
        assert_eq!(pt.recall, 0.2);
        assert_eq!(pt.precision, 0.2);
    }

    #[test]
    fn negative_cell_rejected() {
        let err = validate_confusion(60, 240, 40, -40).unwrap_err();
        assert_eq!(
            err,
            Error::NegativeCell {
                cell: "tn",
                value: -40
            }
        );
    }

    #[test]
    fn all_zero_matrix_is_empty() {
        assert_eq!(validate_confusion(0, 0, 0, 0), Err(Error::EmptyDataset));
    }

    #[test]
    fn perfect_classifier_point() {
        let cm = validate_confusion(7, 0, 0, 13).unwrap();
        assert_eq!(pr_point(&cm).unwrap(), PRPoint::new(1.0, 1.0).unwrap());
    }

    #[test]
    fn all_negatives_predicted_positive() {
        let cm = validate_confusion(50, 200, 50, 0).unwrap();
        let pt = pr_point(&cm).unwrap();
        assert_eq!(pt.recall, 0.5);
        assert_eq!(pt.precision, 0.2);
    }

    #[test]
    fn precision_corner_cases() {
        let cm = validate_confusion(0, 5, 10, 5).unwrap();
        assert_eq!(pr_point(&cm).unwrap().precision, 0.0);
        let cm = validate_confusion(0, 0, 10, 5).unwrap();
        assert_eq!(pr_point(&cm), Err(Error::UndefinedPrecision));
        let cm = validate_confusion(0, 3, 0, 5).unwrap();
        assert_eq!(pr_point(&cm), Err(Error::NoPositives));
    }

    #[test]
    fn skew_checks() {
        let b = ClassBalance::new(1, 2).unwrap();
        assert!((b.skew() - 1.0 / 3.0).abs() < 1e-15);
        assert!(ClassBalance::new(0, 0).is_err());
        assert!(ClassBalance::new(0, 4).unwrap().strict_skew().is_err());
        assert!(check_skew(0.0).is_err());
        assert!(check_skew(1.0).is_err());
        assert!(check_skew(f64::NAN).is_err());
        assert_eq!(check_skew(0.25), Ok(0.25));
    }

    #[test]
    fn from_balance_rejects_overflowing_counts() {
        let b = ClassBalance::new(10, 10).unwrap();
        assert!(ConfusionMatrix::from_balance(b, 11, 0).is_err());
        let cm = ConfusionMatrix::from_balance(b, 4, 10).unwrap();
        assert_eq!((cm.fn_(), cm.tn()), (6, 0));
    }
}

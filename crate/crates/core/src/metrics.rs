//! Multi-label evaluation: hamming loss, subset accuracy, example-based
//! accuracy, micro-averaged precision/recall/F1, per-label accuracy and the
//! per-label accuracy margin between an ensemble and its baseline.
//!
//! Conventions:
//! - hamming loss is normalized per example-label pair, i.e. by `N * Q`;
//! - example-based accuracy scores two empty sets as 1;
//! - micro scores are all 1 when `tp = fp = fn = 0`, otherwise any 0/0
//!   component is 0, and F1 is 0 when precision + recall is 0.

use serde::{Deserialize, Serialize};

use crate::corpus::LabelSet;
use crate::error::{Error, Result};

fn check(preds: &[LabelSet], golds: &[LabelSet], q: Option<usize>) -> Result<()> {
    if preds.len() != golds.len() {
        return Err(Error::Argument(format!(
            "{} predictions for {} gold label sets",
            preds.len(),
            golds.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::Argument("metrics need at least one instance".into()));
    }
    if let Some(q) = q {
        if q == 0 {
            return Err(Error::Argument("label space must be non-empty".into()));
        }
        if preds.iter().chain(golds).any(|s| s.max_label().is_some_and(|l| l >= q)) {
            return Err(Error::Argument(format!("label id outside 0..{q}")));
        }
    }
    Ok(())
}

pub fn hamming_loss(preds: &[LabelSet], golds: &[LabelSet], q: usize) -> Result<f64> {
    check(preds, golds, Some(q))?;
    let wrong: usize = preds
        .iter()
        .zip(golds)
        .map(|(p, g)| p.symmetric_difference_len(g))
        .sum();
    Ok(wrong as f64 / (preds.len() * q) as f64)
}

pub fn subset_accuracy(preds: &[LabelSet], golds: &[LabelSet]) -> Result<f64> {
    check(preds, golds, None)?;
    let exact = preds.iter().zip(golds).filter(|(p, g)| p == g).count();
    Ok(exact as f64 / preds.len() as f64)
}

pub fn example_based_accuracy(preds: &[LabelSet], golds: &[LabelSet]) -> Result<f64> {
    check(preds, golds, None)?;
    let total: f64 = preds
        .iter()
        .zip(golds)
        .map(|(p, g)| {
            let union = p.union_len(g);
            if union == 0 {
                1.0
            } else {
                p.intersection_len(g) as f64 / union as f64
            }
        })
        .sum();
    Ok(total / preds.len() as f64)
}

/// True positives, false positives and false negatives summed over labels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionTotals {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub totals: ConfusionTotals,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ConfusionTotals {
    pub fn scores(self) -> MicroScores {
        let ConfusionTotals { tp, fp, fn_ } = self;
        if tp == 0 && fp == 0 && fn_ == 0 {
            return MicroScores {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0,
                totals: self,
            };
        }
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        MicroScores {
            precision,
            recall,
            f1,
            totals: self,
        }
    }
}

pub fn confusion_totals(preds: &[LabelSet], golds: &[LabelSet], q: usize) -> Result<ConfusionTotals> {
    check(preds, golds, Some(q))?;
    let mut t = ConfusionTotals::default();
    for (p, g) in preds.iter().zip(golds) {
        let both = p.intersection_len(g) as u64;
        t.tp += both;
        t.fp += p.len() as u64 - both;
        t.fn_ += g.len() as u64 - both;
    }
    Ok(t)
}

pub fn micro_scores(preds: &[LabelSet], golds: &[LabelSet], q: usize) -> Result<MicroScores> {
    Ok(confusion_totals(preds, golds, q)?.scores())
}

/// Number of instances whose membership of each label is predicted correctly.
pub fn per_label_correct(preds: &[LabelSet], golds: &[LabelSet], q: usize) -> Result<Vec<u64>> {
    check(preds, golds, Some(q))?;
    let n = preds.len() as u64;
    let mut wrong = vec![0u64; q];
    for (p, g) in preds.iter().zip(golds) {
        for l in p.iter().chain(g.iter()) {
            if p.contains(l) != g.contains(l) {
                wrong[l] += 1;
            }
        }
    }
    // Each mismatch was visited once, from whichever side holds the label.
    Ok(wrong.into_iter().map(|w| n - w).collect())
}

pub fn per_label_accuracy(preds: &[LabelSet], golds: &[LabelSet], q: usize) -> Result<Vec<f64>> {
    let n = preds.len() as f64;
    Ok(per_label_correct(preds, golds, q)?
        .into_iter()
        .map(|c| c as f64 / n)
        .collect())
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n: usize,
    pub q: usize,
    pub hamming_loss: f64,
    pub subset_accuracy: f64,
    pub example_accuracy: f64,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub per_label_accuracy: Vec<f64>,
    pub per_label_correct: Vec<u64>,
    /// Example-label pairs whose membership is mispredicted.
    pub mispredicted_pairs: u64,
    pub totals: ConfusionTotals,
}

impl EvaluationReport {
    pub fn evaluate(preds: &[LabelSet], golds: &[LabelSet], q: usize) -> Result<Self> {
        check(preds, golds, Some(q))?;
        let n = preds.len();
        let mispredicted_pairs: u64 = preds
            .iter()
            .zip(golds)
            .map(|(p, g)| p.symmetric_difference_len(g) as u64)
            .sum();
        let micro = micro_scores(preds, golds, q)?;
        let per_label_correct = per_label_correct(preds, golds, q)?;
        let report = EvaluationReport {
            n,
            q,
            hamming_loss: mispredicted_pairs as f64 / (n * q) as f64,
            subset_accuracy: subset_accuracy(preds, golds)?,
            example_accuracy: example_based_accuracy(preds, golds)?,
            micro_precision: micro.precision,
            micro_recall: micro.recall,
            micro_f1: micro.f1,
            per_label_accuracy: per_label_correct.iter().map(|&c| c as f64 / n as f64).collect(),
            per_label_correct,
            mispredicted_pairs,
            totals: micro.totals,
        };
        report.check_identity()?;
        Ok(report)
    }

    pub fn mean_label_accuracy(&self) -> f64 {
        mean(&self.per_label_accuracy)
    }

    /// `mean(per_label_accuracy) = 1 - hamming_loss`: both count the same
    /// `N * Q` membership grid, so the integer counts must agree exactly and
    /// the floating-point forms within rounding.
    pub fn check_identity(&self) -> Result<()> {
        let correct: u64 = self.per_label_correct.iter().sum();
        let pairs = (self.n * self.q) as u64;
        if correct + self.mispredicted_pairs != pairs {
            return Err(Error::Invariant(format!(
                "per-label correct {correct} + mispredicted {} != {pairs} pairs",
                self.mispredicted_pairs
            )));
        }
        let gap = (self.mean_label_accuracy() - (1.0 - self.hamming_loss)).abs();
        if gap > 1e-12 {
            return Err(Error::Invariant(format!(
                "mean per-label accuracy differs from 1 - hamming loss by {gap:e}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginRow {
    pub label: usize,
    pub training_count: usize,
    pub baseline_accuracy: f64,
    pub approach_accuracy: f64,
    pub margin: f64,
}

/// Per-label accuracy margins, ordered by ascending training frequency and
/// then label id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub rows: Vec<MarginRow>,
}

impl MarginReport {
    pub fn mean_margin(&self) -> f64 {
        mean(&self.rows.iter().map(|r| r.margin).collect::<Vec<_>>())
    }
}

pub fn accuracy_margin(
    baseline: &EvaluationReport,
    approach: &EvaluationReport,
    training_counts: &[usize],
) -> Result<MarginReport> {
    let q = baseline.per_label_accuracy.len();
    if approach.per_label_accuracy.len() != q || training_counts.len() != q {
        return Err(Error::Argument(
            "baseline, approach and training counts must cover the same labels".into(),
        ));
    }
    let mut rows: Vec<MarginRow> = (0..q)
        .map(|l| MarginRow {
            label: l,
            training_count: training_counts[l],
            baseline_accuracy: baseline.per_label_accuracy[l],
            approach_accuracy: approach.per_label_accuracy[l],
            margin: approach.per_label_accuracy[l] - baseline.per_label_accuracy[l],
        })
        .collect();
    rows.sort_by_key(|r| (r.training_count, r.label));
    let report = MarginReport { rows };
    let gap = (report.mean_margin() - (approach.mean_label_accuracy() - baseline.mean_label_accuracy())).abs();
    if gap > 1e-12 {
        return Err(Error::Invariant(format!(
            "mean margin differs from the difference of mean accuracies by {gap:e}"
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(raw: &[&[usize]]) -> Vec<LabelSet> {
        raw.iter().map(|s| LabelSet::from_ids(s.iter().copied())).collect()
    }

    // Labels A, B, C are ids 0, 1, 2.
    fn toy() -> (Vec<LabelSet>, Vec<LabelSet>) {
        (sets(&[&[0], &[1, 2]]), sets(&[&[0, 1], &[1]]))
    }

    #[test]
    fn two_instance_toy() {
        let (h, y) = toy();
        assert_eq!(hamming_loss(&h, &y, 3).unwrap(), 2.0 / 6.0);
        assert_eq!(subset_accuracy(&h, &y).unwrap(), 0.0);
        assert_eq!(example_based_accuracy(&h, &y).unwrap(), 0.5);
        let m = micro_scores(&h, &y, 3).unwrap();
        assert_eq!(m.totals, ConfusionTotals { tp: 2, fp: 1, fn_: 1 });
        assert_eq!(m.precision, 2.0 / 3.0);
        assert_eq!(m.recall, 2.0 / 3.0);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(per_label_accuracy(&h, &y, 3).unwrap()[2], 0.5);
    }

    #[test]
    fn perfect_and_complement() {
        let y = sets(&[&[0], &[], &[1, 2]]);
        assert_eq!(hamming_loss(&y, &y, 3).unwrap(), 0.0);
        assert_eq!(subset_accuracy(&y, &y).unwrap(), 1.0);
        assert_eq!(example_based_accuracy(&y, &y).unwrap(), 1.0);
        let m = micro_scores(&y, &y, 3).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        assert_eq!(per_label_accuracy(&y, &y, 3).unwrap(), vec![1.0; 3]);
        let c = sets(&[&[1, 2], &[0, 1, 2], &[0]]);
        assert_eq!(hamming_loss(&c, &y, 3).unwrap(), 1.0);
    }

    #[test]
    fn zero_denominator_conventions() {
        let empty = sets(&[&[], &[]]);
        let m = micro_scores(&empty, &empty, 2).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        let gold = sets(&[&[0], &[1]]);
        let m = micro_scores(&empty, &gold, 2).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        assert_eq!(example_based_accuracy(&sets(&[&[]]), &sets(&[&[]])).unwrap(), 1.0);
        assert_eq!(example_based_accuracy(&sets(&[&[0]]), &sets(&[&[1]])).unwrap(), 0.0);
    }

    #[test]
    fn argument_errors() {
        let a = sets(&[&[0]]);
        let b = sets(&[&[0], &[1]]);
        assert!(matches!(hamming_loss(&a, &b, 2), Err(Error::Argument(_))));
        assert!(matches!(subset_accuracy(&[], &[]), Err(Error::Argument(_))));
        assert!(matches!(hamming_loss(&sets(&[&[3]]), &a, 2), Err(Error::Argument(_))));
    }

    #[test]
    fn margins_sorted_by_training_count() {
        let (h, y) = toy();
        let base = EvaluationReport::evaluate(&h, &y, 3).unwrap();
        let same = accuracy_margin(&base, &base, &[1, 5, 2]).unwrap();
        assert_eq!(same.rows.iter().map(|r| r.label).collect::<Vec<_>>(), vec![0, 2, 1]);
        assert!(same.rows.iter().all(|r| r.margin == 0.0));
        let perfect = EvaluationReport::evaluate(&y, &y, 3).unwrap();
        let none = EvaluationReport::evaluate(&sets(&[&[2], &[0, 2]]), &y, 3).unwrap();
        assert_eq!(none.per_label_accuracy, vec![0.0; 3]);
        let all = accuracy_margin(&none, &perfect, &[3, 3, 3]).unwrap();
        assert!(all.rows.iter().all(|r| r.margin == 1.0));
    }
}

use serde::{Deserialize, Serialize};

use crate::corpus::SparseBinaryVector;

/// Bernoulli naive Bayes with Laplace smoothing. Absent features contribute
/// `log(1 - p)` factors, folded into a per-class base term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub log_prior: Vec<f64>,
    /// `log P(f = 1 | c)` per class, per feature.
    pub log_present: Vec<Vec<f64>>,
    /// `log P(f = 0 | c)` per class, per feature.
    pub log_absent: Vec<Vec<f64>>,
    /// `log_prior[c] + sum_f log_absent[c][f]`.
    base: Vec<f64>,
}

impl NaiveBayes {
    /// Weights are rescaled to instance counts (`w * n`) before smoothing,
    /// so uniform weights reproduce plain Laplace-smoothed frequencies.
    pub(crate) fn train(
        vectors: &[SparseBinaryVector],
        classes: &[usize],
        weights: &[f64],
        n_classes: usize,
        dimension: usize,
        alpha: f64,
    ) -> NaiveBayes {
        let n = vectors.len() as f64;
        let mut class_count = vec![0.0f64; n_classes];
        let mut feature_count = vec![vec![0.0f64; dimension]; n_classes];
        for ((v, &c), &w) in vectors.iter().zip(classes).zip(weights) {
            let w = w * n;
            class_count[c] += w;
            for &f in v.indices() {
                feature_count[c][f] += w;
            }
        }
        let total: f64 = class_count.iter().sum();
        let k = n_classes as f64;
        let log_prior: Vec<f64> = class_count
            .iter()
            .map(|&cc| ((cc + alpha) / (total + k * alpha)).ln())
            .collect();
        let mut log_present = Vec::with_capacity(n_classes);
        let mut log_absent = Vec::with_capacity(n_classes);
        for c in 0..n_classes {
            let denom = class_count[c] + 2.0 * alpha;
            let (lp, la): (Vec<f64>, Vec<f64>) = feature_count[c]
                .iter()
                .map(|&fc| {
                    let p = (fc + alpha) / denom;
                    (p.ln(), ((class_count[c] - fc).max(0.0) + alpha).ln() - denom.ln())
                })
                .unzip();
            log_present.push(lp);
            log_absent.push(la);
        }
        let base = (0..n_classes)
            .map(|c| log_prior[c] + log_absent[c].iter().sum::<f64>())
            .collect();
        NaiveBayes {
            log_prior,
            log_present,
            log_absent,
            base,
        }
    }

    /// `P(f = 1 | c)`.
    pub fn likelihood(&self, class: usize, feature: usize) -> f64 {
        self.log_present[class][feature].exp()
    }

    /// Unnormalized log posterior of every class.
    pub fn log_posteriors(&self, x: &SparseBinaryVector) -> Vec<f64> {
        (0..self.base.len())
            .map(|c| {
                self.base[c]
                    + x.indices()
                        .iter()
                        .map(|&f| self.log_present[c][f] - self.log_absent[c][f])
                        .sum::<f64>()
            })
            .collect()
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{require_instances, PredictionSet};
use crate::corpus::{LabelSet, LabelSpace, MultiLabelDataset, SparseBinaryVector};
use crate::error::Result;
use crate::weak_learners::{train_multiclass, ClassDataset, MulticlassModel, WeakSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpModel {
    pub space: LabelSpace,
    pub dimension: usize,
    /// Class id to label set, ordered by the sets' sorted id lists.
    pub codebook: Vec<LabelSet>,
    pub priors: Vec<f64>,
    pub classifier: MulticlassModel,
}

pub fn train_lp(data: &MultiLabelDataset, weak: &WeakSpec) -> Result<LpModel> {
    require_instances(data)?;
    weak.validate()?;
    let mut counts: BTreeMap<&LabelSet, usize> = BTreeMap::new();
    for inst in data.instances() {
        *counts.entry(&inst.labels).or_default() += 1;
    }
    let codebook: Vec<LabelSet> = counts.keys().map(|s| (*s).clone()).collect();
    let n = data.n() as f64;
    let priors = counts.values().map(|&c| c as f64 / n).collect();
    let class_of: BTreeMap<&LabelSet, usize> = counts.keys().enumerate().map(|(c, s)| (*s, c)).collect();
    let classes = data.instances().iter().map(|i| class_of[&i.labels]).collect();
    let vectors = data.instances().iter().map(|i| i.vector.clone()).collect();
    let classifier = train_multiclass(weak, &ClassDataset::new(vectors, classes, codebook.len())?)?;
    Ok(LpModel {
        space: data.space().clone(),
        dimension: data.dimension(),
        codebook,
        priors,
        classifier,
    })
}

impl LpModel {
    /// Argmax of the class scores; ties go to the higher prior, then the
    /// lower class id.
    pub fn predict_class(&self, x: &SparseBinaryVector) -> usize {
        let scores = self.classifier.scores(x);
        let mut best = 0;
        for c in 1..scores.len() {
            if scores[c] > scores[best] || (scores[c] == scores[best] && self.priors[c] > self.priors[best]) {
                best = c;
            }
        }
        best
    }

    /// Per-label scores are membership indicators of the winning set.
    pub(crate) fn predict_unchecked(&self, x: &SparseBinaryVector) -> PredictionSet {
        let labels = self.codebook[self.predict_class(x)].clone();
        let scores = (0..self.space.len())
            .map(|l| if labels.contains(l) { 1.0 } else { 0.0 })
            .collect();
        PredictionSet { labels, scores }
    }
}

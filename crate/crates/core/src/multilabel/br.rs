use serde::{Deserialize, Serialize};

use super::{require_instances, PredictionSet};
use crate::corpus::{LabelSet, LabelSpace, MultiLabelDataset, SparseBinaryVector};
use crate::error::Result;
use crate::seed::derive_seed;
use crate::weak_learners::{self, BinaryModel, WeakSpec, WeightedBinaryDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrModel {
    pub space: LabelSpace,
    pub dimension: usize,
    /// One model per label, in label-id order.
    pub models: Vec<BinaryModel>,
}

/// Label `l` is trained on targets `+1 iff l in y_i` with uniform weights
/// and weak seed `derive_seed(weak.seed, l)`.
pub fn train_br(data: &MultiLabelDataset, weak: &WeakSpec) -> Result<BrModel> {
    require_instances(data)?;
    weak.validate()?;
    let vectors: Vec<SparseBinaryVector> = data.instances().iter().map(|i| i.vector.clone()).collect();
    let models = (0..data.q())
        .map(|l| {
            let targets = data
                .instances()
                .iter()
                .map(|i| if i.labels.contains(l) { 1 } else { -1 })
                .collect();
            let binary = WeightedBinaryDataset::uniform(vectors.clone(), targets)?;
            let spec = weak.clone().with_seed(derive_seed(weak.seed, l as u64));
            weak_learners::train(&spec, &binary)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BrModel {
        space: data.space().clone(),
        dimension: data.dimension(),
        models,
    })
}

impl BrModel {
    pub(crate) fn predict_unchecked(&self, x: &SparseBinaryVector) -> PredictionSet {
        let scores: Vec<f64> = self.models.iter().map(|m| m.score_unchecked(x)).collect();
        let labels = scores
            .iter()
            .enumerate()
            .filter(|(_, &s)| weak_learners::sign_of(s) > 0)
            .map(|(l, _)| l)
            .collect::<LabelSet>();
        PredictionSet { labels, scores }
    }
}

//! Multiclass training for label powerset: natively multiclass tree, forest
//! and naive Bayes; one-vs-rest batteries of binary models for stump and SVM.

use serde::{Deserialize, Serialize};

use super::tree::{self, ClassView, DecisionTree};
use super::{forest, BinaryModel, Forest, NaiveBayes, WeakKind, WeakSpec, WeightedBinaryDataset};
use crate::corpus::SparseBinaryVector;
use crate::error::{Error, Result};
use crate::seed;

/// Multiclass training data with uniform instance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDataset {
    pub vectors: Vec<SparseBinaryVector>,
    pub classes: Vec<usize>,
    pub n_classes: usize,
    pub dimension: usize,
}

impl ClassDataset {
    pub fn new(vectors: Vec<SparseBinaryVector>, classes: Vec<usize>, n_classes: usize) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Validation("multiclass dataset must be non-empty".into()));
        }
        if vectors.len() != classes.len() {
            return Err(Error::Validation("vectors and classes must have equal lengths".into()));
        }
        if n_classes == 0 || classes.iter().any(|&c| c >= n_classes) {
            return Err(Error::Validation("class id out of range".into()));
        }
        let dimension = vectors[0].dimension();
        if vectors.iter().any(|v| v.dimension() != dimension) {
            return Err(Error::Validation("all vectors must share one dimension".into()));
        }
        Ok(ClassDataset {
            vectors,
            classes,
            n_classes,
            dimension,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MulticlassModel {
    Constant { n_classes: usize, class: usize },
    Tree(DecisionTree),
    Forest(Forest),
    NaiveBayes(NaiveBayes),
    OneVsRest { models: Vec<BinaryModel> },
}

impl MulticlassModel {
    pub fn n_classes(&self) -> usize {
        match self {
            MulticlassModel::Constant { n_classes, .. } => *n_classes,
            MulticlassModel::Tree(t) => t.n_classes,
            MulticlassModel::Forest(f) => f.trees.first().map_or(0, |t| t.n_classes),
            MulticlassModel::NaiveBayes(nb) => nb.log_prior.len(),
            MulticlassModel::OneVsRest { models } => models.len(),
        }
    }

    /// Per-class scores; the winning class is their argmax.
    pub fn scores(&self, x: &SparseBinaryVector) -> Vec<f64> {
        match self {
            MulticlassModel::Constant { n_classes, class } => {
                let mut s = vec![0.0; *n_classes];
                s[*class] = 1.0;
                s
            }
            MulticlassModel::Tree(t) => t.distribution(x).to_vec(),
            MulticlassModel::Forest(f) => f.votes(x),
            MulticlassModel::NaiveBayes(nb) => nb.log_posteriors(x),
            MulticlassModel::OneVsRest { models } => models.iter().map(|m| m.score_unchecked(x)).collect(),
        }
    }
}

/// Trains the multiclass realization of `spec.kind` on uniformly weighted data.
pub fn train_multiclass(spec: &WeakSpec, data: &ClassDataset) -> Result<MulticlassModel> {
    spec.validate()?;
    let k = data.n_classes;
    let first = data.classes[0];
    if data.classes.iter().all(|&c| c == first) {
        return Ok(MulticlassModel::Constant {
            n_classes: k,
            class: first,
        });
    }
    let n = data.len();
    let weights = vec![1.0 / n as f64; n];
    let view = ClassView {
        vectors: &data.vectors,
        classes: &data.classes,
        weights: &weights,
        n_classes: k,
        dimension: data.dimension,
    };
    Ok(match spec.kind {
        WeakKind::Tree => MulticlassModel::Tree(tree::grow(&view, &spec.tree, None)),
        WeakKind::Forest => MulticlassModel::Forest(forest::train(&view, spec.forest.n_trees, spec.seed)),
        WeakKind::NaiveBayes => MulticlassModel::NaiveBayes(NaiveBayes::train(
            &data.vectors,
            &data.classes,
            &weights,
            k,
            data.dimension,
            spec.naive_bayes.laplace_alpha,
        )),
        WeakKind::Stump | WeakKind::Smo => {
            let mut models = Vec::with_capacity(k);
            for c in 0..k {
                let targets = data.classes.iter().map(|&y| if y == c { 1 } else { -1 }).collect();
                let binary = WeightedBinaryDataset::new(data.vectors.clone(), targets, weights.clone())?;
                let sub = spec.clone().with_seed(seed::derive_seed(spec.seed, c as u64));
                models.push(super::train(&sub, &binary)?);
            }
            MulticlassModel::OneVsRest { models }
        }
    })
}

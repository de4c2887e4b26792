use rand::distributions::{Distribution, WeightedIndex};
use serde::{Deserialize, Serialize};

use super::tree::{self, ClassView, DecisionTree};
use super::TreeParams;
use crate::corpus::SparseBinaryVector;
use crate::seed;

/// Bagged unpruned trees with per-split feature subsampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
}

impl Forest {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Number of trees voting for each class.
    pub fn votes(&self, x: &SparseBinaryVector) -> Vec<f64> {
        let k = self.trees.first().map_or(0, |t| t.n_classes);
        let mut votes = vec![0.0; k];
        for t in &self.trees {
            votes[t.predict_class(x)] += 1.0;
        }
        votes
    }
}

/// Each tree sees `n` instances drawn with replacement in proportion to the
/// weights and considers `floor(sqrt(dimension))` features per split.
pub(crate) fn train(view: &ClassView<'_>, n_trees: usize, seed_value: u64) -> Forest {
    let n = view.vectors.len();
    let m = ((view.dimension as f64).sqrt().floor() as usize).max(1);
    let uniform = vec![1.0 / n as f64; n];
    let sampler = WeightedIndex::new(view.weights).expect("weights sum to one");
    let params = TreeParams::unpruned();
    let trees = (0..n_trees)
        .map(|t| {
            let mut rng = seed::rng(seed::derive_seed(seed_value, t as u64));
            let draws: Vec<usize> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
            let boot = ClassView {
                vectors: view.vectors,
                classes: view.classes,
                weights: &uniform,
                n_classes: view.n_classes,
                dimension: view.dimension,
            };
            tree::grow_from(&boot, draws, &params, Some((m, &mut rng)))
        })
        .collect();
    Forest { trees }
}

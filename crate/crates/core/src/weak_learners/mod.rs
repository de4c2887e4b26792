//! Weak learners trained on weighted binary data.
//!
//! All five learners share one contract: [`train`] consumes a
//! [`WeightedBinaryDataset`] (targets in {-1, +1}, weights summing to one)
//! and yields an immutable [`BinaryModel`] whose [`BinaryModel::predict`]
//! returns a sign and a real-valued confidence. A score of exactly zero is
//! resolved to +1.
//!
//! Stump, tree, forest and naive Bayes consume instance weights natively.
//! The SVM consumes them through per-instance box constraints
//! `C_i = C * w_i * n`.

mod forest;
mod multiclass;
mod naive_bayes;
pub mod smo;
mod stump;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::SparseBinaryVector;
use crate::error::{Error, Result};

pub use forest::Forest;
pub use multiclass::{train_multiclass, ClassDataset, MulticlassModel};
pub use naive_bayes::NaiveBayes;
pub use smo::{train_smo, LinearSvm, SmoSolution};
pub use stump::Stump;
pub use tree::DecisionTree;

/// Resolves a real score to a sign; zero goes to +1.
pub fn sign_of(score: f64) -> i8 {
    if score >= 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WeakKind {
    #[serde(rename = "stump")]
    Stump,
    #[serde(rename = "tree")]
    Tree,
    #[serde(rename = "forest")]
    Forest,
    #[serde(rename = "nb")]
    NaiveBayes,
    #[serde(rename = "smo")]
    Smo,
}

impl WeakKind {
    pub const ALL: [WeakKind; 5] = [
        WeakKind::Stump,
        WeakKind::Tree,
        WeakKind::Forest,
        WeakKind::NaiveBayes,
        WeakKind::Smo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeakKind::Stump => "stump",
            WeakKind::Tree => "tree",
            WeakKind::Forest => "forest",
            WeakKind::NaiveBayes => "nb",
            WeakKind::Smo => "smo",
        }
    }

    /// Human-readable row title used in reports.
    pub fn title(self) -> &'static str {
        match self {
            WeakKind::Stump => "Decision Stump",
            WeakKind::Tree => "Decision Tree",
            WeakKind::Forest => "Random Forest",
            WeakKind::NaiveBayes => "Naive Bayes",
            WeakKind::Smo => "SMO",
        }
    }
}

impl fmt::Display for WeakKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeakKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stump" => Ok(WeakKind::Stump),
            "tree" => Ok(WeakKind::Tree),
            "forest" => Ok(WeakKind::Forest),
            "nb" | "naive_bayes" => Ok(WeakKind::NaiveBayes),
            "smo" => Ok(WeakKind::Smo),
            other => Err(Error::Config(format!("unknown weak learner {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    /// `None` grows until nodes are pure or unsplittable.
    pub max_depth: Option<usize>,
    /// Minimum (normalized) weight on each side of a split.
    pub min_leaf_weight: f64,
    /// Pessimistic-pruning confidence factor; `None` disables pruning.
    pub pruning_cf: Option<f64>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_leaf_weight: 1e-6,
            pruning_cf: Some(0.25),
        }
    }
}

impl TreeParams {
    pub fn unpruned() -> Self {
        TreeParams {
            pruning_cf: None,
            ..TreeParams::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_depth == Some(0) {
            return Err(Error::Config("tree max_depth must be >= 1".into()));
        }
        if !(self.min_leaf_weight >= 0.0 && self.min_leaf_weight < 1.0) {
            return Err(Error::Config("tree min_leaf_weight must lie in [0, 1)".into()));
        }
        if let Some(cf) = self.pruning_cf {
            if !(cf > 0.0 && cf <= 0.5) {
                return Err(Error::Config("tree pruning_cf must lie in (0, 0.5]".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NaiveBayesParams {
    pub laplace_alpha: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        NaiveBayesParams { laplace_alpha: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoParams {
    pub c: f64,
    pub tolerance: f64,
    /// Iteration budget, in multiples of the training-set size.
    pub max_passes: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        SmoParams {
            c: 1.0,
            tolerance: 1e-3,
            max_passes: 200,
        }
    }
}

impl SmoParams {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config("smo C must be positive".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config("smo tolerance must be positive".into()));
        }
        if self.max_passes == 0 {
            return Err(Error::Config("smo max_passes must be >= 1".into()));
        }
        Ok(())
    }
}

/// Weak learner choice plus hyperparameters for every kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakSpec {
    pub kind: WeakKind,
    #[serde(default)]
    pub tree: TreeParams,
    #[serde(default)]
    pub forest: ForestParams,
    #[serde(default)]
    pub naive_bayes: NaiveBayesParams,
    #[serde(default)]
    pub smo: SmoParams,
    #[serde(default)]
    pub seed: u64,
}

impl WeakSpec {
    pub fn new(kind: WeakKind) -> Self {
        WeakSpec {
            kind,
            tree: TreeParams::default(),
            forest: ForestParams::default(),
            naive_bayes: NaiveBayesParams::default(),
            smo: SmoParams::default(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            WeakKind::Stump => Ok(()),
            WeakKind::Tree => self.tree.validate(),
            WeakKind::Forest => {
                if self.forest.n_trees == 0 {
                    return Err(Error::Config("forest n_trees must be >= 1".into()));
                }
                Ok(())
            }
            WeakKind::NaiveBayes => {
                let a = self.naive_bayes.laplace_alpha;
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::Config("naive Bayes laplace_alpha must be positive".into()));
                }
                Ok(())
            }
            WeakKind::Smo => self.smo.validate(),
        }
    }
}

/// Binary training set with a probability distribution over instances.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBinaryDataset {
    vectors: Vec<SparseBinaryVector>,
    targets: Vec<i8>,
    weights: Vec<f64>,
    dimension: usize,
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Validation("weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

impl WeightedBinaryDataset {
    pub fn new(
        vectors: Vec<SparseBinaryVector>,
        targets: Vec<i8>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Validation("weighted dataset must be non-empty".into()));
        }
        if vectors.len() != targets.len() || vectors.len() != weights.len() {
            return Err(Error::Validation(
                "vectors, targets and weights must have equal lengths".into(),
            ));
        }
        if targets.iter().any(|&t| t != 1 && t != -1) {
            return Err(Error::Validation("targets must be -1 or +1".into()));
        }
        let dimension = vectors[0].dimension();
        if vectors.iter().any(|v| v.dimension() != dimension) {
            return Err(Error::Validation("all vectors must share one dimension".into()));
        }
        check_weights(&weights)?;
        Ok(WeightedBinaryDataset {
            vectors,
            targets,
            weights,
            dimension,
        })
    }

    /// Uniform weights `1/n`.
    pub fn uniform(vectors: Vec<SparseBinaryVector>, targets: Vec<i8>) -> Result<Self> {
        let n = vectors.len().max(1);
        let weights = vec![1.0 / n as f64; vectors.len()];
        WeightedBinaryDataset::new(vectors, targets, weights)
    }

    /// Replaces the weight distribution, keeping vectors and targets.
    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.vectors.len() {
            return Err(Error::Validation("weight vector length mismatch".into()));
        }
        check_weights(&weights)?;
        self.weights = weights;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vectors(&self) -> &[SparseBinaryVector] {
        &self.vectors
    }

    pub fn targets(&self) -> &[i8] {
        &self.targets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted mass of the +1 and -1 targets.
    pub fn class_mass(&self) -> (f64, f64) {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for (&t, &w) in self.targets.iter().zip(&self.weights) {
            if t > 0 {
                pos += w;
            } else {
                neg += w;
            }
        }
        (pos, neg)
    }

    /// The only target carried by positively weighted instances, if there is one.
    pub fn single_class(&self) -> Option<i8> {
        let mut seen: Option<i8> = None;
        for (&t, &w) in self.targets.iter().zip(&self.weights) {
            if w > 0.0 {
                match seen {
                    None => seen = Some(t),
                    Some(s) if s != t => return None,
                    _ => {}
                }
            }
        }
        seen
    }

    /// Class ids for the multiclass cores: +1 maps to class 0, -1 to class 1,
    /// so "lowest class id wins ties" resolves ties to +1.
    pub(crate) fn class_ids(&self) -> Vec<usize> {
        self.targets.iter().map(|&t| if t > 0 { 0 } else { 1 }).collect()
    }

    /// Weighted error of an arbitrary sign predictor.
    pub fn weighted_error<F: Fn(&SparseBinaryVector) -> i8>(&self, predict: F) -> f64 {
        self.vectors
            .iter()
            .zip(&self.targets)
            .zip(&self.weights)
            .filter(|((v, &t), _)| predict(v) != t)
            .map(|(_, &w)| w)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BinaryLearner {
    Constant { sign: i8 },
    Stump(Stump),
    Tree(DecisionTree),
    Forest(Forest),
    NaiveBayes(NaiveBayes),
    Smo(LinearSvm),
}

/// A trained binary classifier. Immutable; prediction is pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub dimension: usize,
    pub learner: BinaryLearner,
}

impl BinaryModel {
    pub fn constant(sign: i8, dimension: usize) -> Self {
        BinaryModel {
            dimension,
            learner: BinaryLearner::Constant { sign },
        }
    }

    /// `(sign, score)`: sign is the sign of score, with 0 mapped to +1.
    pub fn predict(&self, x: &SparseBinaryVector) -> Result<(i8, f64)> {
        if x.dimension() != self.dimension {
            return Err(Error::Argument(format!(
                "vector dimension {} does not match model dimension {}",
                x.dimension(),
                self.dimension
            )));
        }
        let score = self.score_unchecked(x);
        Ok((sign_of(score), score))
    }

    pub(crate) fn score_unchecked(&self, x: &SparseBinaryVector) -> f64 {
        match &self.learner {
            BinaryLearner::Constant { sign } => f64::from(*sign),
            BinaryLearner::Stump(s) => f64::from(s.predict(x)),
            BinaryLearner::Tree(t) => {
                let dist = t.distribution(x);
                if dist[0] >= dist[1] {
                    1.0
                } else {
                    -1.0
                }
            }
            BinaryLearner::Forest(f) => {
                let votes = f.votes(x);
                (votes[0] - votes[1]) / f.len() as f64
            }
            BinaryLearner::NaiveBayes(nb) => {
                let lp = nb.log_posteriors(x);
                lp[0] - lp[1]
            }
            BinaryLearner::Smo(svm) => svm.decision(x),
        }
    }

    pub(crate) fn sign_unchecked(&self, x: &SparseBinaryVector) -> i8 {
        sign_of(self.score_unchecked(x))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.learner, BinaryLearner::Constant { .. })
    }
}

/// Trains the weak learner selected by `spec`. Deterministic in `(spec, data)`.
pub fn train(spec: &WeakSpec, data: &WeightedBinaryDataset) -> Result<BinaryModel> {
    spec.validate()?;
    let dimension = data.dimension();
    if let Some(sign) = data.single_class() {
        return Ok(BinaryModel::constant(sign, dimension));
    }
    let learner = match spec.kind {
        WeakKind::Stump => match stump::train(data) {
            Some(s) => BinaryLearner::Stump(s),
            None => BinaryLearner::Constant {
                sign: majority_sign(data),
            },
        },
        WeakKind::Tree => {
            let classes = data.class_ids();
            let view = tree::ClassView {
                vectors: data.vectors(),
                classes: &classes,
                weights: data.weights(),
                n_classes: 2,
                dimension,
            };
            BinaryLearner::Tree(tree::grow(&view, &spec.tree, None))
        }
        WeakKind::Forest => {
            let classes = data.class_ids();
            let view = tree::ClassView {
                vectors: data.vectors(),
                classes: &classes,
                weights: data.weights(),
                n_classes: 2,
                dimension,
            };
            BinaryLearner::Forest(forest::train(&view, spec.forest.n_trees, spec.seed))
        }
        WeakKind::NaiveBayes => {
            let classes = data.class_ids();
            BinaryLearner::NaiveBayes(NaiveBayes::train(
                data.vectors(),
                &classes,
                data.weights(),
                2,
                dimension,
                spec.naive_bayes.laplace_alpha,
            ))
        }
        WeakKind::Smo => {
            let sol = smo::solve(data, &spec.smo, false)?;
            BinaryLearner::Smo(sol.model)
        }
    };
    Ok(BinaryModel { dimension, learner })
}

/// Weighted majority sign, ties to +1.
pub fn majority_sign(data: &WeightedBinaryDataset) -> i8 {
    let (pos, neg) = data.class_mass();
    if pos >= neg {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests;

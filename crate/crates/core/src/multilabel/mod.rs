//! Problem transformations and ensembles for multi-label data.
//!
//! - Binary Relevance: one binary model per label.
//! - Label Powerset: one multiclass model over the distinct training label sets.
//! - AdaBoost.MH: discrete boosting over `(instance, label)` pairs, reduced
//!   to a binary problem on label-augmented vectors.
//! - Bagging: bootstrap members (all BR or all LP) combined by label-wise voting.
//!
//! Ensembles can be truncated to a prefix of their rounds or members, which
//! is how iteration sweeps are evaluated without retraining.

mod adaboost;
mod bagging;
mod br;
mod lp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{LabelSet, LabelSpace, MultiLabelDataset, SparseBinaryVector};
use crate::error::{Error, Result};
use crate::weak_learners::WeakSpec;

pub use adaboost::{
    train_adaboost_mh, train_adaboost_mh_traced, AdaBoostMhModel, BoostRound, BoostTrace, StopReason,
    EPSILON_FLOOR,
};
pub use bagging::{train_bagging, BaggingMember, BaggingModel, BaggingOptions, BaseKind};
pub use br::{train_br, BrModel};
pub use lp::{train_lp, LpModel};

/// Predicted label set plus one real score per label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub labels: LabelSet,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Br,
    Lp,
    AdaboostMh,
    BaggingBr,
    BaggingLp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Br,
        Algorithm::Lp,
        Algorithm::AdaboostMh,
        Algorithm::BaggingBr,
        Algorithm::BaggingLp,
    ];

    /// Command-line spelling.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Br => "br",
            Algorithm::Lp => "lp",
            Algorithm::AdaboostMh => "adaboost-mh",
            Algorithm::BaggingBr => "bagging-br",
            Algorithm::BaggingLp => "bagging-lp",
        }
    }

    /// Report column heading.
    pub fn title(self) -> &'static str {
        match self {
            Algorithm::Br => "Baseline BR",
            Algorithm::Lp => "Baseline LP",
            Algorithm::AdaboostMh => "AdaBoost.MH",
            Algorithm::BaggingBr => "Bagging.ML(BR)",
            Algorithm::BaggingLp => "Bagging.ML(LP)",
        }
    }

    pub fn is_ensemble(self) -> bool {
        !matches!(self, Algorithm::Br | Algorithm::Lp)
    }

    /// The transformation an ensemble is compared against in margin reports.
    pub fn baseline(self) -> Option<Algorithm> {
        match self {
            Algorithm::AdaboostMh | Algorithm::BaggingBr => Some(Algorithm::Br),
            Algorithm::BaggingLp => Some(Algorithm::Lp),
            Algorithm::Br | Algorithm::Lp => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "br" => Ok(Algorithm::Br),
            "lp" => Ok(Algorithm::Lp),
            "adaboost-mh" => Ok(Algorithm::AdaboostMh),
            "bagging-br" => Ok(Algorithm::BaggingBr),
            "bagging-lp" => Ok(Algorithm::BaggingLp),
            _ => Err(Error::Config(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum MultiLabelModel {
    Br(BrModel),
    Lp(LpModel),
    AdaboostMh(AdaBoostMhModel),
    Bagging(BaggingModel),
}

impl MultiLabelModel {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            MultiLabelModel::Br(_) => Algorithm::Br,
            MultiLabelModel::Lp(_) => Algorithm::Lp,
            MultiLabelModel::AdaboostMh(_) => Algorithm::AdaboostMh,
            MultiLabelModel::Bagging(b) => match b.base {
                BaseKind::Br => Algorithm::BaggingBr,
                BaseKind::Lp => Algorithm::BaggingLp,
            },
        }
    }

    pub fn space(&self) -> &LabelSpace {
        match self {
            MultiLabelModel::Br(m) => &m.space,
            MultiLabelModel::Lp(m) => &m.space,
            MultiLabelModel::AdaboostMh(m) => &m.space,
            MultiLabelModel::Bagging(m) => &m.space,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            MultiLabelModel::Br(m) => m.dimension,
            MultiLabelModel::Lp(m) => m.dimension,
            MultiLabelModel::AdaboostMh(m) => m.dimension,
            MultiLabelModel::Bagging(m) => m.dimension,
        }
    }

    /// Rounds (boosting) or members (bagging); 1 for plain transformations.
    pub fn ensemble_size(&self) -> usize {
        match self {
            MultiLabelModel::Br(_) | MultiLabelModel::Lp(_) => 1,
            MultiLabelModel::AdaboostMh(m) => m.rounds.len(),
            MultiLabelModel::Bagging(m) => m.members.len(),
        }
    }

    /// The ensemble restricted to its first `k` rounds or members.
    pub fn truncated(&self, k: usize) -> Result<MultiLabelModel> {
        match self {
            MultiLabelModel::AdaboostMh(m) => Ok(MultiLabelModel::AdaboostMh(m.truncated(k)?)),
            MultiLabelModel::Bagging(m) => Ok(MultiLabelModel::Bagging(m.truncated(k)?)),
            other if k == 1 => Ok(other.clone()),
            _ => Err(Error::Argument("only ensembles can be truncated".into())),
        }
    }

    /// Predictions of every prefix ensemble (`k = 1..=ensemble_size()`),
    /// indexed `[k - 1][instance]`. Equivalent to predicting with
    /// [`MultiLabelModel::truncated`] for each `k`, without the copies.
    pub fn prefix_predictions(&self, xs: &[&SparseBinaryVector]) -> Result<Vec<Vec<LabelSet>>> {
        if let Some(x) = xs.iter().find(|x| x.dimension() != self.dimension()) {
            return Err(Error::Argument(format!(
                "vector dimension {} does not match model dimension {}",
                x.dimension(),
                self.dimension()
            )));
        }
        Ok(match self {
            MultiLabelModel::AdaboostMh(m) => m.prefix_predictions(xs),
            MultiLabelModel::Bagging(m) => m.prefix_predictions(xs),
            other => vec![xs.iter().map(|x| other.predict_unchecked(x).labels).collect()],
        })
    }

    pub fn predict(&self, x: &SparseBinaryVector) -> Result<PredictionSet> {
        if x.dimension() != self.dimension() {
            return Err(Error::Argument(format!(
                "vector dimension {} does not match model dimension {}",
                x.dimension(),
                self.dimension()
            )));
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &SparseBinaryVector) -> PredictionSet {
        match self {
            MultiLabelModel::Br(m) => m.predict_unchecked(x),
            MultiLabelModel::Lp(m) => m.predict_unchecked(x),
            MultiLabelModel::AdaboostMh(m) => m.predict_unchecked(x),
            MultiLabelModel::Bagging(m) => m.predict_unchecked(x),
        }
    }

    pub fn predict_all<'a, I>(&self, xs: I) -> Result<Vec<PredictionSet>>
    where
        I: IntoIterator<Item = &'a SparseBinaryVector>,
    {
        xs.into_iter().map(|x| self.predict(x)).collect()
    }

    /// Predicted label sets for every instance of `data`.
    pub fn predict_dataset(&self, data: &MultiLabelDataset) -> Result<Vec<LabelSet>> {
        data.instances()
            .iter()
            .map(|inst| self.predict(&inst.vector).map(|p| p.labels))
            .collect()
    }
}

/// Trains `algorithm` with `iterations` boosting rounds or bagging members.
/// The weak learner's randomness comes from `weak.seed`; bootstrap sampling
/// from `seed`.
pub fn train(
    algorithm: Algorithm,
    data: &MultiLabelDataset,
    weak: &WeakSpec,
    iterations: usize,
    seed: u64,
) -> Result<MultiLabelModel> {
    Ok(match algorithm {
        Algorithm::Br => MultiLabelModel::Br(train_br(data, weak)?),
        Algorithm::Lp => MultiLabelModel::Lp(train_lp(data, weak)?),
        Algorithm::AdaboostMh => MultiLabelModel::AdaboostMh(train_adaboost_mh(data, weak, iterations)?),
        Algorithm::BaggingBr => MultiLabelModel::Bagging(train_bagging(
            data,
            BaseKind::Br,
            weak,
            iterations,
            seed,
            &BaggingOptions::default(),
        )?),
        Algorithm::BaggingLp => MultiLabelModel::Bagging(train_bagging(
            data,
            BaseKind::Lp,
            weak,
            iterations,
            seed,
            &BaggingOptions::default(),
        )?),
    })
}

fn require_instances(data: &MultiLabelDataset) -> Result<()> {
    if data.n() == 0 {
        return Err(Error::Validation("training set is empty".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{require_instances, train_br, train_lp, BrModel, LpModel, PredictionSet};
use crate::corpus::{LabelSet, LabelSpace, MultiLabelDataset, SparseBinaryVector};
use crate::error::{Error, Result};
use crate::seed::{self, derive_seed};
use crate::weak_learners::WeakSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Br,
    Lp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "base", rename_all = "snake_case")]
pub enum BaggingMember {
    Br(BrModel),
    Lp(LpModel),
}

impl BaggingMember {
    fn predict_unchecked(&self, x: &SparseBinaryVector) -> PredictionSet {
        match self {
            BaggingMember::Br(m) => m.predict_unchecked(x),
            BaggingMember::Lp(m) => m.predict_unchecked(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggingOptions {
    /// A label is predicted when at least this fraction of members predict it.
    pub vote_threshold: f64,
    /// Train every member on the full training set.
    pub disable_bootstrap: bool,
}

impl Default for BaggingOptions {
    fn default() -> Self {
        BaggingOptions {
            vote_threshold: 0.5,
            disable_bootstrap: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggingModel {
    pub space: LabelSpace,
    pub dimension: usize,
    pub base: BaseKind,
    pub vote_threshold: f64,
    pub members: Vec<BaggingMember>,
}

/// Member `k` is trained on `N` draws with replacement from an RNG seeded by
/// `derive_seed(seed, k)`. All members share the weak spec, so with the
/// bootstrap disabled they are identical.
pub fn train_bagging(
    data: &MultiLabelDataset,
    base: BaseKind,
    weak: &WeakSpec,
    members: usize,
    seed: u64,
    options: &BaggingOptions,
) -> Result<BaggingModel> {
    if members < 1 {
        return Err(Error::Argument("bagging needs at least one member".into()));
    }
    if !(options.vote_threshold > 0.0 && options.vote_threshold <= 1.0) {
        return Err(Error::Config("bagging vote_threshold must lie in (0, 1]".into()));
    }
    require_instances(data)?;
    let n = data.n();
    let trained = (0..members)
        .map(|k| {
            let sample;
            let train = if options.disable_bootstrap {
                data
            } else {
                let mut rng = seed::rng(derive_seed(seed, k as u64));
                let draws: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                sample = data.subset(&draws);
                &sample
            };
            Ok(match base {
                BaseKind::Br => BaggingMember::Br(train_br(train, weak)?),
                BaseKind::Lp => BaggingMember::Lp(train_lp(train, weak)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaggingModel {
        space: data.space().clone(),
        dimension: data.dimension(),
        base,
        vote_threshold: options.vote_threshold,
        members: trained,
    })
}

impl BaggingModel {
    /// Per-label vote fractions; label `l` is predicted iff its fraction is
    /// at least the threshold.
    pub(crate) fn predict_unchecked(&self, x: &SparseBinaryVector) -> PredictionSet {
        let q = self.space.len();
        let mut votes = vec![0usize; q];
        for m in &self.members {
            for l in m.predict_unchecked(x).labels.iter() {
                votes[l] += 1;
            }
        }
        let m = self.members.len() as f64;
        let scores: Vec<f64> = votes.iter().map(|&v| v as f64 / m).collect();
        let labels = scores
            .iter()
            .enumerate()
            .filter(|(_, &s)| s >= self.vote_threshold)
            .map(|(l, _)| l)
            .collect::<LabelSet>();
        PredictionSet { labels, scores }
    }

    /// Predicted sets of every prefix ensemble: entry `k - 1` holds the
    /// predictions of the first `k` members for each input.
    pub(crate) fn prefix_predictions(&self, xs: &[&SparseBinaryVector]) -> Vec<Vec<LabelSet>> {
        let q = self.space.len();
        let mut out = vec![Vec::with_capacity(xs.len()); self.members.len()];
        for x in xs {
            let mut votes = vec![0usize; q];
            for (k, m) in self.members.iter().enumerate() {
                for l in m.predict_unchecked(x).labels.iter() {
                    votes[l] += 1;
                }
                let size = (k + 1) as f64;
                out[k].push(
                    (0..q)
                        .filter(|&l| votes[l] as f64 / size >= self.vote_threshold)
                        .collect(),
                );
            }
        }
        out
    }

    pub fn truncated(&self, k: usize) -> Result<BaggingModel> {
        if k == 0 || k > self.members.len() {
            return Err(Error::Argument(format!(
                "cannot keep {k} of {} bagging members",
                self.members.len()
            )));
        }
        Ok(BaggingModel {
            space: self.space.clone(),
            dimension: self.dimension,
            base: self.base,
            vote_threshold: self.vote_threshold,
            members: self.members[..k].to_vec(),
        })
    }
}

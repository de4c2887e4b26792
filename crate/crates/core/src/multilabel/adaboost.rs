use serde::{Deserialize, Serialize};

use super::{require_instances, PredictionSet};
use crate::corpus::{LabelSet, LabelSpace, MultiLabelDataset, SparseBinaryVector};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::weak_learners::{self, BinaryModel, WeakSpec, WeightedBinaryDataset};

/// Lower clamp on the weighted error; the upper clamp is `0.5 - EPSILON_FLOOR`.
pub const EPSILON_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostRound {
    pub t: usize,
    pub weak: BinaryModel,
    /// Raw weighted error over the pair distribution.
    pub epsilon: f64,
    pub alpha: f64,
    pub z: f64,
}

impl BoostRound {
    /// `alpha = ln((1 - e) / e) / 2` and `Z = 2 sqrt(e (1 - e))` on the clamped error.
    pub fn coefficients(epsilon: f64) -> (f64, f64) {
        let e = epsilon.clamp(EPSILON_FLOOR, 0.5 - EPSILON_FLOOR);
        (0.5 * ((1.0 - e) / e).ln(), 2.0 * (e * (1.0 - e)).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StopReason {
    /// The weak hypothesis of round `round` had zero error; it was kept.
    PerfectRound { round: usize },
    /// Round `round` had error >= 0.5 and was discarded.
    WeakRound { round: usize },
    /// The very first round had error >= 0.5; a single constant
    /// majority-sign round replaces it.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostMhModel {
    pub space: LabelSpace,
    pub dimension: usize,
    pub rounds: Vec<BoostRound>,
    pub requested_rounds: usize,
    pub stop: Option<StopReason>,
}

/// Pair distributions and per-round correctness, for checking the update law.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoostTrace {
    /// `D_t` before each recorded round, then the distribution after the last.
    pub distributions: Vec<Vec<f64>>,
    /// Whether round `t` classified each pair correctly.
    pub correct: Vec<Vec<bool>>,
}

/// `D(i, l) *= exp(-alpha)` on correct pairs, `exp(alpha)` otherwise, then renormalize.
fn reweight(dist: &mut [f64], correct: &[bool], alpha: f64) {
    for (w, &c) in dist.iter_mut().zip(correct) {
        *w *= if c { (-alpha).exp() } else { alpha.exp() };
    }
    let total: f64 = dist.iter().sum();
    dist.iter_mut().for_each(|w| *w /= total);
}

pub fn train_adaboost_mh(data: &MultiLabelDataset, weak: &WeakSpec, rounds: usize) -> Result<AdaBoostMhModel> {
    train_adaboost_mh_traced(data, weak, rounds).map(|(m, _)| m)
}

/// Boosting over the `N * Q` pairs `(x_i augmented with label l, +1 iff l in y_i)`.
pub fn train_adaboost_mh_traced(
    data: &MultiLabelDataset,
    weak: &WeakSpec,
    rounds: usize,
) -> Result<(AdaBoostMhModel, BoostTrace)> {
    if rounds < 1 {
        return Err(Error::Argument("AdaBoost.MH needs at least one round".into()));
    }
    require_instances(data)?;
    weak.validate()?;
    let q = data.q();
    let pairs = data.n() * q;
    let mut vectors = Vec::with_capacity(pairs);
    let mut targets = Vec::with_capacity(pairs);
    for inst in data.instances() {
        for l in 0..q {
            vectors.push(inst.vector.with_block_feature(q, l));
            targets.push(if inst.labels.contains(l) { 1i8 } else { -1 });
        }
    }
    let mut dist = vec![1.0 / pairs as f64; pairs];
    let mut binary = WeightedBinaryDataset::new(vectors, targets, dist.clone())?;
    let mut trace = BoostTrace::default();
    let mut kept: Vec<BoostRound> = Vec::new();
    let mut stop = None;

    for t in 0..rounds {
        binary.set_weights(dist.clone())?;
        let spec = weak.clone().with_seed(derive_seed(weak.seed, t as u64));
        let h = weak_learners::train(&spec, &binary)?;
        let correct: Vec<bool> = binary
            .vectors()
            .iter()
            .zip(binary.targets())
            .map(|(v, &y)| h.sign_unchecked(v) == y)
            .collect();
        let epsilon: f64 = dist.iter().zip(&correct).filter(|(_, &c)| !c).map(|(w, _)| w).sum();
        if epsilon >= 0.5 {
            stop = Some(StopReason::WeakRound { round: t });
            break;
        }
        let (alpha, z) = BoostRound::coefficients(epsilon);
        trace.distributions.push(dist.clone());
        reweight(&mut dist, &correct, alpha);
        trace.correct.push(correct);
        kept.push(BoostRound {
            t,
            weak: h,
            epsilon,
            alpha,
            z,
        });
        if epsilon == 0.0 {
            stop = Some(StopReason::PerfectRound { round: t });
            break;
        }
    }

    if kept.is_empty() {
        // Constant predictor over pairs under the initial distribution.
        binary.set_weights(dist.clone())?;
        let sign = weak_learners::majority_sign(&binary);
        let h = BinaryModel::constant(sign, data.dimension() + q);
        let correct: Vec<bool> = binary.targets().iter().map(|&y| y == sign).collect();
        let epsilon: f64 = dist.iter().zip(&correct).filter(|(_, &c)| !c).map(|(w, _)| w).sum();
        let (alpha, z) = BoostRound::coefficients(epsilon);
        trace.distributions.push(dist.clone());
        reweight(&mut dist, &correct, alpha);
        trace.correct.push(correct);
        kept.push(BoostRound {
            t: 0,
            weak: h,
            epsilon,
            alpha,
            z,
        });
        stop = Some(StopReason::Fallback);
    }
    trace.distributions.push(dist);

    Ok((
        AdaBoostMhModel {
            space: data.space().clone(),
            dimension: data.dimension(),
            rounds: kept,
            requested_rounds: rounds,
            stop,
        },
        trace,
    ))
}

impl AdaBoostMhModel {
    /// `F(x, l) = sum_t alpha_t h_t(x augmented with l)`.
    pub fn label_scores(&self, x: &SparseBinaryVector) -> Vec<f64> {
        let q = self.space.len();
        (0..q)
            .map(|l| {
                let aug = x.with_block_feature(q, l);
                self.rounds
                    .iter()
                    .map(|r| r.alpha * f64::from(r.weak.sign_unchecked(&aug)))
                    .sum()
            })
            .collect()
    }

    /// Labels with strictly positive score; a score of exactly 0 is excluded.
    pub(crate) fn predict_unchecked(&self, x: &SparseBinaryVector) -> PredictionSet {
        let scores = self.label_scores(x);
        let labels = scores
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0.0)
            .map(|(l, _)| l)
            .collect::<LabelSet>();
        PredictionSet { labels, scores }
    }

    /// `prod_t Z_t`, the bound on training hamming loss.
    pub fn z_product(&self) -> f64 {
        self.rounds.iter().map(|r| r.z).product()
    }

    /// Predicted sets of every prefix ensemble: entry `k - 1` holds the
    /// predictions of the first `k` rounds for each input.
    pub(crate) fn prefix_predictions(&self, xs: &[&SparseBinaryVector]) -> Vec<Vec<LabelSet>> {
        let q = self.space.len();
        let mut out = vec![Vec::with_capacity(xs.len()); self.rounds.len()];
        for x in xs {
            let mut f = vec![0.0f64; q];
            let augmented: Vec<SparseBinaryVector> = (0..q).map(|l| x.with_block_feature(q, l)).collect();
            for (k, r) in self.rounds.iter().enumerate() {
                for (fl, aug) in f.iter_mut().zip(&augmented) {
                    *fl += r.alpha * f64::from(r.weak.sign_unchecked(aug));
                }
                out[k].push((0..q).filter(|&l| f[l] > 0.0).collect());
            }
        }
        out
    }

    pub fn truncated(&self, k: usize) -> Result<AdaBoostMhModel> {
        if k == 0 || k > self.rounds.len() {
            return Err(Error::Argument(format!(
                "cannot keep {k} of {} boosting rounds",
                self.rounds.len()
            )));
        }
        Ok(AdaBoostMhModel {
            rounds: self.rounds[..k].to_vec(),
            ..self.clone()
        })
    }
}

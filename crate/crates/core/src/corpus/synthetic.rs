//! Synthetic imbalanced multi-label corpus generator.
//!
//! Label sets are drawn from a frequency-weighted urn holding
//! `per_label_count[l]` tokens for each label `l`, so the realized label
//! frequencies equal the profile exactly. Each label owns a private set of
//! signature words; document text mixes the signature words of its labels
//! with shared noise words.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Corpus, Document, LabelSet, LabelSpace};
use crate::error::{Error, Result};
use crate::seed::{self, Rng};

/// Size of the shared noise vocabulary.
pub const NOISE_VOCABULARY_SIZE: usize = 400;

const MIN_SIGNATURE_TOKENS: usize = 3;
const MAX_SIGNATURE_TOKENS: usize = 8;
const URN_RETRIES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImbalanceProfile {
    /// Target frequency of each label.
    pub per_label_count: Vec<usize>,
    /// `cardinality_distribution[k - 1]` is the probability of a label set of size `k`.
    pub cardinality_distribution: Vec<f64>,
    /// Signature vocabulary size per label.
    pub tokens_per_label: usize,
    /// Fraction of emitted tokens replaced by noise words, in `[0, 1)`.
    pub noise_token_rate: f64,
}

/// Per-label counts of the complaint corpus profile: 70 labels, 7231
/// label assignments, largest 1304, smallest 1, 15 labels above the mean.
const LAPOR_COUNTS: [usize; 70] = [
    1304, 820, 610, 480, 390, 330, 280, 240, 210, 185, 165, 148, 135, 122, 110, //
    103, 101, 94, 88, 82, 77, 72, 67, 63, 59, 55, 52, 49, 46, 43, 40, 38, 36, 34, 32, 30, 29,
    27, 26, 25, 23, 22, 21, 20, 19, 19, 18, 17, 16, 15, 14, 14, 13, 13, 12, 12, 12, 10, 9, 8,
    7, 6, 4, 3, 2, 1, 1, 1, 1, 1,
];

impl ImbalanceProfile {
    /// Profile modelled on a 5151-document government complaint corpus.
    pub fn lapor() -> Self {
        ImbalanceProfile {
            per_label_count: LAPOR_COUNTS.to_vec(),
            cardinality_distribution: vec![0.65, 0.30, 0.05],
            tokens_per_label: 20,
            noise_token_rate: 0.3,
        }
    }

    /// Small 12-label profile with a 100:1 imbalance ratio, sized for ~1500 documents.
    pub fn desk() -> Self {
        ImbalanceProfile {
            per_label_count: vec![600, 380, 240, 160, 110, 75, 50, 34, 22, 14, 9, 6],
            cardinality_distribution: vec![0.85, 0.13, 0.02],
            tokens_per_label: 12,
            noise_token_rate: 0.3,
        }
    }

    pub fn q(&self) -> usize {
        self.per_label_count.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.per_label_count.is_empty() {
            return Err(Error::Config("profile needs at least one label".into()));
        }
        if self.per_label_count.contains(&0) {
            return Err(Error::Config("per-label counts must be >= 1".into()));
        }
        if self.cardinality_distribution.is_empty()
            || self
                .cardinality_distribution
                .iter()
                .any(|p| !p.is_finite() || *p < 0.0)
        {
            return Err(Error::Config(
                "cardinality distribution must be a non-empty list of probabilities".into(),
            ));
        }
        let total: f64 = self.cardinality_distribution.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "cardinality probabilities sum to {total}, expected 1"
            )));
        }
        if self.tokens_per_label == 0 {
            return Err(Error::Config("tokens_per_label must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.noise_token_rate) {
            return Err(Error::Config("noise_token_rate must lie in [0, 1)".into()));
        }
        Ok(())
    }

    pub fn label_names(&self) -> Vec<String> {
        let width = self.q().saturating_sub(1).to_string().len().max(2);
        (0..self.q()).map(|l| format!("label{l:0width$}")).collect()
    }

    pub fn signature_token(&self, label: usize, j: usize) -> String {
        format!("t{label}x{j}")
    }
}

fn noise_token(j: usize) -> String {
    format!("n{j:03}")
}

/// Gale–Ryser test: does a 0/1 label-assignment matrix with the given
/// label totals and document cardinalities exist?
///
/// `card_hist[k]` is the number of documents still needing exactly `k` labels.
fn assignable(label_counts: &[usize], card_hist: &[usize]) -> bool {
    let rows: usize = card_hist.iter().enumerate().map(|(k, &n)| k * n).sum();
    let cols: usize = label_counts.iter().sum();
    if rows != cols {
        return false;
    }
    let mut sorted = label_counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut prefix = 0usize;
    for (k0, &c) in sorted.iter().enumerate() {
        let k = k0 + 1;
        prefix += c;
        let capacity: usize = card_hist
            .iter()
            .enumerate()
            .map(|(card, &n)| card.min(k) * n)
            .sum();
        if prefix > capacity {
            return false;
        }
    }
    true
}

/// Draws `k` distinct labels, each proportional to its remaining urn tokens.
fn draw_from_urn(remaining: &[usize], k: usize, rng: &mut Rng) -> Option<Vec<usize>> {
    let mut weights: Vec<usize> = remaining.to_vec();
    let mut picked = Vec::with_capacity(k);
    for _ in 0..k {
        let dist = WeightedIndex::new(&weights).ok()?;
        let l = dist.sample(rng);
        picked.push(l);
        weights[l] = 0;
    }
    Some(picked)
}

fn draw_cardinalities(profile: &ImbalanceProfile, n: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    let q = profile.q();
    let target: usize = profile.per_label_count.iter().sum();
    let dist = WeightedIndex::new(&profile.cardinality_distribution)
        .map_err(|e| Error::Config(format!("cardinality distribution: {e}")))?;
    let mut cards: Vec<usize> = (0..n).map(|_| (dist.sample(rng) + 1).min(q)).collect();

    // Nudge random documents until the cardinalities absorb every urn token.
    let mut cap = profile.cardinality_distribution.len().min(q);
    let mut sum: usize = cards.iter().sum();
    while sum < target {
        let open: Vec<usize> = (0..n).filter(|&i| cards[i] < cap).collect();
        if open.is_empty() {
            if cap == q {
                break;
            }
            cap = q;
            continue;
        }
        cards[open[rng.gen_range(0..open.len())]] += 1;
        sum += 1;
    }
    while sum > target {
        let open: Vec<usize> = (0..n).filter(|&i| cards[i] > 1).collect();
        cards[open[rng.gen_range(0..open.len())]] -= 1;
        sum -= 1;
    }
    Ok(cards)
}

/// Generates `total_instances` documents whose label frequencies equal
/// `profile.per_label_count` exactly.
pub fn generate_synthetic(profile: &ImbalanceProfile, total_instances: usize, seed: u64) -> Result<Corpus> {
    profile.validate()?;
    let q = profile.q();
    if total_instances < q {
        return Err(Error::Argument(format!(
            "total_instances ({total_instances}) must be at least the number of labels ({q})"
        )));
    }
    let urn_total: usize = profile.per_label_count.iter().sum();
    if urn_total < total_instances {
        return Err(Error::Generation(format!(
            "urn exhausted: {urn_total} label tokens cannot give each of {total_instances} documents a label"
        )));
    }
    if urn_total > total_instances * q {
        return Err(Error::Generation(format!(
            "{urn_total} label tokens do not fit into {total_instances} documents of at most {q} labels"
        )));
    }

    let mut rng = seed::rng(seed);
    let cards = draw_cardinalities(profile, total_instances, &mut rng)?;
    let mut hist = vec![0usize; q + 1];
    for &k in &cards {
        hist[k] += 1;
    }
    let mut remaining = profile.per_label_count.clone();
    if !assignable(&remaining, &hist) {
        return Err(Error::Generation(
            "label counts cannot be realized by any assignment (a label is more frequent than the documents allow)"
                .into(),
        ));
    }

    let mut label_sets = Vec::with_capacity(total_instances);
    for &k in &cards {
        hist[k] -= 1;
        let mut chosen = None;
        for _ in 0..URN_RETRIES {
            let Some(pick) = draw_from_urn(&remaining, k, &mut rng) else {
                break;
            };
            let mut trial = remaining.clone();
            for &l in &pick {
                trial[l] -= 1;
            }
            if assignable(&trial, &hist) {
                chosen = Some(pick);
                break;
            }
        }
        // The k fullest labels always keep a feasible assignment feasible.
        let pick = chosen.unwrap_or_else(|| {
            let mut order: Vec<usize> = (0..q).collect();
            order.sort_by(|&a, &b| remaining[b].cmp(&remaining[a]).then(a.cmp(&b)));
            order.truncate(k);
            order
        });
        for &l in &pick {
            if remaining[l] == 0 {
                return Err(Error::Generation("urn exhausted".into()));
            }
            remaining[l] -= 1;
        }
        label_sets.push(LabelSet::from_ids(pick));
    }
    debug_assert!(remaining.iter().all(|&r| r == 0));

    let width = total_instances.saturating_sub(1).to_string().len();
    let documents = label_sets
        .into_iter()
        .enumerate()
        .map(|(i, labels)| {
            let text = synth_text(profile, &labels, &mut rng);
            Document {
                id: format!("doc{i:0width$}"),
                text,
                labels,
            }
        })
        .collect();
    let space = LabelSpace::new(profile.label_names())?;
    Ok(Corpus { documents, space })
}

fn synth_text(profile: &ImbalanceProfile, labels: &LabelSet, rng: &mut Rng) -> String {
    let mut tokens = Vec::new();
    for l in labels.iter() {
        let count = rng.gen_range(MIN_SIGNATURE_TOKENS..=MAX_SIGNATURE_TOKENS);
        for _ in 0..count {
            let j = rng.gen_range(0..profile.tokens_per_label);
            tokens.push(profile.signature_token(l, j));
        }
    }
    for tok in tokens.iter_mut() {
        if rng.gen_bool(profile.noise_token_rate) {
            *tok = noise_token(rng.gen_range(0..NOISE_VOCABULARY_SIZE));
        }
    }
    tokens.shuffle(rng);
    tokens.join(" ")
}

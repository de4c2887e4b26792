//! Information-gain scoring and top-K feature selection.
//!
//! Each feature is scored against every label's binary membership variable;
//! the feature's score is the largest of those per-label gains (in bits).

use serde::{Deserialize, Serialize};

use crate::corpus::{Instance, MultiLabelDataset, SparseBinaryVector};
use crate::error::{Error, Result};

/// Binary entropy in bits of a `pos / total` split, with `0 log 0 = 0`.
pub(crate) fn binary_entropy(pos: f64, total: f64) -> f64 {
    if total <= 0.0 || pos <= 0.0 || pos >= total {
        return 0.0;
    }
    let p = pos / total;
    let q = (total - pos) / total;
    -(p * p.log2()) - q * q.log2()
}

/// Gain of a binary feature for one binary label, from the 2x2 counts.
///
/// `n` instances, `label_count` carry the label, `present` contain the
/// feature and `both` contain the feature and carry the label.
fn gain_from_counts(n: usize, label_count: usize, present: usize, both: usize) -> f64 {
    let n_f = n as f64;
    let absent = n - present;
    let h = binary_entropy(label_count as f64, n_f);
    let h_present = binary_entropy(both as f64, present as f64);
    let h_absent = binary_entropy((label_count - both) as f64, absent as f64);
    let ig = h - (present as f64 / n_f) * h_present - (absent as f64 / n_f) * h_absent;
    ig.max(0.0)
}

/// Score of a single feature: max over labels of the per-label gain.
pub fn information_gain(dataset: &MultiLabelDataset, feature: usize) -> f64 {
    let n = dataset.n();
    let q = dataset.q();
    if n == 0 {
        return 0.0;
    }
    let mut label_count = vec![0usize; q];
    let mut both = vec![0usize; q];
    let mut present = 0usize;
    for inst in dataset.instances() {
        let has = inst.vector.contains(feature);
        present += has as usize;
        for l in inst.labels.iter() {
            label_count[l] += 1;
            if has {
                both[l] += 1;
            }
        }
    }
    (0..q)
        .map(|l| gain_from_counts(n, label_count[l], present, both[l]))
        .fold(0.0, f64::max)
}

/// Scores of every feature in one sparse pass.
pub fn information_gains(dataset: &MultiLabelDataset) -> Vec<f64> {
    let n = dataset.n();
    let q = dataset.q();
    let dim = dataset.dimension();
    if n == 0 {
        return vec![0.0; dim];
    }
    let mut label_count = vec![0usize; q];
    let mut present = vec![0usize; dim];
    let mut both = vec![0usize; dim * q];
    for inst in dataset.instances() {
        for l in inst.labels.iter() {
            label_count[l] += 1;
        }
        for &f in inst.vector.indices() {
            present[f] += 1;
            let row = &mut both[f * q..(f + 1) * q];
            for l in inst.labels.iter() {
                row[l] += 1;
            }
        }
    }
    (0..dim)
        .map(|f| {
            (0..q)
                .map(|l| gain_from_counts(n, label_count[l], present[f], both[f * q + l]))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Outcome of top-K selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelection {
    /// Kept original feature indices, ascending.
    pub selected: Vec<usize>,
    /// Score of each kept feature, aligned with `selected`.
    pub scores: Vec<f64>,
    pub original_dimension: usize,
}

impl FeatureSelection {
    pub fn dimension(&self) -> usize {
        self.selected.len()
    }

    /// New index of an original feature, if it was kept.
    pub fn reindex(&self, original: usize) -> Option<usize> {
        self.selected.binary_search(&original).ok()
    }

    pub fn reduce_vector(&self, v: &SparseBinaryVector) -> SparseBinaryVector {
        let indices: Vec<usize> = v.indices().iter().filter_map(|&i| self.reindex(i)).collect();
        SparseBinaryVector::new(indices, self.dimension()).expect("reindexing preserves order")
    }

    pub fn reduce(&self, dataset: &MultiLabelDataset) -> MultiLabelDataset {
        let instances = dataset
            .instances()
            .iter()
            .map(|inst| Instance {
                vector: self.reduce_vector(&inst.vector),
                labels: inst.labels.clone(),
            })
            .collect();
        MultiLabelDataset::new(dataset.space().clone(), self.dimension(), instances)
            .expect("reduced dataset keeps labels and shares one dimension")
    }
}

/// Keeps the `k` highest-scoring features; equal scores prefer the lower index.
pub fn select_features(
    dataset: &MultiLabelDataset,
    k: usize,
) -> Result<(FeatureSelection, MultiLabelDataset)> {
    let dim = dataset.dimension();
    if k == 0 || k > dim {
        return Err(Error::Argument(format!(
            "feature count must satisfy 1 <= K <= dimension (K = {k}, dimension = {dim})"
        )));
    }
    let scores = information_gains(dataset);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    let selection = FeatureSelection {
        scores: order.iter().map(|&f| scores[f]).collect(),
        selected: order,
        original_dimension: dim,
    };
    let reduced = selection.reduce(dataset);
    Ok((selection, reduced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LabelSet, LabelSpace};
    use proptest::prelude::*;

    fn dataset(q: usize, dim: usize, rows: &[(&[usize], &[usize])]) -> MultiLabelDataset {
        let instances = rows
            .iter()
            .map(|(idx, labels)| Instance {
                vector: SparseBinaryVector::new(idx.to_vec(), dim).unwrap(),
                labels: LabelSet::from_ids(labels.iter().copied()),
            })
            .collect();
        MultiLabelDataset::new(LabelSpace::numbered(q).unwrap(), dim, instances).unwrap()
    }

    /// Mutual information of the 2x2 joint table, straight from the definition.
    fn mi_oracle(d: &MultiLabelDataset, f: usize) -> f64 {
        let n = d.n() as f64;
        let mut best: f64 = 0.0;
        for l in 0..d.q() {
            let mut table = [[0.0f64; 2]; 2];
            for inst in d.instances() {
                table[inst.vector.contains(f) as usize][inst.labels.contains(l) as usize] += 1.0;
            }
            let mut mi = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let joint = table[a][b] / n;
                    if joint > 0.0 {
                        let pa = (table[a][0] + table[a][1]) / n;
                        let pb = (table[0][b] + table[1][b]) / n;
                        mi += joint * (joint / (pa * pb)).log2();
                    }
                }
            }
            best = best.max(mi);
        }
        best
    }

    #[test]
    fn aligned_feature_scores_one_bit() {
        let d = dataset(1, 2, &[(&[0], &[0]), (&[0], &[0]), (&[1], &[]), (&[], &[])]);
        assert_eq!(information_gain(&d, 0), 1.0);
        assert_eq!(information_gains(&d)[0], 1.0);
    }

    #[test]
    fn constant_feature_scores_zero() {
        let d = dataset(2, 2, &[(&[0], &[0]), (&[0], &[1]), (&[0, 1], &[]), (&[0], &[0, 1])]);
        assert_eq!(information_gain(&d, 0), 0.0);
        assert_eq!(information_gains(&d)[0], 0.0);
    }

    #[test]
    fn six_instance_oracle() {
        let d = dataset(
            2,
            3,
            &[
                (&[0, 2], &[0]),
                (&[1], &[1]),
                (&[0], &[0, 1]),
                (&[2], &[]),
                (&[0, 1, 2], &[1]),
                (&[], &[0]),
            ],
        );
        let all = information_gains(&d);
        for f in 0..3 {
            assert!((information_gain(&d, f) - mi_oracle(&d, f)).abs() <= 1e-12);
            assert_eq!(all[f], information_gain(&d, f));
        }
    }

    #[test]
    fn identity_selection_when_k_equals_dimension() {
        let d = dataset(1, 5, &[(&[0, 3], &[0]), (&[1, 4], &[]), (&[2], &[0])]);
        let (sel, reduced) = select_features(&d, 5).unwrap();
        assert_eq!(sel.selected, vec![0, 1, 2, 3, 4]);
        assert_eq!(reduced, d);
    }

    #[test]
    fn ties_prefer_lower_index() {
        // Features 0 and 1 are identical columns.
        let d = dataset(1, 2, &[(&[0, 1], &[0]), (&[], &[])]);
        let (sel, _) = select_features(&d, 1).unwrap();
        assert_eq!(sel.selected, vec![0]);
    }

    #[test]
    fn perfectly_predictive_feature_wins() {
        let d = dataset(
            1,
            3,
            &[
                (&[0, 2], &[]),
                (&[1, 2], &[0]),
                (&[0], &[]),
                (&[0, 1], &[0]),
                (&[1, 2], &[0]),
                (&[0, 2], &[]),
            ],
        );
        let (sel, reduced) = select_features(&d, 1).unwrap();
        assert_eq!(sel.selected, vec![1]);
        assert_eq!(reduced.dimension(), 1);
        assert_eq!(reduced.instances()[1].vector.indices(), &[0]);
    }

    #[test]
    fn k_larger_than_dimension_is_rejected() {
        let d = dataset(1, 2, &[(&[0], &[0])]);
        assert!(matches!(select_features(&d, 3), Err(Error::Argument(_))));
        assert!(matches!(select_features(&d, 0), Err(Error::Argument(_))));
    }

    fn arb_dataset() -> impl Strategy<Value = MultiLabelDataset> {
        (1usize..4, 1usize..8).prop_flat_map(|(q, dim)| {
            prop::collection::vec(
                (
                    prop::collection::btree_set(0..dim, 0..=dim),
                    prop::collection::btree_set(0..q, 0..=q),
                ),
                1..=32,
            )
            .prop_map(move |rows| {
                let instances = rows
                    .into_iter()
                    .map(|(idx, labels)| Instance {
                        vector: SparseBinaryVector::new(idx.into_iter().collect(), dim).unwrap(),
                        labels: LabelSet::from_ids(labels),
                    })
                    .collect();
                MultiLabelDataset::new(LabelSpace::numbered(q).unwrap(), dim, instances).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn matches_mutual_information_oracle(d in arb_dataset()) {
            let all = information_gains(&d);
            for f in 0..d.dimension() {
                prop_assert!((all[f] - mi_oracle(&d, f)).abs() <= 1e-12);
                prop_assert!((0.0..=1.0).contains(&all[f]));
            }
        }

        #[test]
        fn selection_is_monotone(d in arb_dataset(), k in 1usize..8) {
            let k = k.min(d.dimension());
            let (sel, _) = select_features(&d, k).unwrap();
            let all = information_gains(&d);
            let min_kept = sel.scores.iter().copied().fold(f64::INFINITY, f64::min);
            for f in 0..d.dimension() {
                if sel.reindex(f).is_none() {
                    prop_assert!(all[f] <= min_kept);
                }
            }
        }
    }
}

//! Corpus data model: label spaces, label sets, documents, sparse binary
//! datasets, train/test splitting and label-frequency statistics.

mod csv_io;
mod sparse_io;
mod synthetic;

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub use csv_io::{load_documents, read_documents, write_documents, Corpus};
pub use sparse_io::{load_sparse, read_sparse, save_sparse, write_sparse};
pub use synthetic::{generate_synthetic, ImbalanceProfile, NOISE_VOCABULARY_SIZE};

/// Ordered label names; a label's id is its position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSpace {
    names: Vec<String>,
}

impl LabelSpace {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Validation("label space must contain at least one label".into()));
        }
        let mut seen = HashSet::with_capacity(names.len());
        for name in &names {
            if name.is_empty() {
                return Err(Error::Validation("label names must be non-empty".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Validation(format!("duplicate label name {name:?}")));
            }
        }
        Ok(LabelSpace { names })
    }

    /// Label space whose names are the decimal ids `0..q`.
    pub fn numbered(q: usize) -> Result<Self> {
        LabelSpace::new((0..q).map(|l| l.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Renders a label set as `|`-separated names.
    pub fn render(&self, set: &LabelSet) -> String {
        set.iter().map(|l| self.name(l)).collect::<Vec<_>>().join("|")
    }
}

impl TryFrom<Vec<String>> for LabelSpace {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        LabelSpace::new(names)
    }
}

impl From<LabelSpace> for Vec<String> {
    fn from(space: LabelSpace) -> Self {
        space.names
    }
}

/// A set of label ids, stored sorted without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct LabelSet(Vec<usize>);

impl LabelSet {
    pub fn new() -> Self {
        LabelSet(Vec::new())
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        LabelSet(v)
    }

    pub fn contains(&self, label: usize) -> bool {
        self.0.binary_search(&label).is_ok()
    }

    pub fn insert(&mut self, label: usize) -> bool {
        match self.0.binary_search(&label) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, label);
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max_label(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn intersection_len(&self, other: &LabelSet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn union_len(&self, other: &LabelSet) -> usize {
        self.len() + other.len() - self.intersection_len(other)
    }

    pub fn symmetric_difference_len(&self, other: &LabelSet) -> usize {
        self.len() + other.len() - 2 * self.intersection_len(other)
    }
}

impl From<Vec<usize>> for LabelSet {
    fn from(v: Vec<usize>) -> Self {
        LabelSet::from_ids(v)
    }
}

impl From<LabelSet> for Vec<usize> {
    fn from(s: LabelSet) -> Self {
        s.0
    }
}

impl FromIterator<usize> for LabelSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        LabelSet::from_ids(iter)
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub labels: LabelSet,
}

/// Binary feature vector: the listed indices carry value 1, all others 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseBinaryVector {
    indices: Vec<usize>,
    dimension: usize,
}

impl SparseBinaryVector {
    /// Validating constructor: indices must be strictly ascending and `< dimension`.
    pub fn new(indices: Vec<usize>, dimension: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("indices not ascending".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= dimension {
                return Err(Error::Validation(format!(
                    "index {last} out of range for dimension {dimension}"
                )));
            }
        }
        Ok(SparseBinaryVector { indices, dimension })
    }

    /// Builds a vector from arbitrary (unsorted, possibly repeated) indices.
    pub fn from_unsorted(mut indices: Vec<usize>, dimension: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        SparseBinaryVector::new(indices, dimension)
    }

    pub fn empty(dimension: usize) -> Self {
        SparseBinaryVector {
            indices: Vec::new(),
            dimension,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Number of shared active features (the linear kernel on binary vectors).
    pub fn dot(&self, other: &SparseBinaryVector) -> usize {
        let (a, b) = (&self.indices, &other.indices);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// Appends one extra active feature past the current dimension block:
    /// the result has dimension `self.dimension + extra_dims` and index
    /// `self.dimension + offset` set.
    pub fn with_block_feature(&self, extra_dims: usize, offset: usize) -> Self {
        debug_assert!(offset < extra_dims);
        let mut indices = Vec::with_capacity(self.indices.len() + 1);
        indices.extend_from_slice(&self.indices);
        indices.push(self.dimension + offset);
        SparseBinaryVector {
            indices,
            dimension: self.dimension + extra_dims,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub vector: SparseBinaryVector,
    pub labels: LabelSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiLabelDataset {
    space: LabelSpace,
    dimension: usize,
    instances: Vec<Instance>,
}

impl MultiLabelDataset {
    pub fn new(space: LabelSpace, dimension: usize, instances: Vec<Instance>) -> Result<Self> {
        let q = space.len();
        for (i, inst) in instances.iter().enumerate() {
            if inst.vector.dimension() != dimension {
                return Err(Error::Validation(format!(
                    "instance {i} has dimension {}, expected {dimension}",
                    inst.vector.dimension()
                )));
            }
            if let Some(l) = inst.labels.max_label() {
                if l >= q {
                    return Err(Error::Validation(format!(
                        "instance {i} carries label {l} outside a space of {q} labels"
                    )));
                }
            }
        }
        Ok(MultiLabelDataset {
            space,
            dimension,
            instances,
        })
    }

    pub fn space(&self) -> &LabelSpace {
        &self.space
    }

    pub fn q(&self) -> usize {
        self.space.len()
    }

    pub fn n(&self) -> usize {
        self.instances.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn label_sets(&self) -> Vec<LabelSet> {
        self.instances.iter().map(|i| i.labels.clone()).collect()
    }

    /// Dataset made of the instances at `indices` (repeats allowed).
    pub fn subset(&self, indices: &[usize]) -> MultiLabelDataset {
        MultiLabelDataset {
            space: self.space.clone(),
            dimension: self.dimension,
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
        }
    }

    /// Same dataset with the label space replaced (names only; Q must match).
    pub fn with_space(mut self, space: LabelSpace) -> Result<Self> {
        if space.len() != self.space.len() {
            return Err(Error::Validation(format!(
                "label space of {} labels cannot replace one of {}",
                space.len(),
                self.space.len()
            )));
        }
        self.space = space;
        Ok(self)
    }
}

/// Shuffled index partition shared by dataset and document splitting.
pub fn split_indices(n: usize, train_count: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if train_count == 0 || train_count >= n {
        return Err(Error::Argument(format!(
            "train_count must satisfy 0 < train_count < N (got {train_count}, N = {n})"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let test = order.split_off(train_count);
    Ok((order, test))
}

/// Deterministic uniform train/test split.
pub fn split(
    dataset: &MultiLabelDataset,
    train_count: usize,
    seed: u64,
) -> Result<(MultiLabelDataset, MultiLabelDataset)> {
    let (train, test) = split_indices(dataset.n(), train_count, seed)?;
    Ok((dataset.subset(&train), dataset.subset(&test)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionStats {
    pub per_label_count: Vec<usize>,
    pub mean: f64,
    pub labels_above_mean: usize,
    pub max_count: usize,
    pub min_count: usize,
}

impl DistributionStats {
    pub fn from_label_sets<'a, I>(q: usize, sets: I) -> Self
    where
        I: IntoIterator<Item = &'a LabelSet>,
    {
        let mut counts = vec![0usize; q];
        for set in sets {
            for l in set.iter() {
                counts[l] += 1;
            }
        }
        DistributionStats::from_counts(counts)
    }

    pub fn from_counts(per_label_count: Vec<usize>) -> Self {
        let q = per_label_count.len();
        let total: usize = per_label_count.iter().sum();
        let mean = if q == 0 { 0.0 } else { total as f64 / q as f64 };
        let labels_above_mean = per_label_count.iter().filter(|&&c| c as f64 > mean).count();
        DistributionStats {
            max_count: per_label_count.iter().copied().max().unwrap_or(0),
            min_count: per_label_count.iter().copied().min().unwrap_or(0),
            per_label_count,
            mean,
            labels_above_mean,
        }
    }

    /// One-line summary with the mean at one decimal place.
    pub fn summary(&self) -> String {
        format!(
            "labels={} mean={:.1} above_mean={} max={} min={}",
            self.per_label_count.len(),
            self.mean,
            self.labels_above_mean,
            self.max_count,
            self.min_count
        )
    }
}

pub fn label_distribution(dataset: &MultiLabelDataset) -> DistributionStats {
    DistributionStats::from_label_sets(dataset.q(), dataset.instances.iter().map(|i| &i.labels))
}

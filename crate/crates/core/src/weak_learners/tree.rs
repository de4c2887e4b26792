//! Decision tree over binary features: presence/absence splits chosen by
//! gain ratio, grown until pure, then pruned bottom-up by replacing subtrees
//! whose pessimistic error estimate is no better than a leaf's.
//!
//! Leaves hold a weighted class distribution, so the same tree serves the
//! binary wrapper (two classes) and label-powerset multiclass training.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::TreeParams;
use crate::corpus::SparseBinaryVector;
use crate::seed::Rng;

const GAIN_EPS: f64 = 1e-12;

/// Flat node arena; node 0 is the root and children always follow parents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub n_classes: usize,
    pub nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        dist: Vec<f64>,
    },
    Split {
        feature: usize,
        present: usize,
        absent: usize,
    },
}

impl DecisionTree {
    pub fn distribution(&self, x: &SparseBinaryVector) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { dist } => return dist,
                TreeNode::Split {
                    feature,
                    present,
                    absent,
                } => at = if x.contains(*feature) { *present } else { *absent },
            }
        }
    }

    /// Majority class at the reached leaf, ties to the lower class id.
    pub fn predict_class(&self, x: &SparseBinaryVector) -> usize {
        argmax(self.distribution(x))
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, at: usize) -> usize {
            match &t.nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { present, absent, .. } => 1 + go(t, *present).max(go(t, *absent)),
            }
        }
        go(self, 0)
    }
}

pub(super) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Borrowed multiclass training data.
pub(crate) struct ClassView<'a> {
    pub vectors: &'a [SparseBinaryVector],
    pub classes: &'a [usize],
    pub weights: &'a [f64],
    pub n_classes: usize,
    pub dimension: usize,
}

fn entropy(class_w: &[f64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    class_w
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum()
}

/// Upper confidence bound on extra errors at a leaf covering `n` weighted
/// instances with `e` errors (the C4.5 pessimistic estimate).
fn added_errors(n: f64, e: f64, cf: f64, z: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    if e < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0, cf, z) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let f = (e + 0.5) / n;
    let z2 = z * z;
    let r = (f + z2 / (2.0 * n) + z * (f / n - f * f / n + z2 / (4.0 * n * n)).sqrt()) / (1.0 + z2 / n);
    r * n - e
}

struct Pending {
    node: usize,
    members: Vec<usize>,
    depth: usize,
    parent_dist: Option<Vec<f64>>,
    hist: Option<Histogram>,
}

/// Largest `dimension * n_classes` for which nodes carry dense histograms.
const HISTOGRAM_BUDGET: usize = 4096;

/// Per-feature count and class weight of the instances containing it.
struct Histogram {
    count: Vec<usize>,
    weight: Vec<f64>,
}

impl Histogram {
    fn build(view: &ClassView<'_>, members: &[usize]) -> Self {
        let k = view.n_classes;
        let mut h = Histogram {
            count: vec![0; view.dimension],
            weight: vec![0.0; view.dimension * k],
        };
        for &i in members {
            let (c, w) = (view.classes[i], view.weights[i]);
            for &f in view.vectors[i].indices() {
                h.count[f] += 1;
                h.weight[f * k + c] += w;
            }
        }
        h
    }

    /// `self -= other`, for deriving a child's histogram from its parent's.
    fn subtract(&mut self, other: &Histogram, k: usize) {
        for (f, (c, oc)) in self.count.iter_mut().zip(&other.count).enumerate() {
            *c -= oc;
            let (w, ow) = (&mut self.weight[f * k..(f + 1) * k], &other.weight[f * k..(f + 1) * k]);
            for (a, b) in w.iter_mut().zip(ow) {
                *a = if *c == 0 { 0.0 } else { (*a - b).max(0.0) };
            }
        }
    }
}

struct Split {
    feature: usize,
    gain: f64,
    ratio: f64,
    split_info: f64,
}

/// Grows (and optionally prunes) a tree over all instances of `view`.
/// With `subsample = Some((m, rng))`, each split considers `m` randomly
/// chosen splittable features.
pub(crate) fn grow(view: &ClassView<'_>, params: &TreeParams, subsample: Option<(usize, &mut Rng)>) -> DecisionTree {
    grow_from(view, (0..view.vectors.len()).collect(), params, subsample)
}

pub(crate) fn grow_from(
    view: &ClassView<'_>,
    root_members: Vec<usize>,
    params: &TreeParams,
    mut subsample: Option<(usize, &mut Rng)>,
) -> DecisionTree {
    let k = view.n_classes;
    let n_scale = root_members.len() as f64;
    let mut nodes: Vec<TreeNode> = vec![TreeNode::Leaf { dist: vec![] }];
    // Per node: leaf distribution, covered weight and leaf errors (instance units).
    let mut node_dist: Vec<Vec<f64>> = vec![Vec::new()];
    let mut node_cover: Vec<(f64, f64)> = vec![(0.0, 0.0)];

    let mut present_w = vec![0.0f64; view.dimension * k];
    let mut present_n = vec![0usize; view.dimension];
    let mut touched: Vec<usize> = Vec::new();

    let mut stack = vec![Pending {
        node: 0,
        members: root_members,
        depth: 0,
        parent_dist: None,
        hist: None,
    }];
    // Small grids keep a histogram per node so only the smaller child of a
    // split is rescanned; deep unbalanced trees would otherwise rescan the
    // large side at every level.
    let use_hist = view.dimension * k <= HISTOGRAM_BUDGET;
    while let Some(p) = stack.pop() {
        let mut class_w = vec![0.0f64; k];
        for &i in &p.members {
            class_w[view.classes[i]] += view.weights[i];
        }
        let total: f64 = class_w.iter().sum();
        let dist: Vec<f64> = if total > 0.0 {
            class_w.iter().map(|w| w / total).collect()
        } else {
            p.parent_dist.clone().unwrap_or_else(|| vec![1.0 / k as f64; k])
        };
        let majority = class_w[argmax(&class_w)];
        node_cover[p.node] = (total * n_scale, (total - majority).max(0.0) * n_scale);
        node_dist[p.node] = dist.clone();

        let classes_present = class_w.iter().filter(|&&w| w > 0.0).count();
        let depth_ok = params.max_depth.is_none_or(|d| p.depth < d);
        if classes_present <= 1 || !depth_ok || p.members.len() < 2 {
            nodes[p.node] = TreeNode::Leaf { dist };
            continue;
        }

        let hist = if use_hist {
            Some(p.hist.unwrap_or_else(|| Histogram::build(view, &p.members)))
        } else {
            // Weighted class mass of the "present" branch for every touched feature.
            for &i in &p.members {
                let (c, w) = (view.classes[i], view.weights[i]);
                for &f in view.vectors[i].indices() {
                    if present_n[f] == 0 {
                        touched.push(f);
                    }
                    present_n[f] += 1;
                    present_w[f * k + c] += w;
                }
            }
            touched.sort_unstable();
            None
        };
        let (counts, weights): (&[usize], &[f64]) = match &hist {
            Some(h) => {
                touched.extend((0..view.dimension).filter(|&f| h.count[f] > 0));
                (&h.count, &h.weight)
            }
            None => (&present_n, &present_w),
        };

        let h_node = entropy(&class_w, total);
        let mut candidates: Vec<Split> = Vec::new();
        let mut absent_w = vec![0.0f64; k];
        for &f in &touched {
            if counts[f] == p.members.len() {
                continue;
            }
            let pw = &weights[f * k..(f + 1) * k];
            let wp: f64 = pw.iter().sum();
            let wa = (total - wp).max(0.0);
            if wp < params.min_leaf_weight || wa < params.min_leaf_weight || wp <= 0.0 || wa <= 0.0 {
                continue;
            }
            for c in 0..k {
                absent_w[c] = (class_w[c] - pw[c]).max(0.0);
            }
            let gain = h_node - (wp / total) * entropy(pw, wp) - (wa / total) * entropy(&absent_w, wa);
            let split_info = entropy(&[wp, wa], total);
            candidates.push(Split {
                feature: f,
                gain,
                ratio: if split_info > 0.0 { gain / split_info } else { 0.0 },
                split_info,
            });
        }
        if hist.is_none() {
            for &f in &touched {
                present_n[f] = 0;
                present_w[f * k..(f + 1) * k].iter_mut().for_each(|w| *w = 0.0);
            }
        }
        touched.clear();

        if let Some((m, rng)) = subsample.as_mut() {
            if candidates.len() > *m {
                candidates.shuffle(*rng);
                candidates.truncate(*m);
                candidates.sort_by_key(|s| s.feature);
            }
        }

        let chosen = choose_split(&candidates);
        let Some(feature) = chosen else {
            nodes[p.node] = TreeNode::Leaf { dist };
            continue;
        };

        let (present, absent): (Vec<usize>, Vec<usize>) =
            p.members.iter().partition(|&&i| view.vectors[i].contains(feature));
        let present_id = nodes.len();
        let absent_id = present_id + 1;
        for _ in 0..2 {
            nodes.push(TreeNode::Leaf { dist: vec![] });
            node_dist.push(Vec::new());
            node_cover.push((0.0, 0.0));
        }
        nodes[p.node] = TreeNode::Split {
            feature,
            present: present_id,
            absent: absent_id,
        };
        let (present_hist, absent_hist) = match hist {
            Some(mut parent) => {
                let present_smaller = present.len() <= absent.len();
                let small = Histogram::build(view, if present_smaller { &present } else { &absent });
                parent.subtract(&small, k);
                if present_smaller {
                    (Some(small), Some(parent))
                } else {
                    (Some(parent), Some(small))
                }
            }
            None => (None, None),
        };
        stack.push(Pending {
            node: absent_id,
            members: absent,
            depth: p.depth + 1,
            parent_dist: Some(dist.clone()),
            hist: absent_hist,
        });
        stack.push(Pending {
            node: present_id,
            members: present,
            depth: p.depth + 1,
            parent_dist: Some(dist),
            hist: present_hist,
        });
    }

    if let Some(cf) = params.pruning_cf {
        prune(&mut nodes, &node_dist, &node_cover, cf);
    }
    compact(DecisionTree { n_classes: k, nodes })
}

/// Highest gain ratio among splits with at least average positive gain.
/// When no split has positive gain, the most balanced separating split is
/// used so that impure nodes keep splitting until pure.
fn choose_split(candidates: &[Split]) -> Option<usize> {
    let positive: Vec<&Split> = candidates.iter().filter(|s| s.gain > GAIN_EPS).collect();
    if positive.is_empty() {
        let mut best: Option<&Split> = None;
        for s in candidates {
            if best.is_none_or(|b| s.split_info > b.split_info) {
                best = Some(s);
            }
        }
        return best.map(|s| s.feature);
    }
    let avg = positive.iter().map(|s| s.gain).sum::<f64>() / positive.len() as f64;
    let mut best: Option<&Split> = None;
    for s in positive {
        if s.gain + GAIN_EPS < avg {
            continue;
        }
        if best.is_none_or(|b| s.ratio > b.ratio) {
            best = Some(s);
        }
    }
    best.map(|s| s.feature)
}

fn prune(nodes: &mut [TreeNode], dist: &[Vec<f64>], cover: &[(f64, f64)], cf: f64) {
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - cf);
    let mut estimate = vec![0.0f64; nodes.len()];
    // Children always have larger indices than their parent.
    for idx in (0..nodes.len()).rev() {
        let (n, e) = cover[idx];
        let as_leaf = e + added_errors(n, e, cf, z);
        match nodes[idx] {
            TreeNode::Leaf { .. } => estimate[idx] = as_leaf,
            TreeNode::Split { present, absent, .. } => {
                let as_tree = estimate[present] + estimate[absent];
                if as_leaf <= as_tree + 0.1 {
                    nodes[idx] = TreeNode::Leaf {
                        dist: dist[idx].clone(),
                    };
                    estimate[idx] = as_leaf;
                } else {
                    estimate[idx] = as_tree;
                }
            }
        }
    }
}

/// Drops nodes no longer reachable from the root, preserving preorder.
fn compact(tree: DecisionTree) -> DecisionTree {
    let mut out = Vec::with_capacity(tree.nodes.len());
    fn visit(src: &[TreeNode], at: usize, out: &mut Vec<TreeNode>) -> usize {
        let id = out.len();
        match &src[at] {
            TreeNode::Leaf { dist } => out.push(TreeNode::Leaf { dist: dist.clone() }),
            TreeNode::Split {
                feature,
                present,
                absent,
            } => {
                out.push(TreeNode::Leaf { dist: vec![] });
                let p = visit(src, *present, out);
                let a = visit(src, *absent, out);
                out[id] = TreeNode::Split {
                    feature: *feature,
                    present: p,
                    absent: a,
                };
            }
        }
        id
    }
    visit(&tree.nodes, 0, &mut out);
    DecisionTree {
        n_classes: tree.n_classes,
        nodes: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn added_errors_matches_reference_values() {
        let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.75);
        // Zero errors: n * (1 - cf^(1/n)).
        let e0 = added_errors(6.0, 0.0, 0.25, z);
        assert!((e0 - 6.0 * (1.0 - 0.25f64.powf(1.0 / 6.0))).abs() < 1e-12);
        // Monotone in the observed errors.
        assert!(added_errors(20.0, 2.0, 0.25, z) > 0.0);
        assert!(2.0 + added_errors(20.0, 2.0, 0.25, z) < 3.0 + added_errors(20.0, 3.0, 0.25, z));
        // Upper end: at most n - e.
        assert!((added_errors(4.0, 3.6, 0.25, z) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn xor_is_learned_without_pruning() {
        let vecs = vec![
            SparseBinaryVector::new(vec![], 2).unwrap(),
            SparseBinaryVector::new(vec![0], 2).unwrap(),
            SparseBinaryVector::new(vec![1], 2).unwrap(),
            SparseBinaryVector::new(vec![0, 1], 2).unwrap(),
        ];
        let classes = vec![0, 1, 1, 0];
        let weights = vec![0.25; 4];
        let view = ClassView {
            vectors: &vecs,
            classes: &classes,
            weights: &weights,
            n_classes: 2,
            dimension: 2,
        };
        let tree = grow(&view, &TreeParams::unpruned(), None);
        for (v, &c) in vecs.iter().zip(&classes) {
            assert_eq!(tree.predict_class(v), c);
        }
        assert_eq!(tree.leaf_count(), 4);
    }
}

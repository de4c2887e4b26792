use serde::{Deserialize, Serialize};

use super::WeightedBinaryDataset;
use crate::corpus::SparseBinaryVector;

/// One-feature rule: `present` when the feature is active, `absent` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub present: i8,
    pub absent: i8,
}

impl Stump {
    pub fn predict(&self, x: &SparseBinaryVector) -> i8 {
        if x.contains(self.feature) {
            self.present
        } else {
            self.absent
        }
    }
}

fn side(pos: f64, neg: f64) -> (i8, f64) {
    if pos >= neg {
        (1, neg)
    } else {
        (-1, pos)
    }
}

/// Exhaustive minimum-weighted-error stump; `None` when there are no features.
/// Equal errors keep the lowest feature index.
pub(super) fn train(data: &WeightedBinaryDataset) -> Option<Stump> {
    let dim = data.dimension();
    if dim == 0 {
        return None;
    }
    let (total_pos, total_neg) = data.class_mass();
    let mut present_pos = vec![0.0f64; dim];
    let mut present_neg = vec![0.0f64; dim];
    for ((v, &t), &w) in data.vectors().iter().zip(data.targets()).zip(data.weights()) {
        let acc = if t > 0 { &mut present_pos } else { &mut present_neg };
        for &f in v.indices() {
            acc[f] += w;
        }
    }

    let mut best: Option<(f64, Stump)> = None;
    for f in 0..dim {
        let (p_sign, p_err) = side(present_pos[f], present_neg[f]);
        let a_pos = (total_pos - present_pos[f]).max(0.0);
        let a_neg = (total_neg - present_neg[f]).max(0.0);
        let (a_sign, a_err) = side(a_pos, a_neg);
        let err = p_err + a_err;
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((
                err,
                Stump {
                    feature: f,
                    present: p_sign,
                    absent: a_sign,
                },
            ));
        }
    }
    best.map(|(_, s)| s)
}

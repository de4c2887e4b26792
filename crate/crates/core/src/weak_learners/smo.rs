//! Linear-kernel SVM trained by sequential minimal optimization.
//!
//! Solves the dual
//!
//! ```text
//! max  sum_i a_i - 1/2 |sum_i a_i y_i x_i|^2
//! s.t. 0 <= a_i <= C_i,  sum_i a_i y_i = 0
//! ```
//!
//! by repeatedly optimizing the maximal violating pair exactly. With
//! gradient `G_i = y_i w.x_i - 1`, the index sets
//! `I_up = {y=+1, a<C} u {y=-1, a>0}` and `I_low = {y=+1, a>0} u {y=-1, a<C}`
//! and `m = max_{I_up} -y_i G_i`, `M = min_{I_low} -y_i G_i`, the solver stops
//! once `m - M <= tolerance` and sets the bias to `(m + M) / 2`. At that
//! point every instance satisfies its KKT condition within `tolerance / 2`.

use serde::{Deserialize, Serialize};

use super::{BinaryLearner, BinaryModel, SmoParams, WeightedBinaryDataset};
use crate::corpus::SparseBinaryVector;
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

/// Folded primal form of a linear SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// `(training index, a_i y_i)` for every instance with `a_i > 0`.
    pub support: Vec<(usize, f64)>,
}

impl LinearSvm {
    pub fn decision(&self, x: &SparseBinaryVector) -> f64 {
        x.indices().iter().map(|&f| self.weights[f]).sum::<f64>() + self.bias
    }

    pub fn decision_dense(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias
    }
}

/// Rows the solver can take inner products with.
pub trait LinearRows {
    fn len(&self) -> usize;
    fn dimension(&self) -> usize;
    fn dot_weights(&self, i: usize, w: &[f64]) -> f64;
    /// `w += scale * x_i`
    fn add_scaled(&self, i: usize, scale: f64, w: &mut [f64]);
    fn kernel(&self, i: usize, j: usize) -> f64;
}

impl LinearRows for [SparseBinaryVector] {
    fn len(&self) -> usize {
        <[SparseBinaryVector]>::len(self)
    }

    fn dimension(&self) -> usize {
        self.first().map_or(0, |v| v.dimension())
    }

    fn dot_weights(&self, i: usize, w: &[f64]) -> f64 {
        self[i].indices().iter().map(|&f| w[f]).sum()
    }

    fn add_scaled(&self, i: usize, scale: f64, w: &mut [f64]) {
        for &f in self[i].indices() {
            w[f] += scale;
        }
    }

    fn kernel(&self, i: usize, j: usize) -> f64 {
        self[i].dot(&self[j]) as f64
    }
}

/// Dense real-valued rows of equal length.
pub struct DenseRows<'a>(pub &'a [Vec<f64>]);

impl LinearRows for DenseRows<'_> {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn dimension(&self) -> usize {
        self.0.first().map_or(0, |r| r.len())
    }

    fn dot_weights(&self, i: usize, w: &[f64]) -> f64 {
        self.0[i].iter().zip(w).map(|(a, b)| a * b).sum()
    }

    fn add_scaled(&self, i: usize, scale: f64, w: &mut [f64]) {
        for (wf, xf) in w.iter_mut().zip(&self.0[i]) {
            *wf += scale * xf;
        }
    }

    fn kernel(&self, i: usize, j: usize) -> f64 {
        self.0[i].iter().zip(&self.0[j]).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub model: LinearSvm,
    pub alpha: Vec<f64>,
    /// Per-instance box bound `C_i`.
    pub upper: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Dual objective after initialization and after every pair update
    /// (only when requested).
    pub objective_trace: Vec<f64>,
}

impl SmoSolution {
    /// `|sum_i a_i y_i|`
    pub fn equality_residual(&self, targets: &[f64]) -> f64 {
        self.alpha.iter().zip(targets).map(|(a, y)| a * y).sum::<f64>().abs()
    }
}

fn dual_objective(alpha: &[f64], w: &[f64]) -> f64 {
    alpha.iter().sum::<f64>() - 0.5 * w.iter().map(|x| x * x).sum::<f64>()
}

/// Core solver over arbitrary rows with explicit box bounds.
pub fn solve_dual<R: LinearRows + ?Sized>(
    rows: &R,
    targets: &[f64],
    upper: &[f64],
    tolerance: f64,
    max_iterations: usize,
    record_objective: bool,
) -> SmoSolution {
    let n = rows.len();
    let dim = rows.dimension();
    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; dim];
    let mut grad = vec![-1.0f64; n];
    let mut trace = Vec::new();
    if record_objective {
        trace.push(0.0);
    }

    let in_up = |a: f64, y: f64, c: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let in_low = |a: f64, y: f64, c: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

    let mut iterations = 0;
    let mut converged = false;
    let (mut m, mut big_m);
    loop {
        let mut up: Option<(usize, f64)> = None;
        let mut low: Option<(usize, f64)> = None;
        for t in 0..n {
            let v = -targets[t] * grad[t];
            if in_up(alpha[t], targets[t], upper[t]) && up.is_none_or(|(_, b)| v > b) {
                up = Some((t, v));
            }
            if in_low(alpha[t], targets[t], upper[t]) && low.is_none_or(|(_, b)| v < b) {
                low = Some((t, v));
            }
        }
        m = up.map(|(_, v)| v);
        big_m = low.map(|(_, v)| v);
        let (Some((i, mi)), Some((j, mj))) = (up, low) else {
            converged = true;
            break;
        };
        if mi - mj <= tolerance {
            converged = true;
            break;
        }
        if iterations >= max_iterations {
            break;
        }

        let eta = (rows.kernel(i, i) + rows.kernel(j, j) - 2.0 * rows.kernel(i, j)).max(TAU);
        let bound_i = if targets[i] > 0.0 { upper[i] - alpha[i] } else { alpha[i] };
        let bound_j = if targets[j] > 0.0 { alpha[j] } else { upper[j] - alpha[j] };
        let step = ((mi - mj) / eta).min(bound_i).min(bound_j);

        alpha[i] += targets[i] * step;
        alpha[j] -= targets[j] * step;
        if step == bound_i {
            alpha[i] = if targets[i] > 0.0 { upper[i] } else { 0.0 };
        }
        if step == bound_j {
            alpha[j] = if targets[j] > 0.0 { 0.0 } else { upper[j] };
        }
        rows.add_scaled(i, step, &mut w);
        rows.add_scaled(j, -step, &mut w);
        for t in 0..n {
            grad[t] = targets[t] * rows.dot_weights(t, &w) - 1.0;
        }
        if record_objective {
            trace.push(dual_objective(&alpha, &w));
        }
        iterations += 1;
    }

    let bias = match (m, big_m) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => 0.0,
    };
    let support = alpha
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0.0)
        .map(|(i, &a)| (i, a * targets[i]))
        .collect();
    SmoSolution {
        model: LinearSvm {
            weights: w,
            bias,
            support,
        },
        alpha,
        upper: upper.to_vec(),
        iterations,
        converged,
        objective_trace: trace,
    }
}

/// Weighted binary training: box bounds `C_i = C * w_i * n`.
pub fn solve(data: &WeightedBinaryDataset, params: &SmoParams, record_objective: bool) -> Result<SmoSolution> {
    params.validate()?;
    let n = data.len();
    let targets: Vec<f64> = data.targets().iter().map(|&t| f64::from(t)).collect();
    if let Some(sign) = data.single_class() {
        return Ok(SmoSolution {
            model: LinearSvm {
                weights: vec![0.0; data.dimension()],
                bias: f64::from(sign),
                support: Vec::new(),
            },
            alpha: vec![0.0; n],
            upper: data.weights().iter().map(|w| params.c * w * n as f64).collect(),
            iterations: 0,
            converged: true,
            objective_trace: Vec::new(),
        });
    }
    let upper: Vec<f64> = data.weights().iter().map(|w| params.c * w * n as f64).collect();
    let max_iterations = params.max_passes.saturating_mul(n.max(1));
    Ok(solve_dual(
        data.vectors(),
        &targets,
        &upper,
        params.tolerance,
        max_iterations,
        record_objective,
    ))
}

/// The `smo` branch of weak-learner training.
pub fn train_smo(data: &WeightedBinaryDataset, params: &SmoParams) -> Result<BinaryModel> {
    if data.is_empty() {
        return Err(Error::Validation("empty training set".into()));
    }
    let dimension = data.dimension();
    if let Some(sign) = data.single_class() {
        return Ok(BinaryModel::constant(sign, dimension));
    }
    let sol = solve(data, params, false)?;
    Ok(BinaryModel {
        dimension,
        learner: BinaryLearner::Smo(sol.model),
    })
}

use std::collections::BTreeMap;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::report::{Metric, ResultsTable};
use crate::corpus::{self, DistributionStats, SparseBinaryVector};
use crate::error::{Error, Result, StageExt};
use crate::metrics::{accuracy_margin, EvaluationReport, MarginReport};
use crate::multilabel::{
    self, train_bagging, Algorithm, BaggingOptions, BaseKind, MultiLabelModel, StopReason,
};
use crate::preprocess::Pipeline;
use crate::weak_learners::WeakKind;

/// Metric values of one (algorithm, weak) pair at one ensemble size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub algorithm: Algorithm,
    pub weak: WeakKind,
    pub iterations: usize,
    pub hamming_loss: f64,
    pub subset_accuracy: f64,
    pub example_accuracy: f64,
    pub micro_f1: f64,
}

impl SweepPoint {
    fn new(algorithm: Algorithm, weak: WeakKind, iterations: usize, r: &EvaluationReport) -> Self {
        SweepPoint {
            algorithm,
            weak,
            iterations,
            hamming_loss: r.hamming_loss,
            subset_accuracy: r.subset_accuracy,
            example_accuracy: r.example_accuracy,
            micro_f1: r.micro_f1,
        }
    }

    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::HammingLoss => self.hamming_loss,
            Metric::SubsetAccuracy => self.subset_accuracy,
            Metric::ExampleAccuracy => self.example_accuracy,
            Metric::MicroF1 => self.micro_f1,
        }
    }
}

/// Ensemble metrics at sizes `1..=T` plus flat baseline reference lines.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepSeries {
    pub points: Vec<SweepPoint>,
    /// One point per baseline pair, at `iterations = 1`; plotted as a flat line.
    pub baselines: Vec<SweepPoint>,
    pub max_iterations: usize,
}

impl SweepSeries {
    pub fn series(&self, algorithm: Algorithm, weak: WeakKind) -> Vec<&SweepPoint> {
        self.points
            .iter()
            .filter(|p| p.algorithm == algorithm && p.weak == weak)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginEntry {
    pub algorithm: Algorithm,
    pub baseline: Algorithm,
    pub weak: WeakKind,
    pub report: MarginReport,
}

/// Boosting that ended before the requested number of rounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EarlyStop {
    pub weak: WeakKind,
    pub rounds: usize,
    pub requested: usize,
    pub reason: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub train_size: usize,
    pub test_size: usize,
    pub q: usize,
    pub dimension: usize,
    pub label_names: Vec<String>,
    pub train_distribution: DistributionStats,
    pub evaluations: BTreeMap<(Algorithm, WeakKind), EvaluationReport>,
    pub tables: Vec<ResultsTable>,
    pub sweep: SweepSeries,
    pub margins: Vec<MarginEntry>,
    pub early_stops: Vec<EarlyStop>,
    pub algorithms: Vec<Algorithm>,
    pub weak_kinds: Vec<WeakKind>,
}

/// Runs the configured grid: fit the pipeline on the training split, train
/// every (algorithm, weak) pair, evaluate on the test split and every
/// ensemble prefix, then derive tables, sweeps and margin reports.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate().stage("config")?;
    let corpus = config.corpus.load(config.master_seed).stage("corpus")?;
    let (train_idx, test_idx) =
        corpus::split_indices(corpus.len(), config.split.train_count, config.split_seed()).stage("split")?;
    let train_docs = corpus.subset(&train_idx);
    let test_docs = corpus.subset(&test_idx);
    let (pipeline, train) = Pipeline::fit(&config.pipeline, &train_docs).stage("preprocess")?;
    let test = pipeline.transform_corpus(&test_docs).stage("preprocess")?;

    let q = train.q();
    let golds = test.label_sets();
    let test_vectors: Vec<&SparseBinaryVector> = test.instances().iter().map(|i| &i.vector).collect();
    let train_distribution = corpus::label_distribution(&train);

    let algorithms = config.algorithm_order();
    let weak_kinds = config.weak_order();
    let mut evaluations = BTreeMap::new();
    let mut sweep = SweepSeries {
        max_iterations: config.iterations,
        ..SweepSeries::default()
    };
    let mut early_stops = Vec::new();
    let bagging_options = BaggingOptions {
        vote_threshold: config.bagging.vote_threshold,
        disable_bootstrap: false,
    };

    for &weak_kind in &weak_kinds {
        let spec = config.weak.spec(weak_kind, config.weak_seed());
        for &algorithm in &algorithms {
            let model = match algorithm {
                Algorithm::BaggingBr | Algorithm::BaggingLp => {
                    let base = if algorithm == Algorithm::BaggingBr {
                        BaseKind::Br
                    } else {
                        BaseKind::Lp
                    };
                    MultiLabelModel::Bagging(train_bagging(
                        &train,
                        base,
                        &spec,
                        config.iterations,
                        config.bagging_seed(),
                        &bagging_options,
                    )
                    .stage("train")?)
                }
                _ => multilabel::train(algorithm, &train, &spec, config.iterations, config.bagging_seed())
                    .stage("train")?,
            };
            if let MultiLabelModel::AdaboostMh(m) = &model {
                if let Some(reason) = m.stop {
                    if m.rounds.len() < config.iterations {
                        early_stops.push(EarlyStop {
                            weak: weak_kind,
                            rounds: m.rounds.len(),
                            requested: config.iterations,
                            reason,
                        });
                    }
                }
            }

            let prefixes = model.prefix_predictions(&test_vectors).stage("evaluate")?;
            let mut last = None;
            for (k, preds) in prefixes.iter().enumerate() {
                let report = EvaluationReport::evaluate(preds, &golds, q).stage("evaluate")?;
                let point = SweepPoint::new(algorithm, weak_kind, k + 1, &report);
                if algorithm.is_ensemble() {
                    sweep.points.push(point);
                } else {
                    sweep.baselines.push(point);
                }
                last = Some(report);
            }
            let report = last.ok_or_else(|| Error::Invariant("model produced no predictions".into()))?;
            evaluations.insert((algorithm, weak_kind), report);
        }
    }

    let mut margins = Vec::new();
    for &weak_kind in &weak_kinds {
        for &algorithm in &algorithms {
            let Some(baseline) = algorithm.baseline() else {
                continue;
            };
            let (Some(base), Some(approach)) = (
                evaluations.get(&(baseline, weak_kind)),
                evaluations.get(&(algorithm, weak_kind)),
            ) else {
                continue;
            };
            let report =
                accuracy_margin(base, approach, &train_distribution.per_label_count).stage("margins")?;
            margins.push(MarginEntry {
                algorithm,
                baseline,
                weak: weak_kind,
                report,
            });
        }
    }

    let tables = Metric::ALL
        .iter()
        .map(|&metric| ResultsTable::from_evaluations(metric, &weak_kinds, &evaluations))
        .collect();

    Ok(ExperimentOutcome {
        train_size: train.n(),
        test_size: test.n(),
        q,
        dimension: train.dimension(),
        label_names: train.space().names().to_vec(),
        train_distribution,
        evaluations,
        tables,
        sweep,
        margins,
        early_stops,
        algorithms,
        weak_kinds,
    })
}

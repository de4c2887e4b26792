use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::experiment::{ExperimentOutcome, SweepPoint};
use crate::error::{Error, Result};
use crate::metrics::EvaluationReport;
use crate::multilabel::{Algorithm, StopReason};
use crate::weak_learners::WeakKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    HammingLoss,
    SubsetAccuracy,
    ExampleAccuracy,
    MicroF1,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::HammingLoss,
        Metric::SubsetAccuracy,
        Metric::ExampleAccuracy,
        Metric::MicroF1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::HammingLoss => "hamming_loss",
            Metric::SubsetAccuracy => "subset_accuracy",
            Metric::ExampleAccuracy => "example_accuracy",
            Metric::MicroF1 => "micro_f1",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Metric::HammingLoss => "Hamming loss",
            Metric::SubsetAccuracy => "Subset accuracy",
            Metric::ExampleAccuracy => "Example-based accuracy",
            Metric::MicroF1 => "Micro-averaged F1",
        }
    }

    pub fn lower_is_better(self) -> bool {
        self == Metric::HammingLoss
    }

    pub fn of(self, report: &EvaluationReport) -> f64 {
        match self {
            Metric::HammingLoss => report.hamming_loss,
            Metric::SubsetAccuracy => report.subset_accuracy,
            Metric::ExampleAccuracy => report.example_accuracy,
            Metric::MicroF1 => report.micro_f1,
        }
    }

    /// Strict improvement in this metric's direction.
    pub fn better(self, a: f64, b: f64) -> bool {
        if self.lower_is_better() {
            a < b
        } else {
            a > b
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Csv,
    Jsonl,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Text => "txt",
            ReportFormat::Csv => "csv",
            ReportFormat::Jsonl => "jsonl",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" | "json-lines" => Ok(ReportFormat::Jsonl),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

/// One weak learner's cells, in [`Algorithm::ALL`] column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub weak: WeakKind,
    pub cells: Vec<Option<f64>>,
}

/// One metric over the (weak learner x algorithm) grid; a cell is present
/// iff that pair ran.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultsTable {
    pub metric: Metric,
    pub rows: Vec<TableRow>,
}

fn column(algorithm: Algorithm) -> usize {
    Algorithm::ALL.iter().position(|&a| a == algorithm).expect("known algorithm")
}

impl ResultsTable {
    pub fn from_evaluations(
        metric: Metric,
        weak_kinds: &[WeakKind],
        evaluations: &BTreeMap<(Algorithm, WeakKind), EvaluationReport>,
    ) -> Self {
        let rows = weak_kinds
            .iter()
            .map(|&weak| TableRow {
                weak,
                cells: Algorithm::ALL
                    .iter()
                    .map(|&a| evaluations.get(&(a, weak)).map(|r| metric.of(r)))
                    .collect(),
            })
            .collect();
        ResultsTable { metric, rows }
    }

    pub fn cell(&self, weak: WeakKind, algorithm: Algorithm) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.weak == weak)
            .and_then(|r| r.cells[column(algorithm)])
    }

    /// Whether an ensemble cell beats the better of the row's baselines.
    pub fn outperforms_baselines(&self, row: &TableRow, algorithm: Algorithm) -> bool {
        if !algorithm.is_ensemble() {
            return false;
        }
        let Some(value) = row.cells[column(algorithm)] else {
            return false;
        };
        let baselines = [Algorithm::Br, Algorithm::Lp].map(|a| row.cells[column(a)]);
        let best = baselines.into_iter().flatten().reduce(|a, b| {
            if self.metric.better(b, a) {
                b
            } else {
                a
            }
        });
        best.is_some_and(|b| self.metric.better(value, b))
    }
}

const WEAK_WIDTH: usize = 16;

fn text_table(table: &ResultsTable) -> String {
    let mut out = String::new();
    let direction = if table.metric.lower_is_better() {
        "lower is better"
    } else {
        "higher is better"
    };
    let _ = writeln!(out, "{} ({direction})", table.metric.title());
    let _ = write!(out, "{:<WEAK_WIDTH$}", "Weak classifier");
    for a in Algorithm::ALL {
        let _ = write!(out, "  {:>w$}", a.title(), w = a.title().len().max(8));
    }
    out.push('\n');
    for row in &table.rows {
        let _ = write!(out, "{:<WEAK_WIDTH$}", row.weak.title());
        for (a, cell) in Algorithm::ALL.iter().zip(&row.cells) {
            let text = match cell {
                Some(v) if table.outperforms_baselines(row, *a) => format!("{v:.4}*"),
                Some(v) => format!("{v:.4} "),
                None => "N/A ".to_string(),
            };
            let _ = write!(out, "  {:>w$}", text, w = a.title().len().max(8));
        }
        out.push('\n');
    }
    out
}

fn csv_tables(tables: &[ResultsTable]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["metric".to_string(), "weak".to_string()];
    header.extend(Algorithm::ALL.iter().map(|a| a.name().replace('-', "_")));
    header.push("outperforming".to_string());
    w.write_record(&header).map_err(csv_err)?;
    for table in tables {
        for row in &table.rows {
            let mut record = vec![table.metric.name().to_string(), row.weak.name().to_string()];
            record.extend(row.cells.iter().map(|c| match c {
                Some(v) => v.to_string(),
                None => "N/A".to_string(),
            }));
            let stars: Vec<&str> = Algorithm::ALL
                .iter()
                .filter(|&&a| table.outperforms_baselines(row, a))
                .map(|a| a.name())
                .collect();
            record.push(stars.join("|"));
            w.write_record(&record).map_err(csv_err)?;
        }
    }
    finish_csv(w)
}

fn jsonl_tables(tables: &[ResultsTable]) -> String {
    let mut out = String::new();
    for table in tables {
        for row in &table.rows {
            for (a, cell) in Algorithm::ALL.iter().zip(&row.cells) {
                let line = json!({
                    "metric": table.metric.name(),
                    "weak": row.weak.name(),
                    "algorithm": a.name(),
                    "value": cell,
                    "outperforms_baselines": table.outperforms_baselines(row, *a),
                });
                out.push_str(&line.to_string());
                out.push('\n');
            }
        }
    }
    out
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))
}

/// Renders one table. Text marks ensemble cells that beat the better
/// baseline of their row with `*`.
pub fn emit_table(table: &ResultsTable, format: ReportFormat) -> Result<String> {
    emit_tables(std::slice::from_ref(table), format)
}

pub fn emit_tables(tables: &[ResultsTable], format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Text => tables.iter().map(text_table).collect::<Vec<_>>().join("\n"),
        ReportFormat::Csv => csv_tables(tables)?,
        ReportFormat::Jsonl => jsonl_tables(tables),
    })
}

fn stop_note(s: &super::experiment::EarlyStop) -> String {
    let why = match s.reason {
        StopReason::PerfectRound { .. } => "a round reached zero weighted error",
        StopReason::WeakRound { .. } => "a round reached weighted error >= 0.5 and was discarded",
        StopReason::Fallback => "the first round was no better than chance; a constant round was used",
    };
    format!(
        "AdaBoost.MH with {} stopped after {} of {} rounds ({why}); its sweep series is shortened accordingly.",
        s.weak.title(),
        s.rounds,
        s.requested
    )
}

/// Text notes appended below the tables.
pub fn footer(outcome: &ExperimentOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "train={} test={} labels={} features={}",
        outcome.train_size, outcome.test_size, outcome.q, outcome.dimension
    );
    let _ = writeln!(out, "training label distribution: {}", outcome.train_distribution.summary());
    let _ = writeln!(out, "* ensemble cell outperforms the better baseline of its row");
    for s in &outcome.early_stops {
        let _ = writeln!(out, "{}", stop_note(s));
    }
    out
}

fn sweep_record(p: &SweepPoint, iterations: usize) -> Vec<String> {
    vec![
        p.algorithm.name().to_string(),
        p.weak.name().to_string(),
        iterations.to_string(),
        p.hamming_loss.to_string(),
        p.subset_accuracy.to_string(),
        p.example_accuracy.to_string(),
        p.micro_f1.to_string(),
    ]
}

/// Plot-ready sweep series; baselines are repeated at every iteration count.
pub fn emit_sweep_csv(outcome: &ExperimentOutcome) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "algorithm",
        "weak",
        "iterations",
        "hamming_loss",
        "subset_accuracy",
        "example_accuracy",
        "micro_f1",
    ])
    .map_err(csv_err)?;
    for p in &outcome.sweep.baselines {
        for k in 1..=outcome.sweep.max_iterations {
            w.write_record(sweep_record(p, k)).map_err(csv_err)?;
        }
    }
    for p in &outcome.sweep.points {
        w.write_record(sweep_record(p, p.iterations)).map_err(csv_err)?;
    }
    finish_csv(w)
}

pub fn emit_margins_csv(outcome: &ExperimentOutcome) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "algorithm",
        "baseline",
        "weak",
        "label",
        "label_name",
        "training_count",
        "baseline_accuracy",
        "approach_accuracy",
        "margin",
    ])
    .map_err(csv_err)?;
    for entry in &outcome.margins {
        for r in &entry.report.rows {
            w.write_record([
                entry.algorithm.name().to_string(),
                entry.baseline.name().to_string(),
                entry.weak.name().to_string(),
                r.label.to_string(),
                outcome.label_names[r.label].clone(),
                r.training_count.to_string(),
                r.baseline_accuracy.to_string(),
                r.approach_accuracy.to_string(),
                r.margin.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    finish_csv(w)
}

/// Writes `tables.<ext>`, `sweep.csv`, `margins.csv` and `notes.txt` into
/// `dir`, returning the written paths.
pub fn write_outputs(outcome: &ExperimentOutcome, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut tables = emit_tables(&outcome.tables, format)?;
    if format == ReportFormat::Text {
        tables.push('\n');
        tables.push_str(&footer(outcome));
    }
    let files = [
        (format!("tables.{}", format.extension()), tables),
        ("sweep.csv".to_string(), emit_sweep_csv(outcome)?),
        ("margins.csv".to_string(), emit_margins_csv(outcome)?),
        ("notes.txt".to_string(), footer(outcome)),
    ];
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content)?;
        written.push(path);
    }
    Ok(written)
}

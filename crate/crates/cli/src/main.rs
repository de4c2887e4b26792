use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boostbag::corpus::{self, save_sparse, Corpus};
use boostbag::error::StageExt;
use boostbag::harness::{self, ExperimentConfig, ReportFormat, SavedModel, WeakParams};
use boostbag::metrics::EvaluationReport;
use boostbag::multilabel::{self, Algorithm};
use boostbag::preprocess::{Pipeline, PipelineConfig};
use boostbag::seed::derive_seed;
use boostbag::weak_learners::WeakKind;
use boostbag::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "boostbag", version, about = "Multi-label text categorization with boosting and bagging")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic imbalanced corpus as CSV.
    Synth {
        /// `lapor` or `desk`.
        #[arg(long, default_value = "desk")]
        profile: String,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the text pipeline and write the sparse dataset and vocabulary.
    Preprocess {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the pipeline and one model, then save both to a model file.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Train on this many randomly chosen documents instead of all of them.
        #[arg(long)]
        train_count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Label raw text lines with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Text file, one document per line; stdin when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Score a saved model on a labelled corpus.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "text")]
        report: String,
    },
    /// Run an experiment grid from a TOML config and write its reports.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        features: Option<usize>,
        #[arg(long)]
        train_count: Option<usize>,
        /// Restrict the grid to these algorithms.
        #[arg(long, value_delimiter = ',')]
        algorithm: Vec<String>,
        /// Restrict the grid to these weak learners.
        #[arg(long, value_delimiter = ',')]
        weak: Vec<String>,
        #[arg(long, default_value = "text")]
        report: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct PipelineArgs {
    /// Number of features kept by information-gain selection.
    #[arg(long, default_value_t = 753)]
    features: usize,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    normalization: Option<PathBuf>,
}

impl PipelineArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            stopword_path: self.stopwords.clone(),
            normalization_lexicon_path: self.normalization.clone(),
            feature_count: self.features,
            ..PipelineConfig::default()
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    algorithm: String,
    #[arg(long)]
    weak: String,
    /// Boosting rounds or bagging members.
    #[arg(long, default_value_t = 20)]
    iterations: usize,
}

fn synth(profile: &str, instances: Option<usize>, seed: u64, out: &Path) -> Result<()> {
    let (profile, default_n) = harness::named_profile(profile)?;
    let corpus = corpus::generate_synthetic(&profile, instances.unwrap_or(default_n), seed)?;
    let file = fs::File::create(out)?;
    corpus::write_documents(&corpus, io::BufWriter::new(file))?;
    eprintln!("wrote {} documents with {} labels to {}", corpus.len(), corpus.space.len(), out.display());
    Ok(())
}

fn preprocess(corpus_path: &Path, pipeline: &PipelineArgs, out: &Path) -> Result<()> {
    let corpus = corpus::load_documents(corpus_path).stage("corpus")?;
    let (pipeline, dataset) = Pipeline::fit(&pipeline.config(), &corpus).stage("preprocess")?;
    fs::create_dir_all(out)?;
    save_sparse(&dataset, out.join("dataset.sparse"))?;
    let mut vocab = pipeline.vocabulary.terms().join("\n");
    vocab.push('\n');
    fs::write(out.join("vocabulary.txt"), vocab)?;
    eprintln!(
        "{} documents, {} of {} terms kept",
        dataset.n(),
        pipeline.dimension(),
        pipeline.full_dimension
    );
    Ok(())
}

fn training_documents(corpus: Corpus, train_count: Option<usize>, seed: u64) -> Result<Corpus> {
    match train_count {
        None => Ok(corpus),
        Some(n) => {
            let (train, _) = corpus::split_indices(corpus.len(), n, derive_seed(seed, 1))?;
            Ok(corpus.subset(&train))
        }
    }
}

fn train(
    corpus_path: &Path,
    model: &ModelArgs,
    pipeline: &PipelineArgs,
    train_count: Option<usize>,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let algorithm: Algorithm = model.algorithm.parse()?;
    let weak: WeakKind = model.weak.parse()?;
    if model.iterations == 0 {
        return Err(Error::Config("iterations must be >= 1".into()));
    }
    let spec = WeakParams::default().spec(weak, derive_seed(seed, 2));
    spec.validate()?;
    let corpus = corpus::load_documents(corpus_path).stage("corpus")?;
    let docs = training_documents(corpus, train_count, seed).stage("split")?;
    let (pipeline, data) = Pipeline::fit(&pipeline.config(), &docs).stage("preprocess")?;
    let model = multilabel::train(algorithm, &data, &spec, model.iterations, derive_seed(seed, 3)).stage("train")?;
    let size = model.ensemble_size();
    harness::save_model(&SavedModel { pipeline, model }, out)?;
    eprintln!("trained {algorithm} with {weak} ({size} rounds/members) on {} documents", data.n());
    Ok(())
}

fn predict(model_path: &Path, input: Option<&Path>) -> Result<()> {
    let saved = harness::load_model(model_path).stage("model")?;
    let reader: Box<dyn BufRead> = match input {
        Some(p) => Box::new(io::BufReader::new(fs::File::open(p)?)),
        None => Box::new(io::stdin().lock()),
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    for line in reader.lines() {
        let labels = saved.predict_text(&line?)?;
        writeln!(out, "{}", labels.join("|"))?;
    }
    out.flush()?;
    Ok(())
}

fn evaluate(model_path: &Path, corpus_path: &Path, format: ReportFormat) -> Result<()> {
    let saved = harness::load_model(model_path).stage("model")?;
    let corpus = corpus::load_documents(corpus_path).stage("corpus")?;
    let space = saved.model.space();
    // Map the corpus label names onto the model's label ids.
    let mut golds = Vec::with_capacity(corpus.len());
    for doc in &corpus.documents {
        let mut set = corpus::LabelSet::new();
        for l in doc.labels.iter() {
            let name = corpus.space.name(l);
            let id = space
                .id_of(name)
                .ok_or_else(|| Error::Validation(format!("label {name:?} is unknown to the model")))?;
            set.insert(id);
        }
        golds.push(set);
    }
    let preds: Vec<_> = corpus
        .documents
        .iter()
        .map(|d| saved.model.predict(&saved.pipeline.transform(&d.text)).map(|p| p.labels))
        .collect::<Result<_>>()
        .stage("evaluate")?;
    let report = EvaluationReport::evaluate(&preds, &golds, space.len()).stage("evaluate")?;
    let rows = [
        ("hamming_loss", report.hamming_loss),
        ("subset_accuracy", report.subset_accuracy),
        ("example_accuracy", report.example_accuracy),
        ("micro_precision", report.micro_precision),
        ("micro_recall", report.micro_recall),
        ("micro_f1", report.micro_f1),
    ];
    let mut out = String::new();
    match format {
        ReportFormat::Text => {
            for (name, v) in rows {
                out.push_str(&format!("{name:<18}{v:.4}\n"));
            }
        }
        ReportFormat::Csv => {
            out.push_str("metric,value\n");
            for (name, v) in rows {
                out.push_str(&format!("{name},{v}\n"));
            }
        }
        ReportFormat::Jsonl => {
            for (name, v) in rows {
                out.push_str(&format!("{{\"metric\":\"{name}\",\"value\":{v}}}\n"));
            }
        }
    }
    print!("{out}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    config_path: &Path,
    seed: Option<u64>,
    iterations: Option<usize>,
    features: Option<usize>,
    train_count: Option<usize>,
    algorithms: &[String],
    weak: &[String],
    format: ReportFormat,
    out: &Path,
) -> Result<()> {
    let mut config = ExperimentConfig::load(config_path)?;
    if let Some(s) = seed {
        config.master_seed = s;
    }
    if let Some(t) = iterations {
        config.iterations = t;
    }
    if let Some(k) = features {
        config.pipeline.feature_count = k;
    }
    if let Some(n) = train_count {
        config.split.train_count = n;
    }
    if !algorithms.is_empty() {
        config.algorithms = algorithms.iter().map(|a| a.parse()).collect::<Result<_>>()?;
    }
    if !weak.is_empty() {
        config.weak_kinds = weak.iter().map(|w| w.parse()).collect::<Result<_>>()?;
    }
    let outcome = harness::run_experiment(&config)?;
    let written = harness::write_outputs(&outcome, out, format)?;
    print!("{}", harness::emit_tables(&outcome.tables, ReportFormat::Text)?);
    print!("\n{}", harness::footer(&outcome));
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            profile,
            instances,
            seed,
            out,
        } => synth(&profile, instances, seed, &out),
        Command::Preprocess { corpus, pipeline, out } => preprocess(&corpus, &pipeline, &out),
        Command::Train {
            corpus,
            model,
            pipeline,
            train_count,
            seed,
            out,
        } => train(&corpus, &model, &pipeline, train_count, seed, &out),
        Command::Predict { model, input } => predict(&model, input.as_deref()),
        Command::Evaluate { model, corpus, report } => evaluate(&model, &corpus, report.parse()?),
        Command::Experiment {
            config,
            seed,
            iterations,
            features,
            train_count,
            algorithm,
            weak,
            report,
            out,
        } => experiment(
            &config,
            seed,
            iterations,
            features,
            train_count,
            &algorithm,
            &weak,
            report.parse()?,
            &out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

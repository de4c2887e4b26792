use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{self, Corpus, ImbalanceProfile};
use crate::error::{Error, Result};
use crate::multilabel::Algorithm;
use crate::preprocess::PipelineConfig;
use crate::seed::derive_seed;
use crate::weak_learners::{ForestParams, NaiveBayesParams, SmoParams, TreeParams, WeakKind, WeakSpec};

fn default_iterations() -> usize {
    20
}

/// Where documents come from: a CSV corpus, a named synthetic profile
/// (`lapor` or `desk`) or an inline profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub path: Option<PathBuf>,
    pub synthetic: Option<String>,
    pub profile: Option<ImbalanceProfile>,
    /// Number of synthetic documents; defaults to 5151 for `lapor` and 1500 for `desk`.
    pub instances: Option<usize>,
    /// Generator seed; derived from the master seed when absent.
    pub seed: Option<u64>,
}

impl CorpusConfig {
    fn validate(&self) -> Result<()> {
        let sources = [self.path.is_some(), self.synthetic.is_some(), self.profile.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if sources != 1 {
            return Err(Error::Config(
                "corpus needs exactly one of `path`, `synthetic` or `profile`".into(),
            ));
        }
        if let Some(name) = &self.synthetic {
            named_profile(name)?;
        }
        if self.profile.is_some() && self.instances.is_none() {
            return Err(Error::Config("an inline corpus profile needs `instances`".into()));
        }
        if self.path.is_some() && (self.instances.is_some() || self.seed.is_some()) {
            return Err(Error::Config(
                "`instances` and `seed` only apply to synthetic corpora".into(),
            ));
        }
        Ok(())
    }

    /// Loads or generates the corpus.
    pub fn load(&self, master_seed: u64) -> Result<Corpus> {
        self.validate()?;
        if let Some(path) = &self.path {
            return corpus::load_documents(path);
        }
        let (profile, default_n) = match (&self.synthetic, &self.profile) {
            (Some(name), _) => named_profile(name)?,
            (None, Some(p)) => (p.clone(), 0),
            (None, None) => unreachable!("validated above"),
        };
        let n = self.instances.unwrap_or(default_n);
        let seed = self.seed.unwrap_or_else(|| derive_seed(master_seed, 0));
        corpus::generate_synthetic(&profile, n, seed)
    }
}

/// Built-in profile and its default corpus size.
pub fn named_profile(name: &str) -> Result<(ImbalanceProfile, usize)> {
    match name {
        "lapor" => Ok((ImbalanceProfile::lapor(), 5151)),
        "desk" => Ok((ImbalanceProfile::desk(), 1500)),
        other => Err(Error::Config(format!(
            "unknown synthetic profile {other:?} (expected `lapor` or `desk`)"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub train_count: usize,
    /// Split seed; derived from the master seed when absent.
    pub seed: Option<u64>,
}

/// Hyperparameters of every weak learner kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeakParams {
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub naive_bayes: NaiveBayesParams,
    pub smo: SmoParams,
}

impl WeakParams {
    pub fn spec(&self, kind: WeakKind, seed: u64) -> WeakSpec {
        WeakSpec {
            kind,
            tree: self.tree.clone(),
            forest: self.forest.clone(),
            naive_bayes: self.naive_bayes.clone(),
            smo: self.smo.clone(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaggingSettings {
    pub vote_threshold: f64,
}

impl Default for BaggingSettings {
    fn default() -> Self {
        BaggingSettings { vote_threshold: 0.5 }
    }
}

/// One experiment: a corpus, a preprocessing pipeline, a split and the grid
/// of (algorithm, weak learner) pairs to train and evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub master_seed: u64,
    /// Boosting rounds and bagging members.
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    pub algorithms: Vec<Algorithm>,
    pub weak_kinds: Vec<WeakKind>,
    pub corpus: CorpusConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    pub split: SplitConfig,
    #[serde(default)]
    pub weak: WeakParams,
    #[serde(default)]
    pub bagging: BaggingSettings,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; relative resource paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = ExperimentConfig::from_toml(&text)?;
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        Ok(config)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        };
        fix(&mut self.corpus.path);
        fix(&mut self.pipeline.stopword_path);
        fix(&mut self.pipeline.normalization_lexicon_path);
        fix(&mut self.pipeline.stem_lexicon_path);
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("at least one algorithm is required".into()));
        }
        if self.weak_kinds.is_empty() {
            return Err(Error::Config("at least one weak learner is required".into()));
        }
        if self.iterations < 1 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        if !(self.bagging.vote_threshold > 0.0 && self.bagging.vote_threshold <= 1.0) {
            return Err(Error::Config("bagging vote_threshold must lie in (0, 1]".into()));
        }
        if self.split.train_count == 0 {
            return Err(Error::Config("split train_count must be >= 1".into()));
        }
        self.corpus.validate()?;
        self.pipeline.validate()?;
        for &kind in &self.weak_kinds {
            self.weak.spec(kind, 0).validate()?;
        }
        Ok(())
    }

    pub fn split_seed(&self) -> u64 {
        self.split.seed.unwrap_or_else(|| derive_seed(self.master_seed, 1))
    }

    pub fn weak_seed(&self) -> u64 {
        derive_seed(self.master_seed, 2)
    }

    pub fn bagging_seed(&self) -> u64 {
        derive_seed(self.master_seed, 3)
    }

    /// Algorithms in report column order, without duplicates.
    pub fn algorithm_order(&self) -> Vec<Algorithm> {
        Algorithm::ALL.into_iter().filter(|a| self.algorithms.contains(a)).collect()
    }

    /// Weak kinds in report row order, without duplicates.
    pub fn weak_order(&self) -> Vec<WeakKind> {
        WeakKind::ALL.into_iter().filter(|k| self.weak_kinds.contains(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
algorithms = ["br", "adaboost_mh"]
weak_kinds = ["tree"]

[corpus]
synthetic = "desk"

[split]
train_count = 1200
"#;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.iterations, 20);
        assert_eq!(c.pipeline.feature_count, 753);
        assert_eq!(c.algorithm_order(), vec![Algorithm::Br, Algorithm::AdaboostMh]);
        assert_eq!(c.weak.tree.pruning_cf, Some(0.25));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let typo = MINIMAL.replace("weak_kinds", "weak_kind");
        assert!(matches!(ExperimentConfig::from_toml(&typo), Err(Error::Config(_))));
        let nested = format!("{MINIMAL}\n[weak.smo]\nc = 2.0\ntolerence = 0.1\n");
        assert!(matches!(ExperimentConfig::from_toml(&nested), Err(Error::Config(_))));
    }

    #[test]
    fn empty_algorithm_set_is_a_configuration_error() {
        let empty = MINIMAL.replace(r#"["br", "adaboost_mh"]"#, "[]");
        assert!(matches!(ExperimentConfig::from_toml(&empty), Err(Error::Config(_))));
    }

    #[test]
    fn corpus_source_must_be_unique() {
        let both = MINIMAL.replace("synthetic = \"desk\"", "synthetic = \"desk\"\npath = \"x.csv\"");
        assert!(matches!(ExperimentConfig::from_toml(&both), Err(Error::Config(_))));
        let unknown = MINIMAL.replace("\"desk\"", "\"huge\"");
        assert!(matches!(ExperimentConfig::from_toml(&unknown), Err(Error::Config(_))));
    }

    #[test]
    fn hyperparameters_are_validated() {
        let bad = format!("{MINIMAL}\n[weak.tree]\npruning_cf = 0.9\n");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config(_))));
    }
}

//! Text preprocessing: tokenization, normalization, stopword removal,
//! stemming, vocabulary construction, binary vectorization and
//! information-gain feature selection.

mod feature_selection;
mod resources;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Instance, MultiLabelDataset, SparseBinaryVector};
use crate::error::{Error, Result};

pub use feature_selection::{information_gain, information_gains, select_features, FeatureSelection};
pub use resources::{load_lexicon, load_stopwords, parse_lexicon, parse_stopwords, Lexicon};


/// Splits on Unicode whitespace and trims non-alphanumeric characters from
/// both ends of each token.
pub fn tokenize(text: &str, lowercase: bool) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| raw.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
        .map(|t| if lowercase { t.to_lowercase() } else { t.to_string() })
        .collect()
}

/// Single-pass lexicon replacement (outputs are not looked up again).
pub fn normalize_tokens(tokens: Vec<String>, lexicon: &Lexicon) -> Vec<String> {
    tokens
        .into_iter()
        .map(|t| match lexicon.get(&t) {
            Some(formal) => formal.to_string(),
            None => t,
        })
        .collect()
}

pub fn remove_stopwords(tokens: Vec<String>, stopwords: &BTreeSet<String>) -> Vec<String> {
    tokens.into_iter().filter(|t| !stopwords.contains(t)).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StemmerKind {
    #[default]
    Identity,
    Lexicon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Stemmer {
    Identity,
    Lexicon(Lexicon),
}

impl Stemmer {
    pub fn new(kind: StemmerKind, lexicon: Option<Lexicon>) -> Result<Self> {
        match (kind, lexicon) {
            (StemmerKind::Identity, _) => Ok(Stemmer::Identity),
            (StemmerKind::Lexicon, Some(lex)) => Ok(Stemmer::Lexicon(lex)),
            (StemmerKind::Lexicon, None) => Err(Error::Config(
                "lexicon stemmer requires a stem lexicon file".into(),
            )),
        }
    }

    pub fn stem(&self, tokens: Vec<String>) -> Vec<String> {
        match self {
            Stemmer::Identity => tokens,
            Stemmer::Lexicon(lex) => normalize_tokens(tokens, lex),
        }
    }
}

/// Term to feature index, indices assigned in lexicographic term order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds from terms already in the desired index order.
    fn from_ordered(terms: Vec<String>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { terms, index }
    }

    pub fn dimension(&self) -> usize {
        self.terms.len()
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Vocabulary restricted to the selected original indices, re-indexed densely.
    pub fn restrict(&self, selection: &FeatureSelection) -> Vocabulary {
        Vocabulary::from_ordered(selection.selected.iter().map(|&i| self.terms[i].clone()).collect())
    }
}

impl From<Vec<String>> for Vocabulary {
    fn from(terms: Vec<String>) -> Self {
        Vocabulary::from_ordered(terms)
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.terms
    }
}

pub fn build_vocabulary<S: AsRef<str>>(token_lists: &[Vec<S>]) -> Vocabulary {
    let terms: BTreeSet<&str> = token_lists
        .iter()
        .flat_map(|toks| toks.iter().map(|t| t.as_ref()))
        .filter(|t| !t.is_empty())
        .collect();
    Vocabulary::from_ordered(terms.into_iter().map(str::to_string).collect())
}

/// Binary presence vector; out-of-vocabulary tokens are ignored.
pub fn vectorize<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> SparseBinaryVector {
    let indices: Vec<usize> = tokens.iter().filter_map(|t| vocab.get(t.as_ref())).collect();
    SparseBinaryVector::from_unsorted(indices, vocab.dimension())
        .expect("vocabulary indices are within its dimension")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub stopword_path: Option<PathBuf>,
    pub normalization_lexicon_path: Option<PathBuf>,
    pub stemmer: StemmerKind,
    pub stem_lexicon_path: Option<PathBuf>,
    /// Number of features kept by information-gain selection.
    pub feature_count: usize,
    pub lowercase: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            stopword_path: None,
            normalization_lexicon_path: None,
            stemmer: StemmerKind::Identity,
            stem_lexicon_path: None,
            feature_count: 753,
            lowercase: true,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.feature_count == 0 {
            return Err(Error::Config("feature count must be >= 1".into()));
        }
        if self.stemmer == StemmerKind::Lexicon && self.stem_lexicon_path.is_none() {
            return Err(Error::Config(
                "lexicon stemmer requires a stem lexicon file".into(),
            ));
        }
        Ok(())
    }
}

/// Fitted text-to-vector transform. Carries its lexicons so prediction on raw
/// text needs no side files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub lowercase: bool,
    pub normalization: Lexicon,
    pub stopwords: BTreeSet<String>,
    pub stemmer: Stemmer,
    /// Full training vocabulary before selection.
    pub full_dimension: usize,
    pub selection: FeatureSelection,
    /// Selected terms, indexed by reduced feature id.
    pub vocabulary: Vocabulary,
    /// SHA-256 of each resource's canonical content.
    pub resource_hashes: BTreeMap<String, String>,
}

impl Pipeline {
    /// Loads the configured resource files and fits on `train`.
    pub fn fit(config: &PipelineConfig, train: &Corpus) -> Result<(Pipeline, MultiLabelDataset)> {
        config.validate()?;
        let normalization = match &config.normalization_lexicon_path {
            Some(p) => load_lexicon(p)?,
            None => Lexicon::default(),
        };
        let stopwords = match &config.stopword_path {
            Some(p) => load_stopwords(p)?,
            None => BTreeSet::new(),
        };
        let stem_lexicon = match &config.stem_lexicon_path {
            Some(p) => Some(load_lexicon(p)?),
            None => None,
        };
        let stemmer = Stemmer::new(config.stemmer, stem_lexicon)?;
        Pipeline::fit_with(
            config.lowercase,
            normalization,
            stopwords,
            stemmer,
            config.feature_count,
            train,
        )
    }

    pub fn fit_with(
        lowercase: bool,
        normalization: Lexicon,
        stopwords: BTreeSet<String>,
        stemmer: Stemmer,
        feature_count: usize,
        train: &Corpus,
    ) -> Result<(Pipeline, MultiLabelDataset)> {
        let mut resource_hashes = BTreeMap::new();
        resource_hashes.insert("normalization".to_string(), normalization.content_hash());
        resource_hashes.insert("stopwords".to_string(), resources::stopword_hash(&stopwords));
        resource_hashes.insert(
            "stem".to_string(),
            match &stemmer {
                Stemmer::Identity => resources::EMPTY_HASH.to_string(),
                Stemmer::Lexicon(lex) => lex.content_hash(),
            },
        );
        let mut pipeline = Pipeline {
            lowercase,
            normalization,
            stopwords,
            stemmer,
            full_dimension: 0,
            selection: FeatureSelection {
                selected: Vec::new(),
                scores: Vec::new(),
                original_dimension: 0,
            },
            vocabulary: Vocabulary::from_ordered(Vec::new()),
            resource_hashes,
        };

        let token_lists: Vec<Vec<String>> =
            train.documents.iter().map(|d| pipeline.tokens(&d.text)).collect();
        let full_vocab = build_vocabulary(&token_lists);
        let instances = token_lists
            .iter()
            .zip(&train.documents)
            .map(|(toks, doc)| Instance {
                vector: vectorize(toks, &full_vocab),
                labels: doc.labels.clone(),
            })
            .collect();
        let full = MultiLabelDataset::new(train.space.clone(), full_vocab.dimension(), instances)?;
        let (selection, reduced) = select_features(&full, feature_count)?;

        pipeline.full_dimension = full_vocab.dimension();
        pipeline.vocabulary = full_vocab.restrict(&selection);
        pipeline.selection = selection;
        Ok((pipeline, reduced))
    }

    /// Tokens after normalization, stopword removal and stemming.
    pub fn tokens(&self, text: &str) -> Vec<String> {
        let toks = tokenize(text, self.lowercase);
        let toks = normalize_tokens(toks, &self.normalization);
        let toks = remove_stopwords(toks, &self.stopwords);
        self.stemmer.stem(toks)
    }

    pub fn dimension(&self) -> usize {
        self.vocabulary.dimension()
    }

    pub fn transform(&self, text: &str) -> SparseBinaryVector {
        vectorize(&self.tokens(text), &self.vocabulary)
    }

    pub fn transform_corpus(&self, corpus: &Corpus) -> Result<MultiLabelDataset> {
        let instances = corpus
            .documents
            .iter()
            .map(|d| Instance {
                vector: self.transform(&d.text),
                labels: d.labels.clone(),
            })
            .collect();
        MultiLabelDataset::new(corpus.space.clone(), self.dimension(), instances)
    }
}

//! Multi-label text categorization for imbalanced corpora.
//!
//! The crate is organised along the processing pipeline:
//!
//! - [`corpus`]: documents, label spaces, sparse binary datasets, splitting,
//!   imbalance statistics and a synthetic imbalanced-corpus generator.
//! - [`preprocess`]: tokenization, normalization, stopword removal, stemming,
//!   binary vectorization and information-gain feature selection.
//! - [`weak_learners`]: decision stump, pruned decision tree, random forest,
//!   Bernoulli naive Bayes and a linear SMO-trained SVM, all trained on
//!   weighted binary data.
//! - [`multilabel`]: Binary Relevance, Label Powerset, AdaBoost.MH and
//!   bagging ensembles over either transformation.
//! - [`metrics`]: hamming loss, subset accuracy, example-based accuracy,
//!   micro-averaged precision/recall/F1 and per-label accuracy margins.
//! - [`harness`]: experiment configuration, the experiment grid, report
//!   emitters and model persistence.

pub mod corpus;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod multilabel;
pub mod preprocess;
pub mod seed;
pub mod weak_learners;

pub use error::{Error, Result};

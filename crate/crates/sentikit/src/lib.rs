//! sentikit: an Indonesian sentiment-classification toolkit built from scratch.
//!
//! The crate covers the full desk-scale pipeline for three-class sentiment
//! analysis of informal Indonesian text (app-store reviews and the like):
//!
//! - [`corpus`] — semicolon-CSV ingestion, class statistics, stratified
//!   splits and k-folds
//! - [`preprocess`] — seven-stage text normalization (case folding, cleanup,
//!   tokenization, slang normalization, stopword removal, stemming,
//!   truncation)
//! - [`stemmer`] — confix-stripping morphological stemmer with a vendored
//!   root dictionary
//! - [`features`] — TF-IDF sparse vectors and padded integer sequences
//! - [`classifiers`] — multinomial Naive Bayes, softmax Logistic Regression,
//!   and Random Forest over sparse TF-IDF input
//! - [`lstm`] — a compact embedding + LSTM + softmax classifier with
//!   hand-written backpropagation through time and Adam
//! - [`eval`] — confusion matrices, per-class and weighted metrics,
//!   leaderboards, cross-validation aggregation
//! - [`model_file`] — a single-file binary container for trained models
//! - [`synth`] — deterministic synthetic review corpus generator
//!
//! Everything is deterministic under a fixed seed: randomness comes from the
//! small generator in [`rng`], training is sequential with fixed reduction
//! order, and serialization is byte-stable.

pub mod classifiers;
pub mod corpus;
pub mod data;
pub mod error;
pub mod eval;
pub mod features;
pub mod lstm;
pub mod model_file;
pub mod preprocess;
pub mod rng;
pub mod stemmer;
pub mod synth;

pub use error::{Error, Result};

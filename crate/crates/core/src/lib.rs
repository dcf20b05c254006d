//! Social bot scoring.
//!
//! An account snapshot (profile metadata, recent tweets, recent mentions) is
//! turned into a named feature vector spanning six feature classes, scored by
//! a suite of seven random forests (one per class plus one over every
//! feature), and served over a rate-limited HTTP API whose results are kept
//! in an append-only score log.

pub mod account;
pub mod cli;
pub mod evaluation;
pub mod features;
pub mod forest;
pub mod ingest;
pub mod service;
pub mod stats;
pub mod store;

mod digest;

pub use account::{parse_snapshot, AccountSnapshot, ContactMeta, Tweet, UserMeta};
pub use features::{extract_all, FeatureClass, FeatureRegistry, FeatureVector, SentimentLexicons};
pub use forest::{ForestModel, ForestParams, ScoreSuiteModel, Scores};
pub use stats::MISSING;

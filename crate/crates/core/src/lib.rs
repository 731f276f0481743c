//! Trend analytics over dated text corpora.
//!
//! The crate follows the shape of a batch pipeline:
//!
//! * [`corpus`] ingests line-delimited article dumps, filters them by keyword,
//!   removes duplicates and buckets them by calendar month.
//! * [`text`] tokenizes and builds vocabularies / bag-of-words documents.
//! * [`topic`] fits LDA by collapsed Gibbs sampling, scores NPMI coherence and
//!   picks the topic count with the first-peak rule.
//! * [`terms`] extracts candidate terms per topic and keeps the ones whose
//!   termhood against a general corpus is above 2.
//! * [`category`] holds the 16 security-category corpora and turns documents
//!   into relevance profiles with dominant categories.
//! * [`trend`] aggregates profiles into popularity, monthly impact series,
//!   a co-occurrence graph and the dominant-count distribution.
//! * [`stats`] has the statistical tests run on those series.

pub mod category;
pub mod corpus;
mod error;
pub mod stats;
pub mod terms;
pub mod text;
pub mod topic;
pub mod trend;

pub use error::{Error, Result};

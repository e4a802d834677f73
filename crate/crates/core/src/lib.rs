//! Reference-based fractional subject classification of papers.
//!
//! Papers are assigned up to five weighted categories of a journal-level
//! category scheme using the journals of the papers they cite (and of the
//! papers those cite). The [`metrics`] module evaluates classifications
//! against each other and against a gold standard; [`synthgen`] produces
//! deterministic synthetic corpora with planted structure.

pub mod classifier;
pub mod cli;
pub mod corpus;
mod csvio;
pub mod error;
pub mod metrics;
pub mod scheme;
pub mod synthgen;
pub mod types;

pub use classifier::{
    asjc_baseline, classify_corpus, default_grid, generation_share, reference_contribution,
    select_categories, Classification, ClassificationConfig, Classifier, Counting,
    GenerationScheme, Method, PaperAssignment, ShareOutcome, Source,
};
pub use corpus::{ActiveCounts, Corpus, CorpusBuilder, JournalRecord, PaperRecord};
pub use error::{Error, Result};
pub use scheme::{CategoryScheme, CategoryVector};
pub use types::{AreaCode, CategoryCode, JournalId, PaperId};

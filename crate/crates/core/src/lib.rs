//! Privacy-leakage measurement for social media timelines.
//!
//! - [`deanon`] ranks candidate authors of anonymous posts with smoothed
//!   unigram language models.
//! - [`ensemble`] and [`infoscore`] score how much a single post reveals
//!   for a venue-visit inference task.
//! - [`activesim`] grows truncated timelines post by post, randomly or by
//!   informativeness, and measures how fast a classifier catches up.

pub mod activesim;
pub mod corpus;
pub mod deanon;
pub mod ensemble;
pub mod error;
pub mod infoscore;
pub mod seed;
pub mod textproc;

pub use corpus::{Corpus, Platform, Post, SyntheticConfig, Timeline};
pub use ensemble::{BoostParams, BoostedEnsemble, FeatureImportance, TreeNode};
pub use error::{Error, Result};
pub use infoscore::{informativeness, novelty, relevance, InfoParams, ScoreBreakdown};
pub use textproc::{CurationPolicy, TermVector, TfIdfModel, Vocabulary};

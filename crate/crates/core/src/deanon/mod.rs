//! Author ranking with smoothed unigram language models.

mod condition;
mod experiment;
mod model;

pub use condition::{Condition, TRAIN_FRACTION};
pub use experiment::{
    evaluate_cell, run_deanon_experiment, DeanonRow, DeanonRun, DeanonTable, ANON_POSTS_GRID, CSV_HEADER, DEFAULT_RUNS,
    POSTS_SEEN_GRID,
};
pub use model::{
    best_user, fit_index, fit_index_keyed, log_likelihood, rank_users, DeanonIndex, Query, UserLanguageModel, DEFAULT_DELTA,
};

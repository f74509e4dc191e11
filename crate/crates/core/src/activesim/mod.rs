//! Iterative timeline reveal with random or informativeness-driven post
//! selection, learning-curve aggregation and the experiments built on them.

mod curve;
mod dataset;
mod experiment;
mod select;

pub use curve::{aggregate_curves, classify_slope, pad_sequences, LearningCurve, SlopeClass, SlopeThresholds};
pub use dataset::{UserTimeline, VenueDataset, TEXT_PLATFORMS};
pub use experiment::{
    classify_curves, comparison_csv, curves_csv, default_lambda_grid, fit_all_venues, lambda_sweep, learning_curves,
    mention_frequency, mentions_venue, simulate_venue, slopes_csv, slopes_svg, truncated_vs_full, ComparisonRow, SlopeRow,
    SweepRow, SweepTable, VenueModels, COMPARISON_CSV_HEADER, CURVE_CSV_HEADER, SLOPE_CSV_HEADER, SWEEP_CSV_HEADER,
};
pub use select::{
    active_score, reveal_next, simulate_user, Policy, RunConfig, SimTrace, TruncatedState, DEFAULT_BUDGET, DEFAULT_FOLDS,
};

//! Posts, timelines, and corpora: ingestion, train/test sourcing, venue
//! labels, and a synthetic generator with planted venue signal.

mod io;
mod labels;
mod mixing;
mod model;
pub mod synthetic;

pub use io::{load_corpus, parse_venues, read_corpus, save_corpus_dir, write_corpus, CORPUS_FILE, VENUES_FILE};
pub use labels::{derive_venue_labels, select_venue_categories, strip_mentions, VenueLabels};
pub use mixing::{mix_from_pools, mix_training_sources, mixing_quotas, sample, MixedTimeline};
pub use model::{Corpus, Platform, Post, Timeline, UserRecord};
pub use synthetic::{generate_synthetic, generate_synthetic_with_truth, GroundTruth, SyntheticConfig};

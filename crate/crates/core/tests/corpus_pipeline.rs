use std::collections::BTreeSet;

use leakscope_core::corpus::synthetic::{generate_synthetic_with_truth, CountRange, GroundTruth, SyntheticConfig};
use leakscope_core::corpus::{derive_venue_labels, read_corpus, select_venue_categories, write_corpus};
use leakscope_core::textproc::{tokenize, CurationPolicy};
use leakscope_core::{Corpus, Platform};

/// Chi-square critical value for one degree of freedom at p = 0.01.
const CHI2_CRIT_1DF_001: f64 = 6.634896601021214;

/// Twitter posts tallied by (visitor of the category, post contains one
/// of its markers), pooled over categories.
fn marker_table(corpus: &Corpus, truth: &GroundTruth) -> [[f64; 2]; 2] {
    let policy = CurationPolicy::raw();
    let mut table = [[0.0; 2]; 2];
    for user in corpus.users() {
        for post in user.posts(Platform::Twitter) {
            let tokens: BTreeSet<String> = tokenize(&post.text, &policy).into_iter().collect();
            for (category, markers) in &truth.markers {
                let visitor = truth.visited(&user.user_id, category) as usize;
                let has = markers.iter().any(|m| tokens.contains(m)) as usize;
                table[visitor][has] += 1.0;
            }
        }
    }
    table
}

fn chi_square(t: &[[f64; 2]; 2]) -> f64 {
    let total: f64 = t.iter().flatten().sum();
    let mut stat = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let expected = (t[r][0] + t[r][1]) * (t[0][c] + t[1][c]) / total;
            stat += (t[r][c] - expected).powi(2) / expected;
        }
    }
    stat
}

fn marker_rate(row: [f64; 2]) -> f64 {
    row[1] / (row[0] + row[1])
}

#[test]
fn zero_affinity_markers_are_independent_of_visits() {
    let cfg = SyntheticConfig {
        twitter_posts: CountRange::new(200, 240),
        venue_affinity_strength: 0.0,
        // enough background markers for the test to have power
        background_marker_rate: 0.01,
        seed: 21,
        ..SyntheticConfig::default()
    };
    let (corpus, truth) = generate_synthetic_with_truth(&cfg).unwrap();
    assert!(corpus.post_count(Platform::Twitter) >= 10_000);
    let table = marker_table(&corpus, &truth);
    assert!(table[0][1] > 50.0 && table[1][1] > 50.0, "{table:?}");
    let stat = chi_square(&table);
    assert!(stat < CHI2_CRIT_1DF_001, "chi2 = {stat}, table {table:?}");
}

#[test]
fn planted_affinity_raises_marker_rate_among_visitors() {
    let cfg = SyntheticConfig {
        twitter_posts: CountRange::new(200, 240),
        ..SyntheticConfig::default()
    };
    assert_eq!((cfg.num_users, cfg.venue_affinity_strength), (50, 0.8));
    let (corpus, truth) = generate_synthetic_with_truth(&cfg).unwrap();
    let table = marker_table(&corpus, &truth);
    assert!(marker_rate(table[1]) > marker_rate(table[0]), "{table:?}");
    assert!(chi_square(&table) > CHI2_CRIT_1DF_001);
}

#[test]
fn checkin_labels_equal_sampled_visits() {
    let (corpus, truth) = generate_synthetic_with_truth(&SyntheticConfig {
        twitter_posts: CountRange::new(20, 30),
        ..SyntheticConfig::default()
    })
    .unwrap();
    let labels = derive_venue_labels(&corpus);
    let positives: BTreeSet<(String, String)> = labels.iter().filter(|(_, &v)| v).map(|(k, _)| k.clone()).collect();
    assert_eq!(positives, truth.visits);
    assert_eq!(labels.categories(), corpus.venue_taxonomy());
    assert_eq!(labels.users().len(), 50);
}

#[test]
fn band_selection_matches_direct_count() {
    let (corpus, _) = generate_synthetic_with_truth(&SyntheticConfig {
        twitter_posts: CountRange::new(20, 30),
        ..SyntheticConfig::default()
    })
    .unwrap();
    let labels = derive_venue_labels(&corpus);
    let mut want = Vec::new();
    for category in corpus.venue_taxonomy() {
        let visitors: BTreeSet<&str> = corpus
            .posts()
            .filter(|p| p.venue_category.as_deref() == Some(category))
            .map(|p| p.user_id.as_str())
            .collect();
        let frac = visitors.len() as f64 / corpus.num_users() as f64;
        if (0.25..=0.35).contains(&frac) {
            want.push(category.clone());
        }
    }
    assert_eq!(select_venue_categories(&labels, 0.25, 0.35), want);
}

#[test]
fn corpus_survives_jsonl_round_trip() {
    let (corpus, _) = generate_synthetic_with_truth(&SyntheticConfig {
        num_users: 10,
        twitter_posts: CountRange::new(20, 30),
        ..SyntheticConfig::default()
    })
    .unwrap();
    let mut bytes = Vec::new();
    write_corpus(&corpus, &mut bytes).unwrap();
    let back = read_corpus(&bytes[..]).unwrap();
    assert_eq!(back.num_users(), corpus.num_users());
    assert!(back.posts().eq(corpus.posts()));
    let mut again = Vec::new();
    write_corpus(&back, &mut again).unwrap();
    assert_eq!(bytes, again);
}

#[test]
fn curated_tokens_drop_stopwords_mentions_and_links() {
    let tokens = tokenize("Heading to the gym @maria!! http://t.co/xyz #Fitness", &CurationPolicy::curated());
    assert_eq!(tokens, ["heading", "gym", "fitness"]);
}

use std::collections::{BTreeMap, BTreeSet};

use super::model::{Corpus, Platform};

/// Binary venue-visit labels for every (user, category) pair in a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VenueLabels {
    labels: BTreeMap<(String, String), bool>,
    users: BTreeSet<String>,
    categories: BTreeSet<String>,
}

impl VenueLabels {
    pub fn get(&self, user_id: &str, category: &str) -> bool {
        self.labels
            .get(&(user_id.to_owned(), category.to_owned()))
            .copied()
            .unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &bool)> {
        self.labels.iter()
    }

    pub fn categories(&self) -> &BTreeSet<String> {
        &self.categories
    }

    pub fn users(&self) -> &BTreeSet<String> {
        &self.users
    }

    pub fn visitors(&self, category: &str) -> usize {
        self.users.iter().filter(|u| self.get(u, category)).count()
    }

    /// Fraction of the user population with at least one check-in.
    pub fn visit_fraction(&self, category: &str) -> f64 {
        if self.users.is_empty() {
            0.0
        } else {
            self.visitors(category) as f64 / self.users.len() as f64
        }
    }
}

/// A user is labelled as visiting a category iff they have at least one
/// check-in there. Categories are flat names.
pub fn derive_venue_labels(corpus: &Corpus) -> VenueLabels {
    let categories: BTreeSet<String> = corpus
        .venue_taxonomy()
        .iter()
        .cloned()
        .chain(
            corpus
                .posts()
                .filter_map(|p| p.venue_category.clone()),
        )
        .collect();
    let mut labels = BTreeMap::new();
    let mut users = BTreeSet::new();
    for user in corpus.users() {
        users.insert(user.user_id.clone());
        let visited: BTreeSet<&str> = user
            .posts(Platform::Foursquare)
            .iter()
            .filter_map(|p| p.venue_category.as_deref())
            .collect();
        for cat in &categories {
            labels.insert(
                (user.user_id.clone(), cat.clone()),
                visited.contains(cat.as_str()),
            );
        }
    }
    VenueLabels {
        labels,
        users,
        categories,
    }
}

/// Categories whose visitor fraction lies in `[min_frac, max_frac]`, sorted
/// by name. Categories nobody visited are never returned.
pub fn select_venue_categories(labels: &VenueLabels, min_frac: f64, max_frac: f64) -> Vec<String> {
    assert!(
        (0.0..=1.0).contains(&min_frac) && (0.0..=1.0).contains(&max_frac) && min_frac < max_frac,
        "invalid fraction band [{min_frac}, {max_frac}]"
    );
    labels
        .categories()
        .iter()
        .filter(|c| {
            let visitors = labels.visitors(c);
            let frac = labels.visit_fraction(c);
            visitors > 0 && frac >= min_frac && frac <= max_frac
        })
        .cloned()
        .collect()
}

/// Removes `@`-prefixed tokens and collapses whitespace.
pub fn strip_mentions(text: &str) -> String {
    text.split_whitespace()
        .filter(|tok| !tok.starts_with('@'))
        .collect::<Vec<_>>()
        .join(" ")
}

//! Synthetic cross-platform corpus with planted venue signal.
//!
//! Generative model:
//! * every category owns two disjoint marker terms (its slug and a pseudo-word);
//! * each user draws a topic mixture plus a small idiolect of favourite words;
//! * each platform blends the user's distribution with platform-specific noise,
//!   weighted by `cross_platform_consistency`;
//! * a user visits category `c` with probability `visit_rate(c)`; visitors
//!   mention `c`'s markers in text posts at a rate scaled by
//!   `venue_affinity_strength`;
//! * Foursquare check-ins record exactly the sampled visits.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::model::{Corpus, Platform, Post};
use crate::error::{Error, Result};

const CATEGORY_NAMES: [&str; 30] = [
    "Brewery", "Resort", "Gym", "Stadium", "Museum", "Bakery", "Library", "Zoo", "Casino", "Spa",
    "Aquarium", "Theater", "Marina", "Vineyard", "Arcade", "Campground", "Observatory", "Planetarium",
    "Bowling Alley", "Karaoke Bar", "Golf Course", "Ski Area", "Night Club", "Farmers Market",
    "Climbing Gym", "Tea Room", "Hot Spring", "Record Shop", "Dog Run", "Skate Park",
];

const FUNCTION_WORDS: [&str; 16] = [
    "the", "a", "to", "and", "i", "my", "is", "in", "of", "so", "at", "it", "for", "on", "with", "just",
];

const CONSONANTS: &[u8] = b"bdfghklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

const EPOCH_START: i64 = 1_400_000_000;
const EPOCH_SPAN: i64 = 2 * 365 * 24 * 3600;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

impl CountRange {
    pub const fn new(min: usize, max: usize) -> Self {
        CountRange { min, max }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        rng.random_range(self.min..=self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub num_users: usize,
    /// Content terms, marker terms included.
    pub vocab_size: usize,
    pub num_topics: usize,
    pub num_venue_categories: usize,
    pub twitter_posts: CountRange,
    pub instagram_posts: CountRange,
    pub foursquare_posts: CountRange,
    pub words_per_post: CountRange,
    pub venue_affinity_strength: f64,
    pub cross_platform_consistency: f64,
    /// Visit probabilities are spaced evenly over this interval across the
    /// categories (in name order).
    pub visit_rate_min: f64,
    pub visit_rate_max: f64,
    /// Per-post probability that a visitor at full affinity mentions a marker.
    pub mention_rate: f64,
    /// Per-category multipliers on `mention_rate`, spaced over this interval
    /// and assigned in shuffled order.
    pub category_strength_min: f64,
    pub category_strength_max: f64,
    /// Per-word probability of emitting a random marker regardless of visits.
    pub background_marker_rate: f64,
    /// Weight of the user's idiolect in their word distribution.
    pub idiolect_strength: f64,
    pub idiolect_size: usize,
    pub function_word_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            num_users: 50,
            vocab_size: 1500,
            num_topics: 8,
            num_venue_categories: 10,
            twitter_posts: CountRange::new(1250, 1600),
            instagram_posts: CountRange::new(40, 80),
            foursquare_posts: CountRange::new(30, 60),
            words_per_post: CountRange::new(6, 14),
            venue_affinity_strength: 0.8,
            cross_platform_consistency: 0.7,
            visit_rate_min: 0.15,
            visit_rate_max: 0.45,
            mention_rate: 0.05,
            category_strength_min: 0.25,
            category_strength_max: 1.5,
            background_marker_rate: 0.0005,
            idiolect_strength: 0.04,
            idiolect_size: 25,
            function_word_rate: 0.15,
            seed: 1,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.num_users == 0 || self.num_topics == 0 || self.num_venue_categories == 0 {
            return bad("num_users, num_topics and num_venue_categories must be positive".into());
        }
        if self.vocab_size < self.num_venue_categories * 2 {
            return bad(format!(
                "vocab_size {} cannot hold two marker terms for each of {} categories",
                self.vocab_size, self.num_venue_categories
            ));
        }
        for (name, r) in [
            ("twitter_posts", self.twitter_posts),
            ("instagram_posts", self.instagram_posts),
            ("foursquare_posts", self.foursquare_posts),
            ("words_per_post", self.words_per_post),
        ] {
            if r.min > r.max {
                return bad(format!("{name}: empty range {}..={}", r.min, r.max));
            }
        }
        if self.words_per_post.min == 0 {
            return bad("words_per_post must be at least 1".into());
        }
        for (name, v) in [
            ("venue_affinity_strength", self.venue_affinity_strength),
            ("cross_platform_consistency", self.cross_platform_consistency),
            ("visit_rate_min", self.visit_rate_min),
            ("visit_rate_max", self.visit_rate_max),
            ("mention_rate", self.mention_rate),
            ("background_marker_rate", self.background_marker_rate),
            ("idiolect_strength", self.idiolect_strength),
            ("function_word_rate", self.function_word_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if self.visit_rate_min > self.visit_rate_max {
            return bad("visit_rate_min exceeds visit_rate_max".into());
        }
        if self.category_strength_min < 0.0 || self.category_strength_min > self.category_strength_max {
            return bad("invalid category strength interval".into());
        }
        Ok(())
    }

    pub fn visit_rate(&self, category_index: usize) -> f64 {
        spaced(self.visit_rate_min, self.visit_rate_max, category_index, self.num_venue_categories)
    }
}

fn spaced(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        (lo + hi) / 2.0
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// What the generator planted, for verification.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// `(user_id, category)` pairs with at least one sampled visit.
    pub visits: BTreeSet<(String, String)>,
    pub markers: BTreeMap<String, [String; 2]>,
    pub category_strength: BTreeMap<String, f64>,
}

impl GroundTruth {
    pub fn visited(&self, user: &str, category: &str) -> bool {
        self.visits.contains(&(user.to_owned(), category.to_owned()))
    }

    pub fn is_marker(&self, term: &str) -> bool {
        self.markers.values().any(|m| m.iter().any(|t| t == term))
    }
}

pub fn generate_synthetic(config: &SyntheticConfig) -> Result<Corpus> {
    generate_synthetic_with_truth(config).map(|(c, _)| c)
}

pub fn category_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match CATEGORY_NAMES.get(i) {
            Some(name) => (*name).to_owned(),
            None => format!("Category {}", i + 1),
        })
        .collect()
}

/// Lowercase alphanumeric form of a category name, used as its first marker.
pub fn category_slug(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

struct WordTable {
    cumulative: Vec<f64>,
}

impl WordTable {
    fn new(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        WordTable { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty table");
        let x = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}

fn pseudo_words<R: Rng>(n: usize, reserved: &BTreeSet<String>, rng: &mut R) -> Vec<String> {
    let mut seen = reserved.clone();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.random_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push(*CONSONANTS.choose(rng).unwrap() as char);
            w.push(*VOWELS.choose(rng).unwrap() as char);
        }
        if rng.random_bool(0.3) {
            w.push(*CONSONANTS.choose(rng).unwrap() as char);
        }
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn dirichlet<R: Rng>(k: usize, concentration: f64, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    let mut v: Vec<f64> = (0..k).map(|_| gamma.sample(rng).max(1e-12)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// One user-level word distribution over background words.
fn user_distribution<R: Rng>(
    topics: &[Vec<f64>],
    num_words: usize,
    config: &SyntheticConfig,
    rng: &mut R,
) -> Vec<f64> {
    let mix = dirichlet(topics.len(), 0.5, rng);
    let mut dist = vec![0.0; num_words];
    for (topic, weight) in topics.iter().zip(&mix) {
        for (d, t) in dist.iter_mut().zip(topic) {
            *d += (1.0 - config.idiolect_strength) * weight * t;
        }
    }
    let size = config.idiolect_size.min(num_words).max(1);
    let idiolect = rand::seq::index::sample(rng, num_words, size);
    for w in idiolect.iter() {
        dist[w] += config.idiolect_strength / size as f64;
    }
    dist
}

struct UserPlan {
    id: String,
    tables: BTreeMap<Platform, WordTable>,
    /// Visited categories with their propensity.
    visits: Vec<(usize, f64)>,
}

pub fn generate_synthetic_with_truth(config: &SyntheticConfig) -> Result<(Corpus, GroundTruth)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let categories = category_names(config.num_venue_categories);
    let slugs: Vec<String> = categories.iter().map(|c| category_slug(c)).collect();
    let mut reserved: BTreeSet<String> = slugs.iter().cloned().collect();
    reserved.extend(FUNCTION_WORDS.iter().map(|w| w.to_string()));
    let second_markers = pseudo_words(categories.len(), &reserved, &mut rng);
    reserved.extend(second_markers.iter().cloned());
    let markers: Vec<[String; 2]> = slugs
        .iter()
        .cloned()
        .zip(second_markers)
        .map(|(a, b)| [a, b])
        .collect();
    let num_background = config.vocab_size - 2 * categories.len();
    let background = pseudo_words(num_background, &reserved, &mut rng);

    let mut strengths: Vec<f64> = (0..categories.len())
        .map(|i| spaced(config.category_strength_min, config.category_strength_max, i, categories.len()))
        .collect();
    strengths.shuffle(&mut rng);

    let topics: Vec<Vec<f64>> = (0..config.num_topics)
        .map(|_| {
            let mut order: Vec<usize> = (0..num_background).collect();
            order.shuffle(&mut rng);
            let mut weights = vec![0.0; num_background];
            for (rank, &w) in order.iter().enumerate() {
                weights[w] = 1.0 / (rank as f64 + 1.0);
            }
            let s: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|x| *x /= s);
            weights
        })
        .collect();

    let c = config.cross_platform_consistency;
    let mut plans = Vec::with_capacity(config.num_users);
    for u in 0..config.num_users {
        let id = format!("u{:04}", u + 1);
        let mut tables = BTreeMap::new();
        if num_background > 0 {
            let base = user_distribution(&topics, num_background, config, &mut rng);
            for platform in Platform::ALL {
                let noise = user_distribution(&topics, num_background, config, &mut rng);
                let blended: Vec<f64> = base.iter().zip(&noise).map(|(b, n)| c * b + (1.0 - c) * n).collect();
                tables.insert(platform, WordTable::new(&blended));
            }
        }
        let mut visits: Vec<(usize, f64)> = Vec::new();
        for ci in 0..categories.len() {
            if rng.random_bool(config.visit_rate(ci)) {
                visits.push((ci, rng.random_range(0.5..1.5)));
            }
        }
        if visits.is_empty() {
            let most_popular = categories.len() - 1;
            visits.push((most_popular, rng.random_range(0.5..1.5)));
        }
        plans.push(UserPlan { id, tables, visits });
    }

    let all_markers: Vec<&str> = markers.iter().flat_map(|m| m.iter().map(String::as_str)).collect();
    let user_ids: Vec<String> = plans.iter().map(|p| p.id.clone()).collect();
    let mut posts = Vec::new();
    let mut truth_visits = BTreeSet::new();

    for plan in &plans {
        let word = |platform: Platform, rng: &mut ChaCha8Rng| -> String {
            if rng.random_bool(config.background_marker_rate) || num_background == 0 {
                return all_markers.choose(rng).unwrap().to_string();
            }
            if rng.random_bool(config.function_word_rate) {
                return FUNCTION_WORDS.choose(rng).unwrap().to_string();
            }
            background[plan.tables[&platform].sample(rng)].clone()
        };

        for platform in [Platform::Twitter, Platform::Instagram] {
            let range = match platform {
                Platform::Twitter => config.twitter_posts,
                _ => config.instagram_posts,
            };
            let n = range.sample(&mut rng);
            let mut stamps: Vec<i64> = (0..n).map(|_| EPOCH_START + rng.random_range(0..EPOCH_SPAN)).collect();
            stamps.sort_unstable();
            for (i, ts) in stamps.into_iter().enumerate() {
                let len = config.words_per_post.sample(&mut rng);
                let mut words: Vec<String> = (0..len).map(|_| word(platform, &mut rng)).collect();
                for &(ci, propensity) in &plan.visits {
                    let p = (config.venue_affinity_strength * config.mention_rate * strengths[ci] * propensity).min(1.0);
                    if rng.random_bool(p) {
                        let m = markers[ci].choose(&mut rng).unwrap().clone();
                        let at = rng.random_range(0..=words.len());
                        words.insert(at, m);
                    }
                }
                if platform == Platform::Instagram {
                    for w in words.iter_mut() {
                        if rng.random_bool(0.25) {
                            w.insert(0, '#');
                        }
                    }
                }
                let mut text = words.join(" ");
                if platform == Platform::Twitter {
                    if rng.random_bool(0.1) {
                        let other = user_ids.choose(&mut rng).unwrap();
                        text = format!("@{other} {text}");
                    }
                    if rng.random_bool(0.05) {
                        text.push_str(&format!(" http://t.co/{:06x}", rng.random_range(0..0xff_ffffu32)));
                    }
                }
                let code = if platform == Platform::Twitter { "tw" } else { "ig" };
                posts.push(Post {
                    id: format!("{}-{code}-{i:05}", plan.id),
                    user_id: plan.id.clone(),
                    platform,
                    timestamp: ts,
                    text,
                    venue_category: None,
                });
            }
        }

        // Check-ins: every sampled visit at least once, the rest by propensity.
        let n = config.foursquare_posts.sample(&mut rng).max(plan.visits.len());
        let mut chosen: Vec<usize> = plan.visits.iter().map(|v| v.0).collect();
        let total_prop: f64 = plan.visits.iter().map(|v| v.1).sum();
        while chosen.len() < n {
            let mut x = rng.random::<f64>() * total_prop;
            let mut pick = plan.visits[plan.visits.len() - 1].0;
            for &(ci, p) in &plan.visits {
                if x < p {
                    pick = ci;
                    break;
                }
                x -= p;
            }
            chosen.push(pick);
        }
        chosen.shuffle(&mut rng);
        let mut venue_names: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        let mut stamps: Vec<i64> = (0..n).map(|_| EPOCH_START + rng.random_range(0..EPOCH_SPAN)).collect();
        stamps.sort_unstable();
        for (i, (ci, ts)) in chosen.into_iter().zip(stamps).enumerate() {
            let names = venue_names.entry(ci).or_insert_with(|| {
                (0..2)
                    .map(|_| {
                        let a = word(Platform::Foursquare, &mut rng);
                        let b = word(Platform::Foursquare, &mut rng);
                        format!("{a} {b} {}", slugs[ci])
                    })
                    .collect()
            });
            let text = names.choose(&mut rng).unwrap().clone();
            truth_visits.insert((plan.id.clone(), categories[ci].clone()));
            posts.push(Post {
                id: format!("{}-fs-{i:05}", plan.id),
                user_id: plan.id.clone(),
                platform: Platform::Foursquare,
                timestamp: ts,
                text,
                venue_category: Some(categories[ci].clone()),
            });
        }
    }

    let mut corpus = Corpus::from_posts(posts)?;
    corpus.set_venue_taxonomy(categories.iter().cloned());
    let truth = GroundTruth {
        visits: truth_visits,
        markers: categories.iter().cloned().zip(markers).collect(),
        category_strength: categories.iter().cloned().zip(strengths).collect(),
    };
    Ok((corpus, truth))
}

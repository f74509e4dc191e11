use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::condition::Condition;
use crate::corpus::{mix_from_pools, strip_mentions, Corpus, Platform};
use crate::error::{Error, Result};
use crate::seed::SeedKey;
use crate::textproc::{build_vocabulary, count_vector, tokenize, CurationPolicy, TermVector, Vocabulary};

pub const DEFAULT_DELTA: f64 = 1.0;

/// Additively smoothed unigram model:
/// `p(t|M_u) = (count(t) + delta) / (total + delta * |V|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserLanguageModel {
    pub user_id: String,
    pub term_counts: TermVector,
    pub total_count: u64,
    pub smoothing_delta: f64,
    vocab_size: usize,
    log_denominator: f64,
}

impl UserLanguageModel {
    pub fn new(user_id: impl Into<String>, term_counts: TermVector, vocab_size: usize, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidConfig(format!("smoothing delta must be positive, got {delta}")));
        }
        if vocab_size == 0 {
            return Err(Error::EmptyVocabulary);
        }
        if let Some(i) = term_counts.max_index().filter(|&i| i >= vocab_size) {
            return Err(Error::FeatureOutOfRange {
                index: i,
                num_features: vocab_size,
            });
        }
        let total_count = term_counts.total();
        Ok(UserLanguageModel {
            user_id: user_id.into(),
            log_denominator: (total_count as f64 + delta * vocab_size as f64).ln(),
            term_counts,
            total_count,
            smoothing_delta: delta,
            vocab_size,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn prob(&self, index: usize) -> f64 {
        (self.term_counts.get(index) as f64 + self.smoothing_delta)
            / (self.total_count as f64 + self.smoothing_delta * self.vocab_size as f64)
    }

    pub fn log_prob(&self, index: usize) -> f64 {
        (self.term_counts.get(index) as f64 + self.smoothing_delta).ln() - self.log_denominator
    }

    /// Probability of an out-of-vocabulary term: the zero-count value.
    pub fn log_floor(&self) -> f64 {
        self.smoothing_delta.ln() - self.log_denominator
    }
}

/// In-vocabulary counts of a query plus the number of OOV tokens.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Query {
    pub counts: TermVector,
    pub oov: u64,
}

impl Query {
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> Self {
        let oov = tokens.iter().filter(|t| vocab.index_of(t.as_ref()).is_none()).count() as u64;
        Query {
            counts: count_vector(tokens, vocab),
            oov,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty() && self.oov == 0
    }
}

/// `sum_t c_q(t) * ln p(t|M_u)`; zero for an empty query.
pub fn log_likelihood(query: &Query, model: &UserLanguageModel) -> f64 {
    let known: f64 = query.counts.iter().map(|(i, c)| c as f64 * model.log_prob(i)).sum();
    known + query.oov as f64 * model.log_floor()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeanonIndex {
    pub vocab: Vocabulary,
    pub models: BTreeMap<String, UserLanguageModel>,
    /// Users left out because their sources could not cover the budget.
    pub excluded: Vec<String>,
}

impl DeanonIndex {
    /// Builds an index from raw training texts per user.
    pub fn from_texts<S: AsRef<str>>(users: &[(String, Vec<S>)], delta: f64) -> Result<Self> {
        let policy = CurationPolicy::raw();
        let docs: Vec<Vec<String>> = users
            .iter()
            .map(|(_, texts)| texts.iter().flat_map(|t| tokenize(t.as_ref(), &policy)).collect())
            .collect();
        let vocab = build_vocabulary(&docs, &policy)?;
        let mut models = BTreeMap::new();
        for ((user, _), doc) in users.iter().zip(&docs) {
            let m = UserLanguageModel::new(user.clone(), count_vector(doc, &vocab), vocab.len(), delta)?;
            models.insert(user.clone(), m);
        }
        Ok(DeanonIndex {
            vocab,
            models,
            excluded: Vec::new(),
        })
    }

    pub fn num_users(&self) -> usize {
        self.models.len()
    }

    /// Tokenizes anonymous posts into a query after removing mentions.
    pub fn query<S: AsRef<str>>(&self, posts: &[S]) -> Query {
        let policy = CurationPolicy::raw();
        let tokens: Vec<String> = posts
            .iter()
            .flat_map(|p| tokenize(&strip_mentions(p.as_ref()), &policy))
            .collect();
        Query::from_tokens(&tokens, &self.vocab)
    }
}

/// Candidate authors by descending log-likelihood, ties broken by user id.
pub fn rank_users(query: &Query, index: &DeanonIndex) -> Vec<(String, f64)> {
    let mut ranked: Vec<(String, f64)> = index
        .models
        .values()
        .map(|m| (m.user_id.clone(), log_likelihood(query, m)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// Top-ranked user without materializing the full ranking.
pub fn best_user<'a>(query: &Query, index: &'a DeanonIndex) -> Option<&'a str> {
    let mut best: Option<(&str, f64)> = None;
    // models iterate in user-id order, so keeping the first maximum breaks
    // ties by id
    for m in index.models.values() {
        let s = log_likelihood(query, m);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((&m.user_id, s));
        }
    }
    best.map(|(u, _)| u)
}

/// Samples `posts_seen` training posts per user for `condition` and fits one
/// smoothed model per user over a shared raw vocabulary.
pub fn fit_index(corpus: &Corpus, condition: Condition, posts_seen: usize, seed: u64) -> Result<DeanonIndex> {
    fit_index_keyed(corpus, condition, posts_seen, index_key(seed, condition, posts_seen, 0), DEFAULT_DELTA)
}

pub(crate) fn index_key(seed: u64, condition: Condition, posts_seen: usize, run: usize) -> SeedKey {
    SeedKey::new(seed)
        .with_str("deanon-index")
        .with_str(condition.as_str())
        .with_u64(posts_seen as u64)
        .with_u64(run as u64)
}

pub fn fit_index_keyed(
    corpus: &Corpus,
    condition: Condition,
    posts_seen: usize,
    key: SeedKey,
    delta: f64,
) -> Result<DeanonIndex> {
    let mut training = Vec::new();
    let mut excluded = Vec::new();
    for user in corpus.users() {
        let mut rng = key.with_str(&user.user_id).rng();
        let primary = (Platform::Twitter, condition.train_pool(user, Platform::Twitter));
        let extras: Vec<_> = condition
            .extras()
            .iter()
            .map(|&p| (p, condition.train_pool(user, p)))
            .collect();
        match mix_from_pools(&user.user_id, primary, &extras, posts_seen, &mut rng) {
            Ok(mixed) => {
                let texts: Vec<String> = mixed.timeline.posts().iter().map(|p| p.text.clone()).collect();
                training.push((user.user_id.clone(), texts));
            }
            Err(Error::InsufficientPosts { needed, available }) => {
                tracing::warn!(user = %user.user_id, needed, available, "excluding user from index");
                excluded.push(user.user_id.clone());
            }
            Err(e) => return Err(e),
        }
    }
    if training.len() < 2 {
        return Err(Error::TooFewUsers {
            needed: 2,
            available: training.len(),
        });
    }
    let mut index = DeanonIndex::from_texts(&training, delta)?;
    index.excluded = excluded;
    Ok(index)
}

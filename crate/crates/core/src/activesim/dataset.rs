use std::collections::HashMap;

use crate::corpus::{derive_venue_labels, Corpus, Platform, Post, VenueLabels};
use crate::ensemble::SparseMatrix;
use crate::error::{Error, Result};
use crate::textproc::{tokenize, CurationPolicy, TermVector, TfIdfModel, WeightedVector};

/// Text platforms whose posts make up a simulated timeline. Check-ins are
/// the label source and stay out of the feature space.
pub const TEXT_PLATFORMS: [Platform; 2] = [Platform::Twitter, Platform::Instagram];

/// One user's text timeline in the curated feature space.
#[derive(Debug, Clone)]
pub struct UserTimeline {
    pub user_id: String,
    pub post_ids: Vec<String>,
    /// Curated in-vocabulary counts per post, in timeline order.
    pub posts: Vec<TermVector>,
    /// Sum of all post vectors.
    pub full: TermVector,
    inverted: HashMap<usize, Vec<u32>>,
}

impl UserTimeline {
    pub fn new(user_id: impl Into<String>, post_ids: Vec<String>, posts: Vec<TermVector>) -> Self {
        assert_eq!(post_ids.len(), posts.len());
        let mut full = TermVector::new();
        let mut inverted: HashMap<usize, Vec<u32>> = HashMap::new();
        for (p, v) in posts.iter().enumerate() {
            full.add_assign(v);
            for t in v.indices() {
                inverted.entry(t).or_default().push(p as u32);
            }
        }
        UserTimeline {
            user_id: user_id.into(),
            post_ids,
            posts,
            full,
            inverted,
        }
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// Posts containing `term`, ascending.
    pub fn posts_with(&self, term: usize) -> &[u32] {
        self.inverted.get(&term).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Users' text timelines, the TF-IDF space fitted over per-user documents,
/// and venue labels from check-ins.
#[derive(Debug, Clone)]
pub struct VenueDataset {
    pub model: TfIdfModel,
    pub users: Vec<UserTimeline>,
    pub labels: VenueLabels,
}

fn text_posts(corpus: &Corpus, user_id: &str) -> Vec<Post> {
    let user = corpus.user(user_id).expect("id from corpus");
    let mut posts: Vec<Post> = TEXT_PLATFORMS.iter().flat_map(|&p| user.posts(p).iter().cloned()).collect();
    posts.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    posts
}

impl VenueDataset {
    pub fn build(corpus: &Corpus, policy: &CurationPolicy) -> Result<Self> {
        let mut raw = Vec::new();
        for user_id in corpus.user_ids() {
            let posts = text_posts(corpus, user_id);
            if posts.is_empty() {
                tracing::warn!(user = user_id, "no text posts; leaving user out");
                continue;
            }
            let tokens: Vec<Vec<String>> = posts.iter().map(|p| tokenize(&p.text, policy)).collect();
            raw.push((user_id.to_owned(), posts, tokens));
        }
        if raw.is_empty() {
            return Err(Error::EmptyData);
        }
        let docs: Vec<Vec<String>> = raw.iter().map(|(_, _, t)| t.concat()).collect();
        let model = TfIdfModel::fit(&docs, policy)?;
        let users = raw
            .into_iter()
            .map(|(id, posts, tokens)| {
                let ids = posts.into_iter().map(|p| p.id).collect();
                let vectors = tokens.iter().map(|t| model.counts(t)).collect();
                UserTimeline::new(id, ids, vectors)
            })
            .collect();
        Ok(VenueDataset {
            model,
            users,
            labels: derive_venue_labels(corpus),
        })
    }

    pub fn num_features(&self) -> usize {
        self.model.num_features()
    }

    pub fn idf(&self) -> &[f64] {
        self.model.idf()
    }

    pub fn full_vector(&self, user: usize) -> WeightedVector {
        self.model.weigh(&self.users[user].full)
    }

    /// Full-timeline TF-IDF rows in user order.
    pub fn features(&self) -> SparseMatrix {
        let rows = (0..self.users.len()).map(|u| self.full_vector(u)).collect();
        SparseMatrix::new(rows, self.num_features()).expect("rows built from the same vocabulary")
    }

    pub fn labels_for(&self, venue: &str) -> Vec<bool> {
        self.users.iter().map(|u| self.labels.get(&u.user_id, venue)).collect()
    }
}

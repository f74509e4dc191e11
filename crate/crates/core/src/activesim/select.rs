use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dataset::UserTimeline;
use crate::ensemble::BoostedEnsemble;
use crate::error::{Error, Result};
use crate::infoscore::{InfoParams, NoveltyKernel};

pub const DEFAULT_BUDGET: usize = 50;
pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Random,
    Active,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Random => "random",
            Policy::Active => "active",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Policy::Random),
            "active" => Ok(Policy::Active),
            _ => Err(Error::InvalidConfig(format!("unknown policy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Posts revealed per iteration.
    pub d: usize,
    /// Largest truncated timeline; `usize::MAX` reveals everything.
    pub budget: usize,
    pub params: InfoParams,
    pub policy: Policy,
    pub seed: u64,
    pub folds: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: 1,
            budget: DEFAULT_BUDGET,
            params: InfoParams::default(),
            policy: Policy::Active,
            seed: 0,
            folds: DEFAULT_FOLDS,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.budget == 0 {
            return Err(Error::InvalidConfig("d and budget must be at least 1".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidConfig("at least 2 folds are required".into()));
        }
        Ok(())
    }
}

/// The revealed part of a timeline plus cached per-post novelty sums for
/// the posts still hidden.
#[derive(Debug, Clone)]
pub struct TruncatedState<'a> {
    timeline: &'a UserTimeline,
    revealed: Vec<bool>,
    order: Vec<usize>,
    seen: Vec<u32>,
    /// `None` when novelty is not needed (random policy or lambda = 0).
    novelty: Option<(NoveltyKernel, Vec<f64>)>,
    dirty: Vec<u32>,
    stamp: u32,
}

impl<'a> TruncatedState<'a> {
    pub fn new(timeline: &'a UserTimeline, num_features: usize, novelty_alpha: Option<f64>) -> Self {
        let novelty = novelty_alpha.map(|alpha| {
            let kernel = NoveltyKernel::new(alpha);
            let seen = vec![0u32; num_features];
            let sums = timeline.posts.iter().map(|p| novelty_sum(&kernel, &seen, p)).collect();
            (kernel, sums)
        });
        TruncatedState {
            timeline,
            revealed: vec![false; timeline.len()],
            order: Vec::new(),
            seen: vec![0; num_features],
            novelty,
            dirty: vec![0; timeline.len()],
            stamp: 0,
        }
    }

    pub fn timeline(&self) -> &UserTimeline {
        self.timeline
    }

    pub fn is_revealed(&self, post: usize) -> bool {
        self.revealed[post]
    }

    /// Revealed post indices in reveal order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn num_revealed(&self) -> usize {
        self.order.len()
    }

    pub fn remaining(&self) -> usize {
        self.timeline.len() - self.order.len()
    }

    pub fn seen(&self) -> &[u32] {
        &self.seen
    }

    pub fn reveal(&mut self, post: usize) {
        assert!(!self.revealed[post], "post {post} revealed twice");
        self.revealed[post] = true;
        self.order.push(post);
        let vector = &self.timeline.posts[post];
        for (t, c) in vector.iter() {
            self.seen[t] += c;
        }
        if let Some((kernel, sums)) = &mut self.novelty {
            self.stamp += 1;
            for t in vector.indices() {
                for &q in self.timeline.posts_with(t) {
                    let q = q as usize;
                    if self.revealed[q] || self.dirty[q] == self.stamp {
                        continue;
                    }
                    self.dirty[q] = self.stamp;
                    sums[q] = novelty_sum(kernel, &self.seen, &self.timeline.posts[q]);
                }
            }
        }
    }

    /// Novelty of a hidden post against the revealed part; `None` for a
    /// post without in-vocabulary terms or when novelty is not tracked.
    pub fn novelty(&self, post: usize) -> Option<f64> {
        let (_, sums) = self.novelty.as_ref()?;
        let nnz = self.timeline.posts[post].nnz();
        (nnz > 0).then(|| sums[post] / nnz as f64)
    }
}

fn novelty_sum(kernel: &NoveltyKernel, seen: &[u32], post: &crate::textproc::TermVector) -> f64 {
    post.iter().map(|(i, c)| kernel.term(seen[i], c)).sum()
}

/// Active-selection score of a hidden post, `None` when unscoreable.
pub fn active_score(state: &TruncatedState<'_>, relevance: &[f64], params: &InfoParams, post: usize) -> Option<f64> {
    if state.timeline.posts[post].is_empty() {
        return None;
    }
    let nu = if params.lambda() == 0.0 { 0.0 } else { state.novelty(post)? };
    Some(params.mix(nu, relevance[post]))
}

/// Picks the next `d` posts. Random draws come from `shuffled`, a uniformly
/// permuted list of hidden posts consumed from the front; active selection
/// takes the highest scores, earlier posts first on ties, unscoreable posts
/// last.
pub fn reveal_next(
    state: &mut TruncatedState<'_>,
    config: &RunConfig,
    relevance: &[f64],
    shuffled: &mut Vec<usize>,
) -> Vec<usize> {
    let mut picked = Vec::with_capacity(config.d);
    for _ in 0..config.d {
        if state.remaining() == 0 {
            break;
        }
        let next = match config.policy {
            Policy::Random => loop {
                let p = shuffled.pop().expect("shuffled covers hidden posts");
                if !state.is_revealed(p) {
                    break p;
                }
            },
            Policy::Active => best_hidden(state, relevance, &config.params),
        };
        state.reveal(next);
        picked.push(next);
    }
    picked
}

fn best_hidden(state: &TruncatedState<'_>, relevance: &[f64], params: &InfoParams) -> usize {
    let mut best: Option<(usize, f64)> = None;
    let mut first_unscoreable = None;
    for p in 0..state.timeline.len() {
        if state.is_revealed(p) {
            continue;
        }
        match active_score(state, relevance, params, p) {
            Some(s) => {
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((p, s));
                }
            }
            None => {
                first_unscoreable.get_or_insert(p);
            }
        }
    }
    best.map(|(p, _)| p)
        .or(first_unscoreable)
        .expect("called with hidden posts")
}

/// Prediction after each reveal step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimTrace {
    pub predictions: Vec<bool>,
    /// Truncated-timeline size at each prediction.
    pub sizes: Vec<usize>,
    /// Revealed posts in order.
    pub order: Vec<usize>,
}

/// Grows a truncated timeline from one random post, predicting after every
/// step, until the budget or the timeline runs out.
pub fn simulate_user<R: Rng + ?Sized>(
    timeline: &UserTimeline,
    relevance: &[f64],
    ensemble: &BoostedEnsemble,
    idf: &[f64],
    config: &RunConfig,
    rng: &mut R,
) -> SimTrace {
    let n = timeline.len();
    assert!(n > 0, "simulate_user needs at least one post");
    let limit = config.budget.min(n);
    let track = config.policy == Policy::Active && config.params.lambda() > 0.0;
    let mut state = TruncatedState::new(timeline, idf.len(), track.then(|| config.params.alpha()));
    let mut weights = vec![0.0f64; idf.len()];
    let mut trace = SimTrace {
        predictions: Vec::new(),
        sizes: Vec::new(),
        order: Vec::new(),
    };

    let first = rng.random_range(0..n);
    let mut shuffled: Vec<usize> = Vec::new();
    if config.policy == Policy::Random {
        shuffled = (0..n).filter(|&p| p != first).collect();
        shuffled.shuffle(rng);
    }
    let mut step = |state: &mut TruncatedState<'_>, posts: &[usize], trace: &mut SimTrace| {
        for &p in posts {
            for t in timeline.posts[p].indices() {
                weights[t] = f64::from(state.seen()[t]) * idf[t];
            }
        }
        trace.predictions.push(ensemble.label_of(&weights[..]));
        trace.sizes.push(state.num_revealed());
    };

    state.reveal(first);
    step(&mut state, &[first], &mut trace);
    while state.num_revealed() < limit {
        let room = limit - state.num_revealed();
        let cfg = RunConfig {
            d: config.d.min(room),
            ..*config
        };
        let picked = reveal_next(&mut state, &cfg, relevance, &mut shuffled);
        step(&mut state, &picked, &mut trace);
    }
    trace.order = state.order().to_vec();
    trace
}

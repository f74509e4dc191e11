//! Novelty, relevance and informativeness of a single post.
//!
//! Novelty compares a post's raw term counts `m2` with the counts `m1` of
//! everything already shared:
//!
//! ```text
//! nu = sum_{i : m2_i != 0} exp(-alpha * (m1_i + m2_i - 1)) / |{i : m2_i != 0}|
//! ```
//!
//! Only terms present in the post contribute. Relevance is the sum of the
//! normalized Gini importance of the distinct features in the post, and
//! informativeness mixes the two as `lambda * nu + (1 - lambda) * rho`.

use serde::{Deserialize, Serialize};

use crate::ensemble::FeatureImportance;
use crate::error::{Error, Result};
use crate::textproc::{TermVector, Vocabulary};

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_LAMBDA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct InfoParams {
    lambda: f64,
    alpha: f64,
}

#[derive(Deserialize)]
struct RawParams {
    lambda: f64,
    #[serde(default = "default_alpha")]
    alpha: f64,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

impl TryFrom<RawParams> for InfoParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        InfoParams::new(raw.lambda, raw.alpha)
    }
}

impl InfoParams {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidConfig(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidConfig(format!("alpha must be positive, got {alpha}")));
        }
        Ok(InfoParams { lambda, alpha })
    }

    pub fn with_lambda(lambda: f64) -> Result<Self> {
        Self::new(lambda, DEFAULT_ALPHA)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mix(&self, novelty: f64, relevance: f64) -> f64 {
        self.lambda * novelty + (1.0 - self.lambda) * relevance
    }
}

impl Default for InfoParams {
    fn default() -> Self {
        InfoParams {
            lambda: DEFAULT_LAMBDA,
            alpha: DEFAULT_ALPHA,
        }
    }
}

/// Contribution of one distinct post term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermScore {
    pub index: usize,
    /// Filled in by [`ScoreBreakdown::label_terms`].
    pub term: Option<String>,
    pub count: u32,
    pub seen: u32,
    pub novelty: f64,
    pub importance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub novelty: f64,
    pub relevance: f64,
    pub informativeness: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub per_term: Vec<TermScore>,
}

impl ScoreBreakdown {
    pub fn label_terms(&mut self, vocab: &Vocabulary) {
        for t in &mut self.per_term {
            t.term = vocab.term(t.index).map(str::to_owned);
        }
    }
}

fn term_novelty(seen: u32, count: u32, alpha: f64) -> f64 {
    let k = seen as f64 + count as f64 - 1.0;
    (-alpha * k).exp()
}

pub fn novelty(seen: &TermVector, post: &TermVector, alpha: f64) -> Result<f64> {
    if post.is_empty() {
        return Err(Error::UnscoreablePost);
    }
    let sum: f64 = post.iter().map(|(i, c)| term_novelty(seen.get(i), c, alpha)).sum();
    Ok(sum / post.nnz() as f64)
}

pub fn relevance(post: &TermVector, importance: &FeatureImportance) -> f64 {
    post.indices().map(|i| importance.get(i)).sum::<f64>().min(1.0)
}

pub fn informativeness(
    post: &TermVector,
    seen: &TermVector,
    importance: &FeatureImportance,
    params: &InfoParams,
) -> Result<ScoreBreakdown> {
    if post.is_empty() {
        return Err(Error::UnscoreablePost);
    }
    let per_term: Vec<TermScore> = post
        .iter()
        .map(|(index, count)| {
            let s = seen.get(index);
            TermScore {
                index,
                term: None,
                count,
                seen: s,
                novelty: term_novelty(s, count, params.alpha),
                importance: importance.get(index),
            }
        })
        .collect();
    let nu = per_term.iter().map(|t| t.novelty).sum::<f64>() / per_term.len() as f64;
    let rho = relevance(post, importance);
    Ok(ScoreBreakdown {
        novelty: nu,
        relevance: rho,
        informativeness: params.mix(nu, rho),
        lambda: params.lambda,
        alpha: params.alpha,
        per_term,
    })
}

/// Precomputed `exp(-alpha * k)` for small integer `k`, for scoring many
/// posts against the same alpha.
#[derive(Debug, Clone)]
pub struct NoveltyKernel {
    alpha: f64,
    table: Vec<f64>,
}

impl NoveltyKernel {
    const TABLE_LEN: usize = 256;

    pub fn new(alpha: f64) -> Self {
        let table = (0..Self::TABLE_LEN).map(|k| (-alpha * k as f64).exp()).collect();
        NoveltyKernel { alpha, table }
    }

    #[inline]
    pub fn term(&self, seen: u32, count: u32) -> f64 {
        let k = (seen + count - 1) as usize;
        match self.table.get(k) {
            Some(v) => *v,
            None => (-self.alpha * k as f64).exp(),
        }
    }

    /// Same value as [`novelty`], `None` for an empty post.
    pub fn novelty(&self, seen: &TermVector, post: &TermVector) -> Option<f64> {
        if post.is_empty() {
            return None;
        }
        let sum: f64 = post.iter().map(|(i, c)| self.term(seen.get(i), c)).sum();
        Some(sum / post.nnz() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tv(pairs: &[(usize, u32)]) -> TermVector {
        TermVector::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn unseen_single_terms_are_fully_novel() {
        let nu = novelty(&tv(&[(9, 3)]), &tv(&[(0, 1), (1, 1), (2, 1)]), 0.5).unwrap();
        assert_eq!(nu, 1.0);
    }

    #[test]
    fn four_prior_occurrences() {
        let nu = novelty(&tv(&[(0, 4)]), &tv(&[(0, 1)]), 0.5).unwrap();
        assert_abs_diff_eq!(nu, (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(nu, 0.13534, epsilon = 1e-5);
    }

    #[test]
    fn mixed_post() {
        let seen = tv(&[(0, 2)]);
        let post = tv(&[(0, 1), (1, 1)]);
        let nu = novelty(&seen, &post, 0.5).unwrap();
        assert_abs_diff_eq!(nu, ((-1.0f64).exp() + 1.0) / 2.0, epsilon = 1e-15);
        // reversed arguments give a different value
        let rev = novelty(&post, &seen, 0.5).unwrap();
        assert!((rev - nu).abs() > 1e-3);
    }

    #[test]
    fn empty_post_is_unscoreable() {
        assert!(matches!(novelty(&tv(&[]), &tv(&[]), 0.5), Err(Error::UnscoreablePost)));
    }

    #[test]
    fn relevance_lookup() {
        let imp = FeatureImportance::from_raw(vec![0.0, 0.3, 0.1]);
        assert_abs_diff_eq!(relevance(&tv(&[(2, 4)]), &imp), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(relevance(&tv(&[(1, 1), (2, 1)]), &imp), 1.0, epsilon = 1e-15);
        assert_eq!(relevance(&tv(&[(0, 1)]), &imp), 0.0);
        assert_eq!(relevance(&tv(&[]), &imp), 0.0);
    }

    #[test]
    fn mixture_at_lambda_point_one() {
        let imp = FeatureImportance::from_raw(vec![0.0, 0.75, 0.25]);
        let seen = tv(&[(0, 2)]);
        let post = tv(&[(0, 1), (2, 1)]);
        let b = informativeness(&post, &seen, &imp, &InfoParams::with_lambda(0.1).unwrap()).unwrap();
        let nu = ((-1.0f64).exp() + 1.0) / 2.0;
        assert_eq!(b.informativeness, 0.1 * nu + 0.9 * 0.25);
        assert_abs_diff_eq!(b.informativeness, 0.29339, epsilon = 1e-5);
        assert_eq!(b.per_term.len(), 2);

        let one = informativeness(&post, &seen, &imp, &InfoParams::with_lambda(1.0).unwrap()).unwrap();
        assert_eq!(one.informativeness, one.novelty);
        let zero = informativeness(&post, &seen, &imp, &InfoParams::with_lambda(0.0).unwrap()).unwrap();
        assert_eq!(zero.informativeness, zero.relevance);
    }

    #[test]
    fn params_are_validated() {
        assert!(InfoParams::new(1.5, 0.5).is_err());
        assert!(InfoParams::new(-0.1, 0.5).is_err());
        assert!(InfoParams::new(0.5, 0.0).is_err());
        assert!(InfoParams::new(0.5, f64::NAN).is_err());
        let p = InfoParams::default();
        assert_eq!((p.lambda(), p.alpha()), (0.1, 0.5));
        assert!(serde_json::from_str::<InfoParams>(r#"{"lambda":2.0}"#).is_err());
        let p: InfoParams = serde_json::from_str(r#"{"lambda":0.3}"#).unwrap();
        assert_eq!(p.alpha(), 0.5);
    }

    #[test]
    fn labels_terms_from_vocabulary() {
        let vocab = Vocabulary::from_tsv("gym\t0\t1\nfitness\t1\t1\n", 1).unwrap();
        let imp = FeatureImportance::from_raw(vec![1.0, 0.0]);
        let mut b = informativeness(&tv(&[(1, 1)]), &tv(&[]), &imp, &InfoParams::default()).unwrap();
        b.label_terms(&vocab);
        assert_eq!(b.per_term[0].term.as_deref(), Some("fitness"));
    }

    fn sparse() -> impl Strategy<Value = TermVector> {
        proptest::collection::btree_map(0usize..30, 1u32..8, 0..12).prop_map(TermVector::from_pairs)
    }

    proptest! {
        #[test]
        fn kernel_matches_direct(seen in sparse(), post in sparse(), alpha in 0.05f64..3.0) {
            let k = NoveltyKernel::new(alpha);
            match novelty(&seen, &post, alpha) {
                Ok(v) => prop_assert!((k.novelty(&seen, &post).unwrap() - v).abs() < 1e-12),
                Err(_) => prop_assert!(k.novelty(&seen, &post).is_none()),
            }
        }

        #[test]
        fn informativeness_is_bounded(seen in sparse(), post in sparse(), lambda in 0.0f64..=1.0) {
            prop_assume!(!post.is_empty());
            let imp = FeatureImportance::from_raw((0..30).map(|i| (i % 4) as f64).collect());
            let b = informativeness(&post, &seen, &imp, &InfoParams::with_lambda(lambda).unwrap()).unwrap();
            prop_assert!(b.novelty > 0.0 && b.novelty <= 1.0);
            prop_assert!((0.0..=1.0).contains(&b.relevance));
            prop_assert!((0.0..=1.0).contains(&b.informativeness));
            let mean = b.per_term.iter().map(|t| t.novelty).sum::<f64>() / b.per_term.len() as f64;
            prop_assert!((mean - b.novelty).abs() < 1e-12);
        }
    }
}

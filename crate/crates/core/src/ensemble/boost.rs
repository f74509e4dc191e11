//! Discrete two-class AdaBoost over CART weak learners.

use serde::{Deserialize, Serialize};

use super::matrix::{canonical_order, FeatureValues, SparseMatrix};
use super::tree::{check_inputs, TreeBuilder, TreeNode};
use crate::error::{Error, Result};
use crate::textproc::WeightedVector;

/// Floor on the weighted error when a round classifies perfectly.
pub const MIN_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoostParams {
    pub rounds: usize,
    pub max_depth: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            rounds: 50,
            max_depth: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedEnsemble {
    pub trees: Vec<TreeNode>,
    pub alphas: Vec<f64>,
    pub num_features: usize,
}

/// Tree weight for a round with weighted error `eps`.
pub fn round_weight(eps: f64) -> f64 {
    let eps = eps.max(MIN_ERROR);
    0.5 * ((1.0 - eps) / eps).ln()
}

impl BoostedEnsemble {
    /// Weighted vote margin `Σ α_t h_t(x) / Σ α_t` with `h_t ∈ {-1, +1}`;
    /// zero for an empty ensemble.
    pub fn margin_of<X: FeatureValues + ?Sized>(&self, x: &X) -> f64 {
        let total: f64 = self.alphas.iter().sum();
        if self.trees.is_empty() || total <= 0.0 {
            return 0.0;
        }
        let vote: f64 = self
            .trees
            .iter()
            .zip(&self.alphas)
            .map(|(t, a)| if t.predict(x) { *a } else { -*a })
            .sum();
        vote / total
    }

    pub fn proba_of<X: FeatureValues + ?Sized>(&self, x: &X) -> f64 {
        squash(self.margin_of(x))
    }

    pub fn label_of<X: FeatureValues + ?Sized>(&self, x: &X) -> bool {
        self.proba_of(x) >= 0.5
    }

    /// Positive-class probability for a sparse sample.
    pub fn predict_proba(&self, x: &WeightedVector) -> Result<f64> {
        self.check(x)?;
        Ok(self.proba_of(x))
    }

    pub fn predict(&self, x: &WeightedVector) -> Result<bool> {
        Ok(self.predict_proba(x)? >= 0.5)
    }

    fn check(&self, x: &WeightedVector) -> Result<()> {
        match x.max_index() {
            Some(i) if i >= self.num_features => Err(Error::FeatureOutOfRange {
                index: i,
                num_features: self.num_features,
            }),
            _ => Ok(()),
        }
    }
}

/// Logistic squash of a normalized margin: `1 / (1 + e^{-2m})`.
pub fn squash(margin: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * margin).exp())
}

/// Trace of one boosting run, for tests and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostTrace {
    /// Sample weights (in input order) after each kept round.
    pub weights: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
}

pub fn fit_adaboost(x: &SparseMatrix, y: &[bool], params: BoostParams) -> Result<BoostedEnsemble> {
    fit_adaboost_traced(x, y, params).map(|(e, _)| e)
}

/// Weights start uniform. Each round fits a weighted tree with error `ε`,
/// weighs it by `½ ln((1-ε)/ε)` and multiplies the weights of misclassified
/// samples by `e^α` before renormalizing. A perfect round is kept with the
/// capped weight and ends boosting; a round with `ε ≥ 0.5` is discarded and
/// ends boosting.
pub fn fit_adaboost_traced(x: &SparseMatrix, y: &[bool], params: BoostParams) -> Result<(BoostedEnsemble, BoostTrace)> {
    let n = x.num_rows();
    check_inputs(x, y, &vec![1.0; n])?;
    if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
        return Err(Error::SingleClass);
    }
    let order = canonical_order(x, y, &vec![0.0; n]);
    let xs = x.select(&order);
    let ys: Vec<bool> = order.iter().map(|&i| y[i]).collect();
    let builder = TreeBuilder::new(&xs, &ys);

    let mut w = vec![1.0 / n as f64; n];
    let mut ensemble = BoostedEnsemble {
        trees: Vec::new(),
        alphas: Vec::new(),
        num_features: x.num_features(),
    };
    let mut trace = BoostTrace {
        weights: Vec::new(),
        errors: Vec::new(),
    };
    for _ in 0..params.rounds {
        let tree = builder.fit(&w, params.max_depth);
        let wrong: Vec<bool> = xs.rows().iter().zip(&ys).map(|(r, &l)| tree.predict(r) != l).collect();
        let eps: f64 = w.iter().zip(&wrong).filter(|(_, &m)| m).map(|(w, _)| w).sum();
        if eps >= 0.5 {
            break;
        }
        let alpha = round_weight(eps);
        ensemble.trees.push(tree);
        ensemble.alphas.push(alpha);
        trace.errors.push(eps);
        if eps < MIN_ERROR {
            trace.weights.push(unpermute(&w, &order));
            break;
        }
        let boost = alpha.exp();
        for (wi, &m) in w.iter_mut().zip(&wrong) {
            if m {
                *wi *= boost;
            }
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|wi| *wi /= total);
        trace.weights.push(unpermute(&w, &order));
    }
    Ok((ensemble, trace))
}

fn unpermute(w: &[f64], order: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; w.len()];
    for (pos, &orig) in order.iter().enumerate() {
        out[orig] = w[pos];
    }
    out
}

use serde::{Deserialize, Serialize};

use super::boost::BoostedEnsemble;

/// How per-tree impurity decreases are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ImportanceWeighting {
    /// Plain double sum over trees and their nodes.
    #[default]
    Unweighted,
    /// Each tree's decreases scaled by its boosting weight.
    AlphaWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub raw: Vec<f64>,
    /// `raw / Σ raw`, or all zero if no split exists.
    pub normalized: Vec<f64>,
}

impl FeatureImportance {
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let total: f64 = raw.iter().sum();
        let normalized = if total > 0.0 {
            raw.iter().map(|r| r / total).collect()
        } else {
            vec![0.0; raw.len()]
        };
        FeatureImportance { raw, normalized }
    }

    pub fn get(&self, feature: usize) -> f64 {
        self.normalized.get(feature).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Features with non-zero importance, most important first.
    pub fn ranked(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self
            .normalized
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, w)| w > 0.0)
            .collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }
}

/// Gini importance: for each feature, the impurity decreases of every split
/// on it, summed over all trees.
pub fn gini_importance(ensemble: &BoostedEnsemble) -> FeatureImportance {
    gini_importance_with(ensemble, ImportanceWeighting::Unweighted)
}

pub fn gini_importance_with(ensemble: &BoostedEnsemble, weighting: ImportanceWeighting) -> FeatureImportance {
    let mut raw = vec![0.0; ensemble.num_features];
    for (tree, alpha) in ensemble.trees.iter().zip(&ensemble.alphas) {
        let scale = match weighting {
            ImportanceWeighting::Unweighted => 1.0,
            ImportanceWeighting::AlphaWeighted => *alpha,
        };
        tree.for_each_split(&mut |feature, _, decrease| raw[feature] += scale * decrease);
    }
    FeatureImportance::from_raw(raw)
}

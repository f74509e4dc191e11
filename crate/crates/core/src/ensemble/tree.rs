//! Weighted CART trees on Gini impurity.

use serde::{Deserialize, Serialize};

use super::matrix::{canonical_order, FeatureValues, SparseMatrix};
use crate::error::{Error, Result};

/// Minimum impurity decrease for a split to count as a gain. Candidates
/// within this margin of the current best do not replace it, so ties go to
/// the lowest feature index and then the lowest threshold.
pub const GAIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        /// Samples with `value <= threshold` go left.
        threshold: f64,
        /// Impurity decrease of this split, weighted by the node's share of
        /// the tree's total sample weight.
        gini_decrease: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        /// `[negative, positive]` sample weight reaching the leaf.
        class_weights: [f64; 2],
    },
}

impl TreeNode {
    pub fn predict<X: FeatureValues + ?Sized>(&self, x: &X) -> bool {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { class_weights } => return class_weights[1] > class_weights[0],
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if x.value(*feature) <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split {
                feature, left, right, ..
            } => Some((*feature).max(left.max_feature().unwrap_or(0)).max(right.max_feature().unwrap_or(0))),
        }
    }

    /// Visits every internal node as `(feature, threshold, gini_decrease)`.
    pub fn for_each_split(&self, f: &mut impl FnMut(usize, f64, f64)) {
        if let TreeNode::Split {
            feature,
            threshold,
            gini_decrease,
            left,
            right,
        } = self
        {
            f(*feature, *threshold, *gini_decrease);
            left.for_each_split(f);
            right.for_each_split(f);
        }
    }
}

/// `1 - Σ (w_c / W)^2`.
pub fn gini_impurity(class_weights: &[f64]) -> Result<f64> {
    let total: f64 = class_weights.iter().sum();
    if total <= 0.0 || class_weights.iter().any(|&w| w < 0.0) {
        return Err(Error::ZeroWeights);
    }
    Ok(1.0 - class_weights.iter().map(|w| (w / total).powi(2)).sum::<f64>())
}

fn gini2(neg: f64, pos: f64) -> f64 {
    let total = neg + pos;
    if total <= 0.0 {
        return 0.0;
    }
    let (a, b) = (neg / total, pos / total);
    1.0 - a * a - b * b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Fitting state shared by all trees grown on one (canonically ordered)
/// sample matrix.
pub(crate) struct TreeBuilder<'a> {
    x: &'a SparseMatrix,
    y: &'a [bool],
    columns: Vec<Vec<(usize, f64)>>,
}

impl<'a> TreeBuilder<'a> {
    pub(crate) fn new(x: &'a SparseMatrix, y: &'a [bool]) -> Self {
        TreeBuilder {
            x,
            y,
            columns: x.columns(),
        }
    }

    pub(crate) fn fit(&self, w: &[f64], max_depth: usize) -> TreeNode {
        let rows: Vec<usize> = (0..self.y.len()).collect();
        let (neg, pos) = self.class_sums(&rows, w);
        let total = neg + pos;
        let mut in_node = vec![true; self.y.len()];
        self.grow(&rows, &mut in_node, w, total, max_depth)
    }

    fn class_sums(&self, rows: &[usize], w: &[f64]) -> (f64, f64) {
        let mut neg = 0.0;
        let mut pos = 0.0;
        for &r in rows {
            if self.y[r] {
                pos += w[r];
            } else {
                neg += w[r];
            }
        }
        (neg, pos)
    }

    fn grow(&self, rows: &[usize], in_node: &mut [bool], w: &[f64], root_weight: f64, depth_left: usize) -> TreeNode {
        let (neg, pos) = self.class_sums(rows, w);
        let leaf = TreeNode::Leaf {
            class_weights: [neg, pos],
        };
        if depth_left == 0 || neg <= 0.0 || pos <= 0.0 || rows.len() < 2 {
            return leaf;
        }
        let Some(best) = self.best_split(rows, in_node, w, neg, pos, root_weight) else {
            return leaf;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x.row(r).get(best.feature) <= best.threshold);
        for &r in &right {
            in_node[r] = false;
        }
        let left_node = self.grow(&left, in_node, w, root_weight, depth_left - 1);
        for &r in &right {
            in_node[r] = true;
        }
        for &r in &left {
            in_node[r] = false;
        }
        let right_node = self.grow(&right, in_node, w, root_weight, depth_left - 1);
        for &r in &left {
            in_node[r] = true;
        }
        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            gini_decrease: best.gain,
            left: Box::new(left_node),
            right: Box::new(right_node),
        }
    }

    fn best_split(
        &self,
        rows: &[usize],
        in_node: &[bool],
        w: &[f64],
        neg: f64,
        pos: f64,
        root_weight: f64,
    ) -> Option<SplitChoice> {
        let node_weight = neg + pos;
        let parent = node_weight * gini2(neg, pos);
        let mut best: Option<SplitChoice> = None;
        let mut entries: Vec<(f64, bool, f64)> = Vec::new();
        for (feature, col) in self.columns.iter().enumerate() {
            entries.clear();
            entries.extend(col.iter().filter(|(r, _)| in_node[*r]).map(|&(r, v)| (v, self.y[r], w[r])));
            if entries.is_empty() {
                continue;
            }
            let zeros = rows.len() - entries.len();
            let (mut nz_neg, mut nz_pos) = (0.0, 0.0);
            for &(_, label, weight) in &entries {
                if label {
                    nz_pos += weight;
                } else {
                    nz_neg += weight;
                }
            }
            if zeros > 0 {
                entries.push((0.0, false, (neg - nz_neg).max(0.0)));
                entries.push((0.0, true, (pos - nz_pos).max(0.0)));
            }
            // Stable sort keeps row order inside equal values.
            entries.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (mut left_neg, mut left_pos) = (0.0, 0.0);
            let mut i = 0;
            while i < entries.len() {
                let value = entries[i].0;
                while i < entries.len() && entries[i].0 == value {
                    if entries[i].1 {
                        left_pos += entries[i].2;
                    } else {
                        left_neg += entries[i].2;
                    }
                    i += 1;
                }
                if i == entries.len() {
                    break;
                }
                let next = entries[i].0;
                let right_neg = (neg - left_neg).max(0.0);
                let right_pos = (pos - left_pos).max(0.0);
                let children = (left_neg + left_pos) * gini2(left_neg, left_pos)
                    + (right_neg + right_pos) * gini2(right_neg, right_pos);
                let gain = (parent - children) / root_weight;
                let beats = match best {
                    None => gain > GAIN_TOLERANCE,
                    Some(b) => gain > b.gain + GAIN_TOLERANCE,
                };
                if beats {
                    best = Some(SplitChoice {
                        feature,
                        threshold: (value + next) / 2.0,
                        gain,
                    });
                }
            }
        }
        best
    }
}

/// Fits a weighted CART tree. Splits maximize the weighted Gini decrease
/// over midpoints between consecutive distinct feature values.
pub fn fit_tree(x: &SparseMatrix, y: &[bool], sample_weights: &[f64], max_depth: usize) -> Result<TreeNode> {
    check_inputs(x, y, sample_weights)?;
    let order = canonical_order(x, y, sample_weights);
    let xs = x.select(&order);
    let ys: Vec<bool> = order.iter().map(|&i| y[i]).collect();
    let ws: Vec<f64> = order.iter().map(|&i| sample_weights[i]).collect();
    Ok(TreeBuilder::new(&xs, &ys).fit(&ws, max_depth))
}

pub(crate) fn check_inputs(x: &SparseMatrix, y: &[bool], w: &[f64]) -> Result<()> {
    if x.num_rows() == 0 {
        return Err(Error::EmptyData);
    }
    if y.len() != x.num_rows() || w.len() != x.num_rows() {
        return Err(Error::Dimension(format!(
            "{} rows, {} labels, {} weights",
            x.num_rows(),
            y.len(),
            w.len()
        )));
    }
    if w.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidConfig("sample weights must be finite and non-negative".into()));
    }
    Ok(())
}

use crate::error::{Error, Result};
use crate::textproc::WeightedVector;

/// Value lookup for one sample's feature vector.
pub trait FeatureValues {
    fn value(&self, feature: usize) -> f64;
}

impl FeatureValues for WeightedVector {
    fn value(&self, feature: usize) -> f64 {
        self.get(feature)
    }
}

impl FeatureValues for [f64] {
    fn value(&self, feature: usize) -> f64 {
        self.get(feature).copied().unwrap_or(0.0)
    }
}

impl FeatureValues for Vec<f64> {
    fn value(&self, feature: usize) -> f64 {
        self.as_slice().value(feature)
    }
}

/// Row-major sparse sample matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseMatrix {
    rows: Vec<WeightedVector>,
    num_features: usize,
}

impl SparseMatrix {
    pub fn new(rows: Vec<WeightedVector>, num_features: usize) -> Result<Self> {
        for r in &rows {
            if let Some(i) = r.max_index() {
                if i >= num_features {
                    return Err(Error::FeatureOutOfRange {
                        index: i,
                        num_features,
                    });
                }
            }
        }
        Ok(SparseMatrix { rows, num_features })
    }

    /// Dense helper for small fixtures.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let num_features = rows.iter().map(Vec::len).max().unwrap_or(0);
        let rows = rows
            .iter()
            .map(|r| WeightedVector::from_pairs(r.iter().copied().enumerate()))
            .collect();
        SparseMatrix { rows, num_features }
    }

    pub fn rows(&self) -> &[WeightedVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &WeightedVector {
        &self.rows[i]
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn select(&self, indices: &[usize]) -> SparseMatrix {
        SparseMatrix {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            num_features: self.num_features,
        }
    }

    /// Column-major copy: per feature, `(row, value)` for non-zero entries in
    /// row order.
    pub(crate) fn columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.num_features];
        for (r, row) in self.rows.iter().enumerate() {
            for (f, v) in row.iter() {
                cols[f].push((r, v));
            }
        }
        cols
    }
}

/// Permutation that sorts samples by (features, label, weight). Fitting on
/// this order makes every floating-point sum independent of input order.
pub(crate) fn canonical_order(x: &SparseMatrix, y: &[bool], w: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.num_rows()).collect();
    idx.sort_by(|&a, &b| {
        let ra = x.row(a).iter().map(|(i, v)| (i, v.to_bits()));
        let rb = x.row(b).iter().map(|(i, v)| (i, v.to_bits()));
        ra.cmp(rb)
            .then(y[a].cmp(&y[b]))
            .then(w[a].to_bits().cmp(&w[b].to_bits()))
    });
    idx
}

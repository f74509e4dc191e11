use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::boost::{fit_adaboost, BoostParams};
use super::matrix::SparseMatrix;
use crate::error::{Error, Result};
use crate::seed::SeedKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut c = Confusion::default();
        for (p, a) in pairs {
            c.record(p, a);
        }
        c
    }

    /// Zero when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        harmonic(self.precision(), self.recall())
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// `2pr / (p + r)`, zero when both are zero.
pub fn harmonic(p: f64, r: f64) -> f64 {
    if p + r <= 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub folds: usize,
    pub confusion: Confusion,
}

/// Stratified fold assignment: each class is dealt round-robin over the
/// folds, in index order or shuffled by `seed`. Returns the fold of each
/// sample and the effective number of folds.
pub fn stratified_folds(y: &[bool], k: usize, seed: Option<u64>) -> Result<(Vec<usize>, usize)> {
    let positives: Vec<usize> = (0..y.len()).filter(|&i| y[i]).collect();
    let negatives: Vec<usize> = (0..y.len()).filter(|&i| !y[i]).collect();
    if positives.len() < 2 || negatives.len() < 2 {
        return Err(Error::SingleClass);
    }
    // Round-robin dealing leaves every training fold with both classes as
    // long as each class has two members.
    let k_eff = k.clamp(2, y.len());
    if k_eff != k {
        tracing::warn!(requested = k, using = k_eff, "reducing number of folds");
    }
    let mut folds = vec![0; y.len()];
    for (class, mut members) in [positives, negatives].into_iter().enumerate() {
        if let Some(s) = seed {
            members.shuffle(&mut SeedKey::new(s).with_u64(class as u64).rng());
        }
        for (j, i) in members.into_iter().enumerate() {
            folds[i] = j % k_eff;
        }
    }
    Ok((folds, k_eff))
}

/// Pooled k-fold cross-validation of AdaBoost; precision, recall and F1 of
/// the positive class over all held-out predictions.
pub fn cross_validate(x: &SparseMatrix, y: &[bool], k: usize, params: BoostParams) -> Result<CvReport> {
    if x.num_rows() != y.len() {
        return Err(Error::Dimension(format!("{} rows vs {} labels", x.num_rows(), y.len())));
    }
    let (folds, k_eff) = stratified_folds(y, k, None)?;
    let mut confusion = Confusion::default();
    for fold in 0..k_eff {
        let train: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != fold).collect();
        let test: Vec<usize> = (0..y.len()).filter(|&i| folds[i] == fold).collect();
        let ytrain: Vec<bool> = train.iter().map(|&i| y[i]).collect();
        let model = fit_adaboost(&x.select(&train), &ytrain, params)?;
        for &i in &test {
            confusion.record(model.label_of(x.row(i)), y[i]);
        }
    }
    Ok(CvReport {
        precision: confusion.precision(),
        recall: confusion.recall(),
        f1: confusion.f1(),
        folds: k_eff,
        confusion,
    })
}

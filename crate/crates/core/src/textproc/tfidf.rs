use super::tokenize::CurationPolicy;
use super::vector::{TermVector, WeightedVector};
use super::vocab::{build_vocabulary, count_vector, Vocabulary};
use crate::error::{Error, Result};

/// Raw term frequency times `ln(num_docs / doc_freq)`; no sublinear tf and
/// no length normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    vocab: Vocabulary,
    idf: Vec<f64>,
}

impl TfIdfModel {
    pub fn fit(documents: &[Vec<String>], policy: &CurationPolicy) -> Result<Self> {
        Ok(Self::from_vocabulary(build_vocabulary(documents, policy)?))
    }

    pub fn from_vocabulary(vocab: Vocabulary) -> Self {
        let n = vocab.num_docs() as f64;
        let idf = (0..vocab.len())
            .map(|i| (n / vocab.doc_freq(i) as f64).ln().max(0.0))
            .collect();
        TfIdfModel { vocab, idf }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn num_features(&self) -> usize {
        self.idf.len()
    }

    pub fn counts<S: AsRef<str>>(&self, tokens: &[S]) -> TermVector {
        count_vector(tokens, &self.vocab)
    }

    pub fn transform<S: AsRef<str>>(&self, tokens: &[S]) -> WeightedVector {
        self.weigh(&self.counts(tokens))
    }

    /// Weights a count vector; zero-idf terms are omitted.
    pub fn weigh(&self, counts: &TermVector) -> WeightedVector {
        WeightedVector::from_sorted(
            counts
                .iter()
                .map(|(i, c)| (i, f64::from(c) * self.idf[i]))
                .collect(),
        )
    }
}

/// Fit-then-transform wrapper that reports use before fitting.
#[derive(Debug, Clone, Default)]
pub struct TfIdfVectorizer {
    model: Option<TfIdfModel>,
}

impl TfIdfVectorizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fit(&mut self, documents: &[Vec<String>], policy: &CurationPolicy) -> Result<&TfIdfModel> {
        Ok(self.model.insert(TfIdfModel::fit(documents, policy)?))
    }

    pub fn transform<S: AsRef<str>>(&self, tokens: &[S]) -> Result<WeightedVector> {
        self.model.as_ref().map(|m| m.transform(tokens)).ok_or(Error::NotFitted)
    }

    pub fn model(&self) -> Option<&TfIdfModel> {
        self.model.as_ref()
    }
}

use std::collections::HashMap;
use std::fmt::Write as _;

use super::tokenize::{CurationMode, CurationPolicy};
use super::vector::TermVector;
use crate::error::{Error, Result};

/// Term ↔ dense index map with document frequencies.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    num_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self, index: usize) -> usize {
        self.doc_freq[index]
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    /// `term\tindex\tdoc_freq` per line, in index order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let _ = writeln!(out, "{t}\t{i}\t{}", self.doc_freq[i]);
        }
        out
    }

    /// Parses the TSV export. `num_docs` is not part of the format.
    pub fn from_tsv(text: &str, num_docs: usize) -> Result<Self> {
        let mut vocab = Vocabulary {
            num_docs,
            ..Default::default()
        };
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
            let bad = |m: &str| Error::Parse {
                line: n + 1,
                message: m.to_owned(),
            };
            let mut cols = line.split('\t');
            let (Some(term), Some(idx), Some(df), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
                return Err(bad("expected three tab-separated columns"));
            };
            let idx: usize = idx.parse().map_err(|_| bad("bad index"))?;
            let df: usize = df.parse().map_err(|_| bad("bad doc_freq"))?;
            if idx != vocab.terms.len() {
                return Err(bad("indices must be dense and in order"));
            }
            if vocab.index.insert(term.to_owned(), idx).is_some() {
                return Err(bad("duplicate term"));
            }
            vocab.terms.push(term.to_owned());
            vocab.doc_freq.push(df);
        }
        Ok(vocab)
    }
}

/// Builds a vocabulary over tokenized documents. Terms are indexed in order
/// of first appearance; under the curated policy terms with fewer than
/// `min_term_count` corpus occurrences are dropped.
pub fn build_vocabulary(documents: &[Vec<String>], policy: &CurationPolicy) -> Result<Vocabulary> {
    if documents.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut order: Vec<&str> = Vec::new();
    let mut stats: HashMap<&str, (usize, usize, usize)> = HashMap::new(); // count, df, last doc
    for (d, doc) in documents.iter().enumerate() {
        for tok in doc {
            let entry = stats.entry(tok.as_str()).or_insert_with(|| {
                order.push(tok.as_str());
                (0, 0, usize::MAX)
            });
            entry.0 += 1;
            if entry.2 != d {
                entry.1 += 1;
                entry.2 = d;
            }
        }
    }
    let min_count = match policy.mode {
        CurationMode::Raw => 1,
        CurationMode::Curated => policy.min_term_count.max(1),
    };
    let mut vocab = Vocabulary {
        num_docs: documents.len(),
        ..Default::default()
    };
    for term in order {
        let (count, df, _) = stats[term];
        if count >= min_count {
            vocab.index.insert(term.to_owned(), vocab.terms.len());
            vocab.terms.push(term.to_owned());
            vocab.doc_freq.push(df);
        }
    }
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Ok(vocab)
}

/// Counts in-vocabulary tokens; out-of-vocabulary tokens are dropped.
pub fn count_vector<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> TermVector {
    TermVector::from_indices(tokens.iter().filter_map(|t| vocab.index_of(t.as_ref())))
}

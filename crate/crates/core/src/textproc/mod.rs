//! Tokenization, vocabulary curation, sparse count vectors and TF-IDF.

mod tfidf;
mod tokenize;
mod vector;
mod vocab;

pub use tfidf::{TfIdfModel, TfIdfVectorizer};
pub use tokenize::{parse_stopwords, tokenize, CurationMode, CurationPolicy, Normalizer, DEFAULT_STOPWORDS};
pub use vector::{TermVector, WeightedVector};
pub use vocab::{build_vocabulary, count_vector, Vocabulary};

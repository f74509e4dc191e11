use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

/// Standard English stopword list shipped with the crate.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurationMode {
    /// Lowercase and drop URLs; keep everything else as written.
    Raw,
    /// Drop URLs, mentions, stopwords and rare terms; unwrap hashtags.
    Curated,
}

/// Token rewriting hook (lemmatizers, stemmers). Must be idempotent.
pub trait Normalizer: Send + Sync {
    fn normalize(&self, token: &str) -> String;
}

impl<F> Normalizer for F
where
    F: Fn(&str) -> String + Send + Sync,
{
    fn normalize(&self, token: &str) -> String {
        self(token)
    }
}

#[derive(Clone)]
pub struct CurationPolicy {
    pub mode: CurationMode,
    pub min_term_count: usize,
    pub stopwords: HashSet<String>,
    pub normalizer: Option<Arc<dyn Normalizer>>,
}

impl fmt::Debug for CurationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurationPolicy")
            .field("mode", &self.mode)
            .field("min_term_count", &self.min_term_count)
            .field("stopwords", &self.stopwords.len())
            .field("normalizer", &self.normalizer.is_some())
            .finish()
    }
}

impl CurationPolicy {
    pub fn raw() -> Self {
        CurationPolicy {
            mode: CurationMode::Raw,
            min_term_count: 1,
            stopwords: HashSet::new(),
            normalizer: None,
        }
    }

    /// Curated policy with the shipped stopword list and `min_term_count = 5`.
    pub fn curated() -> Self {
        Self::curated_with(parse_stopwords(DEFAULT_STOPWORDS))
    }

    pub fn curated_with(stopwords: HashSet<String>) -> Self {
        CurationPolicy {
            mode: CurationMode::Curated,
            min_term_count: 5,
            stopwords,
            normalizer: None,
        }
    }

    pub fn with_min_term_count(mut self, n: usize) -> Self {
        self.min_term_count = n;
        self
    }

    pub fn with_normalizer(mut self, normalizer: Arc<dyn Normalizer>) -> Self {
        self.normalizer = Some(normalizer);
        self
    }
}

/// Parses a stopword file: one token per line, blank lines and `#` comments
/// ignored.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn is_url(chunk: &str) -> bool {
    chunk.starts_with("http://") || chunk.starts_with("https://") || chunk.starts_with("www.")
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits a lowercased whitespace chunk into word runs; a `#` or `@`
/// directly in front of a run stays attached to it.
fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    let mut current = String::new();
    let mut prefix: Option<char> = None;
    for c in chunk.chars() {
        if is_word_char(c) {
            if current.is_empty() {
                if let Some(p) = prefix.take() {
                    current.push(p);
                }
            }
            current.push(c);
        } else {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            prefix = matches!(c, '#' | '@').then_some(c);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
}

pub fn tokenize(text: &str, policy: &CurationPolicy) -> Vec<String> {
    let mut raw = Vec::new();
    for chunk in text.split_whitespace() {
        let lower = chunk.to_lowercase();
        if is_url(&lower) {
            continue;
        }
        split_chunk(&lower, &mut raw);
    }
    match policy.mode {
        CurationMode::Raw => raw,
        CurationMode::Curated => raw
            .into_iter()
            .filter_map(|tok| {
                if tok.starts_with('@') {
                    return None;
                }
                let word = tok.strip_prefix('#').unwrap_or(&tok);
                let word = match &policy.normalizer {
                    Some(n) => n.normalize(word),
                    None => word.to_owned(),
                };
                (!word.is_empty() && !policy.stopwords.contains(&word)).then_some(word)
            })
            .collect(),
    }
}

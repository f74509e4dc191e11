use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("duplicate post id {0:?}")]
    DuplicatePostId(String),

    #[error("invalid corpus record at line {line}: {message}")]
    InvalidRecord { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("user {user} has no {platform} timeline")]
    MissingPlatform { user: String, platform: String },

    #[error("not enough posts: needed {needed}, available {available}")]
    InsufficientPosts { needed: usize, available: usize },

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("model used before fit")]
    NotFitted,

    #[error("unscoreable post: no in-vocabulary terms")]
    UnscoreablePost,

    #[error("gini impurity undefined for all-zero class weights")]
    ZeroWeights,

    #[error("empty training data")]
    EmptyData,

    #[error("training labels contain a single class")]
    SingleClass,

    #[error("feature index {index} out of range for {num_features} features")]
    FeatureOutOfRange { index: usize, num_features: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("need at least {needed} users, have {available}")]
    TooFewUsers { needed: usize, available: usize },

    #[error("learning curve has {0} points, at least 3 required")]
    CurveTooShort(usize),

    #[error("model dump: {0}")]
    Dump(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

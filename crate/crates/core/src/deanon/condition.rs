use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Platform, Post, UserRecord};
use crate::error::Error;

/// Share of a Twitter timeline eligible for training when Twitter is also
/// the test source; the remaining (most recent) posts are queries.
pub const TRAIN_FRACTION: f64 = 0.8;

/// `(training sources, test source)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "TT")]
    TT,
    #[serde(rename = "TFI_T")]
    TfiT,
    #[serde(rename = "T_F")]
    TF,
    #[serde(rename = "TI_F")]
    TiF,
    #[serde(rename = "T_I")]
    TI,
    #[serde(rename = "TF_I")]
    TfI,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::TT,
        Condition::TfiT,
        Condition::TF,
        Condition::TiF,
        Condition::TI,
        Condition::TfI,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::TT => "TT",
            Condition::TfiT => "TFI_T",
            Condition::TF => "T_F",
            Condition::TiF => "TI_F",
            Condition::TI => "T_I",
            Condition::TfI => "TF_I",
        }
    }

    /// Extra training platforms mixed into the Twitter training sample.
    pub fn extras(self) -> &'static [Platform] {
        match self {
            Condition::TT | Condition::TF | Condition::TI => &[],
            Condition::TfiT => &[Platform::Foursquare, Platform::Instagram],
            Condition::TiF => &[Platform::Instagram],
            Condition::TfI => &[Platform::Foursquare],
        }
    }

    pub fn test_platform(self) -> Platform {
        match self {
            Condition::TT | Condition::TfiT => Platform::Twitter,
            Condition::TF | Condition::TiF => Platform::Foursquare,
            Condition::TI | Condition::TfI => Platform::Instagram,
        }
    }

    fn twitter_split(user: &UserRecord) -> usize {
        let n = user.posts(Platform::Twitter).len();
        (TRAIN_FRACTION * n as f64).floor() as usize
    }

    /// Posts eligible for training sampling on `platform`.
    pub fn train_pool(self, user: &UserRecord, platform: Platform) -> &[Post] {
        let posts = user.posts(platform);
        if platform == Platform::Twitter && self.test_platform() == Platform::Twitter {
            &posts[..Self::twitter_split(user)]
        } else {
            posts
        }
    }

    /// Posts from which anonymous queries are drawn.
    pub fn test_pool(self, user: &UserRecord) -> &[Post] {
        let platform = self.test_platform();
        let posts = user.posts(platform);
        if platform == Platform::Twitter {
            &posts[Self::twitter_split(user)..]
        } else {
            posts
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown condition {s:?}")))
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Twitter,
    Instagram,
    Foursquare,
}

impl Platform {
    pub const ALL: [Platform; 3] = [Platform::Twitter, Platform::Instagram, Platform::Foursquare];

    pub fn as_str(self) -> &'static str {
        match self {
            Platform::Twitter => "twitter",
            Platform::Instagram => "instagram",
            Platform::Foursquare => "foursquare",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Platform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "twitter" => Ok(Platform::Twitter),
            "instagram" => Ok(Platform::Instagram),
            "foursquare" => Ok(Platform::Foursquare),
            other => Err(Error::InvalidConfig(format!("unknown platform {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub id: String,
    pub user_id: String,
    pub platform: Platform,
    pub timestamp: i64,
    pub text: String,
    /// Foursquare category of the check-in.
    pub venue_category: Option<String>,
}

impl Post {
    /// Total order used by every "iterate posts in order" procedure.
    pub fn order_key(&self) -> (i64, &str) {
        (self.timestamp, self.id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    pub user_id: String,
    pub platform: Platform,
    posts: Vec<Post>,
}

impl Timeline {
    /// Builds a timeline, sorting posts by `(timestamp, id)`.
    pub fn new(user_id: impl Into<String>, platform: Platform, mut posts: Vec<Post>) -> Self {
        posts.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        Timeline {
            user_id: user_id.into(),
            platform,
            posts,
        }
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub(crate) fn push_sorted(&mut self, post: Post) {
        let pos = self
            .posts
            .partition_point(|p| p.order_key() <= post.order_key());
        self.posts.insert(pos, post);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRecord {
    pub user_id: String,
    pub timelines: BTreeMap<Platform, Timeline>,
}

impl UserRecord {
    pub fn timeline(&self, platform: Platform) -> Option<&Timeline> {
        self.timelines.get(&platform)
    }

    /// Posts on `platform`, empty when the user has no such timeline.
    pub fn posts(&self, platform: Platform) -> &[Post] {
        self.timelines.get(&platform).map(Timeline::posts).unwrap_or(&[])
    }

    pub fn post_count(&self) -> usize {
        self.timelines.values().map(Timeline::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    users: BTreeMap<String, UserRecord>,
    venue_taxonomy: BTreeSet<String>,
}

impl Corpus {
    /// Assembles a corpus from posts, validating ids and per-post invariants.
    pub fn from_posts(posts: impl IntoIterator<Item = Post>) -> Result<Self> {
        let mut corpus = Corpus::default();
        let mut seen = BTreeSet::new();
        for post in posts {
            validate_post(&post).map_err(|message| Error::InvalidRecord { line: 0, message })?;
            if !seen.insert(post.id.clone()) {
                return Err(Error::DuplicatePostId(post.id));
            }
            corpus.insert_unchecked(post);
        }
        if corpus.users.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(corpus)
    }

    pub(crate) fn insert_unchecked(&mut self, post: Post) {
        if let Some(cat) = &post.venue_category {
            self.venue_taxonomy.insert(cat.clone());
        }
        let user = self
            .users
            .entry(post.user_id.clone())
            .or_insert_with(|| UserRecord {
                user_id: post.user_id.clone(),
                timelines: BTreeMap::new(),
            });
        user.timelines
            .entry(post.platform)
            .or_insert_with(|| Timeline::new(post.user_id.clone(), post.platform, Vec::new()))
            .push_sorted(post);
    }

    pub fn set_venue_taxonomy(&mut self, taxonomy: impl IntoIterator<Item = String>) {
        self.venue_taxonomy = taxonomy.into_iter().collect();
    }

    pub fn users(&self) -> impl Iterator<Item = &UserRecord> {
        self.users.values()
    }

    pub fn user(&self, user_id: &str) -> Option<&UserRecord> {
        self.users.get(user_id)
    }

    pub fn user_ids(&self) -> impl Iterator<Item = &str> {
        self.users.keys().map(String::as_str)
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn venue_taxonomy(&self) -> &BTreeSet<String> {
        &self.venue_taxonomy
    }

    pub fn post_count(&self, platform: Platform) -> usize {
        self.users.values().map(|u| u.posts(platform).len()).sum()
    }

    pub fn total_posts(&self) -> usize {
        self.users.values().map(UserRecord::post_count).sum()
    }

    /// All posts in (user, platform, timestamp, id) order.
    pub fn posts(&self) -> impl Iterator<Item = &Post> {
        self.users
            .values()
            .flat_map(|u| u.timelines.values().flat_map(|t| t.posts().iter()))
    }
}

pub(crate) fn validate_post(post: &Post) -> std::result::Result<(), String> {
    if post.id.is_empty() {
        return Err("empty post id".into());
    }
    if post.user_id.is_empty() {
        return Err("empty user_id".into());
    }
    if post.platform != Platform::Foursquare {
        if post.venue_category.is_some() {
            return Err(format!(
                "venue_category is only allowed on foursquare posts (post {})",
                post.id
            ));
        }
        if post.text.is_empty() {
            return Err(format!("empty text on {} post {}", post.platform, post.id));
        }
    }
    Ok(())
}

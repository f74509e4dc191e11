//! JSON-lines corpus ingestion and serialization.
//!
//! One post per line:
//! `{"id": str, "user_id": str, "platform": "twitter"|"instagram"|"foursquare", "ts": int, "text": str, "venue_category": str|null}`.
//! A corpus directory holds `corpus.jsonl` and optionally `venues.txt`
//! (one category per line), which overrides the inferred taxonomy.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{validate_post, Corpus, Platform, Post};
use crate::error::{Error, Result};

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const VENUES_FILE: &str = "venues.txt";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PostRecord {
    id: String,
    user_id: String,
    platform: Platform,
    ts: i64,
    text: String,
    #[serde(default)]
    venue_category: Option<String>,
}

impl From<PostRecord> for Post {
    fn from(r: PostRecord) -> Self {
        Post {
            id: r.id,
            user_id: r.user_id,
            platform: r.platform,
            timestamp: r.ts,
            text: r.text,
            venue_category: r.venue_category,
        }
    }
}

impl From<&Post> for PostRecord {
    fn from(p: &Post) -> Self {
        PostRecord {
            id: p.id.clone(),
            user_id: p.user_id.clone(),
            platform: p.platform,
            ts: p.timestamp,
            text: p.text.clone(),
            venue_category: p.venue_category.clone(),
        }
    }
}

/// Loads a corpus from a JSON-lines file, or from a directory containing
/// `corpus.jsonl` and an optional `venues.txt`.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let (file, venues) = if path.is_dir() {
        (path.join(CORPUS_FILE), Some(path.join(VENUES_FILE)))
    } else {
        (path.to_path_buf(), None)
    };
    let reader = fs::File::open(&file).map_err(|e| Error::io(&file, e))?;
    let mut corpus = read_corpus(BufReader::new(reader))?;
    if let Some(venues) = venues.filter(|v| v.exists()) {
        let text = fs::read_to_string(&venues).map_err(|e| Error::io(&venues, e))?;
        corpus.set_venue_taxonomy(parse_venues(&text));
    }
    tracing::info!(
        users = corpus.num_users(),
        twitter = corpus.post_count(Platform::Twitter),
        instagram = corpus.post_count(Platform::Instagram),
        foursquare = corpus.post_count(Platform::Foursquare),
        "loaded corpus"
    );
    Ok(corpus)
}

pub fn read_corpus(reader: impl Read) -> Result<Corpus> {
    let reader = BufReader::new(reader);
    let mut corpus = Corpus::default();
    let mut ids = BTreeSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PostRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let post = Post::from(record);
        validate_post(&post).map_err(|message| Error::InvalidRecord {
            line: line_no,
            message,
        })?;
        if !ids.insert(post.id.clone()) {
            return Err(Error::DuplicatePostId(post.id));
        }
        corpus.insert_unchecked(post);
    }
    if corpus.num_users() == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(corpus)
}

pub fn parse_venues(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Writes posts in canonical (user, platform, timestamp, id) order.
pub fn write_corpus(corpus: &Corpus, mut out: impl Write) -> std::io::Result<()> {
    for post in corpus.posts() {
        let line = serde_json::to_string(&PostRecord::from(post)).map_err(std::io::Error::other)?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes `corpus.jsonl` and `venues.txt` into `dir`.
pub fn save_corpus_dir(corpus: &Corpus, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let file = dir.join(CORPUS_FILE);
    let mut buf = Vec::new();
    write_corpus(corpus, &mut buf).map_err(|e| Error::io(&file, e))?;
    fs::write(&file, buf).map_err(|e| Error::io(&file, e))?;
    let venues = dir.join(VENUES_FILE);
    let mut text = String::new();
    for v in corpus.venue_taxonomy() {
        text.push_str(v);
        text.push('\n');
    }
    fs::write(&venues, text).map_err(|e| Error::io(&venues, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_USERS: &str = r#"{"id":"1","user_id":"a","platform":"twitter","ts":3,"text":"one","venue_category":null}
{"id":"2","user_id":"a","platform":"twitter","ts":1,"text":"two","venue_category":null}
{"id":"3","user_id":"a","platform":"foursquare","ts":2,"text":"","venue_category":"Brewery"}
{"id":"4","user_id":"b","platform":"instagram","ts":1,"text":"four","venue_category":null}
{"id":"5","user_id":"b","platform":"twitter","ts":1,"text":"five","venue_category":null}
{"id":"6","user_id":"b","platform":"twitter","ts":9,"text":"six"}
"#;

    #[test]
    fn counts_users_and_posts() {
        let corpus = read_corpus(TWO_USERS.as_bytes()).unwrap();
        assert_eq!(corpus.num_users(), 2);
        assert_eq!(corpus.total_posts(), 6);
        assert_eq!(corpus.post_count(Platform::Twitter), 4);
        assert!(corpus.venue_taxonomy().contains("Brewery"));
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(read_corpus("".as_bytes()), Err(Error::EmptyCorpus)));
        assert!(matches!(read_corpus("\n\n".as_bytes()), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn missing_user_id_reports_line() {
        let text = "{\"id\":\"1\",\"user_id\":\"a\",\"platform\":\"twitter\",\"ts\":1,\"text\":\"x\"}\n\
                    {\"id\":\"2\",\"platform\":\"twitter\",\"ts\":1,\"text\":\"x\"}\n";
        match read_corpus(text.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("user_id"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = "{\"id\":\"1\",\"user_id\":\"a\",\"platform\":\"twitter\",\"ts\":1,\"text\":\"x\"}\n\
                    {\"id\":\"1\",\"user_id\":\"b\",\"platform\":\"twitter\",\"ts\":1,\"text\":\"y\"}\n";
        assert!(matches!(read_corpus(text.as_bytes()), Err(Error::DuplicatePostId(_))));
    }

    #[test]
    fn venues_file_overrides_taxonomy() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(CORPUS_FILE), TWO_USERS).unwrap();
        fs::write(dir.path().join(VENUES_FILE), "Gym\nBrewery\n\nResort\n").unwrap();
        let corpus = load_corpus(dir.path()).unwrap();
        let names: Vec<_> = corpus.venue_taxonomy().iter().cloned().collect();
        assert_eq!(names, ["Brewery", "Gym", "Resort"]);
    }

    #[test]
    fn write_then_read_is_identity() {
        let corpus = read_corpus(TWO_USERS.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_corpus(&corpus, &mut buf).unwrap();
        assert_eq!(read_corpus(buf.as_slice()).unwrap(), corpus);
    }
}

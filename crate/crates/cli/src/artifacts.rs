//! Staged artifact writing and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use crate::config::{parse_pairs, Settings};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Artifacts are collected in memory and only written once a command has
/// finished, so a failed run leaves nothing behind.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.into(), bytes.into()));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn hashes(&self) -> Vec<(String, String)> {
        self.files.iter().map(|(n, b)| (n.clone(), sha256_hex(b))).collect()
    }

    /// Writes every artifact plus the manifest. On any error the files
    /// already written are removed again.
    pub fn commit(&self, dir: &Path, manifest: &Manifest) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written: Vec<PathBuf> = Vec::new();
        let manifest_name = manifest.file_name();
        let manifest_bytes = manifest.render(&self.hashes());
        let mut all: Vec<(&str, &[u8])> = self.files.iter().map(|(n, b)| (n.as_str(), b.as_slice())).collect();
        all.push((&manifest_name, manifest_bytes.as_bytes()));
        let result = (|| -> Result<()> {
            for (name, bytes) in all {
                let path = dir.join(name);
                let tmp = dir.join(format!(".{name}.partial"));
                fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
                written.push(tmp.clone());
                fs::rename(&tmp, &path).with_context(|| format!("renaming to {}", path.display()))?;
                written.pop();
                written.push(path);
            }
            Ok(())
        })();
        if let Err(e) = result {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        Ok(written)
    }
}

/// What a command was run with: its name, the effective settings and the
/// hash of the input corpus file.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub settings: Settings,
    pub corpus_sha256: Option<String>,
}

pub const MANIFEST_PREFIX: &str = "manifest-";

impl Manifest {
    pub fn file_name(&self) -> String {
        format!("{MANIFEST_PREFIX}{}.conf", self.command)
    }

    pub fn render(&self, artifacts: &[(String, String)]) -> String {
        let mut out = String::from("# leakscope run manifest\n");
        out.push_str(&format!("command = {}\n", self.command));
        for (k, v) in self.settings.to_pairs() {
            out.push_str(&format!("{k} = {v}\n"));
        }
        if let Some(h) = &self.corpus_sha256 {
            out.push_str(&format!("corpus_sha256 = {h}\n"));
        }
        for (name, hash) in artifacts {
            out.push_str(&format!("artifact.{name} = {hash}\n"));
        }
        out
    }

    /// Parses a rendered manifest back into the run description and the
    /// recorded artifact hashes.
    pub fn parse(text: &str) -> Result<(Manifest, Vec<(String, String)>)> {
        let mut command = None;
        let mut corpus_sha256 = None;
        let mut settings = Settings::default();
        let mut artifacts = Vec::new();
        for (k, v) in parse_pairs(text)? {
            if k == "command" {
                command = Some(v);
            } else if k == "corpus_sha256" {
                corpus_sha256 = Some(v);
            } else if let Some(name) = k.strip_prefix("artifact.") {
                artifacts.push((name.to_owned(), v));
            } else {
                settings.set(&k, &v)?;
            }
        }
        let Some(command) = command else {
            bail!("manifest has no command");
        };
        Ok((
            Manifest {
                command,
                settings,
                corpus_sha256,
            },
            artifacts,
        ))
    }
}

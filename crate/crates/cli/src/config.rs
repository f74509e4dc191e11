//! Flat `key = value` settings shared by the config file, CLI overrides
//! and run manifests.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use leakscope_core::activesim::{default_lambda_grid, DEFAULT_BUDGET, DEFAULT_FOLDS};
use leakscope_core::corpus::synthetic::SyntheticConfig;
use leakscope_core::deanon::{Condition, ANON_POSTS_GRID, DEFAULT_DELTA, DEFAULT_RUNS, POSTS_SEEN_GRID};
use leakscope_core::infoscore::{DEFAULT_ALPHA, DEFAULT_LAMBDA};

pub const CONFIG_FILE: &str = "leakscope.conf";

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("line {}: expected key = value, got {raw:?}", n + 1);
        };
        out.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    Ok(out)
}

pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_pairs(&text).with_context(|| format!("in {}", path.display()))
}

/// Budget for a truncated timeline: a post count or the whole timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Posts(usize),
    Full,
}

impl Budget {
    pub fn posts(self) -> usize {
        match self {
            Budget::Posts(n) => n,
            Budget::Full => usize::MAX,
        }
    }
}

impl FromStr for Budget {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "full" {
            return Ok(Budget::Full);
        }
        let n: usize = s.parse().with_context(|| format!("budget {s:?} is neither a count nor \"full\""))?;
        if n == 0 {
            bail!("budget must be positive");
        }
        Ok(Budget::Posts(n))
    }
}

impl Display for Budget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Budget::Posts(n) => write!(f, "{n}"),
            Budget::Full => f.write_str("full"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub corpus: Option<PathBuf>,
    pub seed: u64,
    pub users: usize,
    pub categories: usize,
    pub affinity: f64,
    pub consistency: f64,
    pub conditions: Vec<Condition>,
    pub posts_seen: Vec<usize>,
    pub anon_posts: Vec<usize>,
    pub runs: usize,
    pub delta: f64,
    pub lambdas: Vec<f64>,
    pub lambda: f64,
    pub alpha: f64,
    pub budget: Budget,
    pub slope_budget: Budget,
    pub d: usize,
    pub folds: usize,
    pub sim_seeds: usize,
    pub venues: Vec<String>,
    pub band_min: f64,
    pub band_max: f64,
    pub bind: String,
}

impl Default for Settings {
    fn default() -> Self {
        let synth = SyntheticConfig::default();
        Settings {
            corpus: None,
            seed: 1,
            users: synth.num_users,
            categories: synth.num_venue_categories,
            affinity: synth.venue_affinity_strength,
            consistency: synth.cross_platform_consistency,
            conditions: Condition::ALL.to_vec(),
            posts_seen: POSTS_SEEN_GRID.to_vec(),
            anon_posts: ANON_POSTS_GRID.to_vec(),
            runs: DEFAULT_RUNS,
            delta: DEFAULT_DELTA,
            lambdas: default_lambda_grid(),
            lambda: DEFAULT_LAMBDA,
            alpha: DEFAULT_ALPHA,
            budget: Budget::Posts(DEFAULT_BUDGET),
            slope_budget: Budget::Full,
            d: 1,
            folds: DEFAULT_FOLDS,
            sim_seeds: 10,
            venues: Vec::new(),
            band_min: 0.25,
            band_max: 0.35,
            bind: "127.0.0.1:8080".into(),
        }
    }
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow::anyhow!("{key}: bad value {s:?}: {e}")))
        .collect()
}

fn one<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: Display,
{
    v.parse::<T>().map_err(|e| anyhow::anyhow!("{key}: bad value {v:?}: {e}"))
}

fn join<T: Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl Settings {
    /// Applies pairs in order, so later pairs win.
    pub fn apply(&mut self, pairs: &[(String, String)]) -> Result<()> {
        for (k, v) in pairs {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "corpus" => self.corpus = (!v.is_empty() && v != "synthetic").then(|| PathBuf::from(v)),
            "seed" => self.seed = one(key, v)?,
            "users" => self.users = one(key, v)?,
            "categories" => self.categories = one(key, v)?,
            "affinity" => self.affinity = one(key, v)?,
            "consistency" => self.consistency = one(key, v)?,
            "conditions" => self.conditions = list(key, v)?,
            "posts_seen" => self.posts_seen = list(key, v)?,
            "anon_posts" => self.anon_posts = list(key, v)?,
            "runs" => self.runs = one(key, v)?,
            "delta" => self.delta = one(key, v)?,
            "lambdas" => self.lambdas = list(key, v)?,
            "lambda" => self.lambda = one(key, v)?,
            "alpha" => self.alpha = one(key, v)?,
            "budget" => self.budget = one(key, v)?,
            "slope_budget" => self.slope_budget = one(key, v)?,
            "d" => self.d = one(key, v)?,
            "folds" => self.folds = one(key, v)?,
            "sim_seeds" => self.sim_seeds = one(key, v)?,
            "venues" => self.venues = list(key, v)?,
            "band_min" => self.band_min = one(key, v)?,
            "band_max" => self.band_max = one(key, v)?,
            "bind" => self.bind = v.to_owned(),
            _ => bail!("unknown setting {key:?}"),
        }
        Ok(())
    }

    /// Every setting in canonical form; applying these to the defaults
    /// reproduces `self`.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let corpus = self.corpus.as_ref().map_or_else(|| "synthetic".to_owned(), |p| p.display().to_string());
        let pairs: [(&str, String); 23] = [
            ("corpus", corpus),
            ("seed", self.seed.to_string()),
            ("users", self.users.to_string()),
            ("categories", self.categories.to_string()),
            ("affinity", self.affinity.to_string()),
            ("consistency", self.consistency.to_string()),
            ("conditions", join(&self.conditions)),
            ("posts_seen", join(&self.posts_seen)),
            ("anon_posts", join(&self.anon_posts)),
            ("runs", self.runs.to_string()),
            ("delta", self.delta.to_string()),
            ("lambdas", join(&self.lambdas)),
            ("lambda", self.lambda.to_string()),
            ("alpha", self.alpha.to_string()),
            ("budget", self.budget.to_string()),
            ("slope_budget", self.slope_budget.to_string()),
            ("d", self.d.to_string()),
            ("folds", self.folds.to_string()),
            ("sim_seeds", self.sim_seeds.to_string()),
            ("venues", join(&self.venues)),
            ("band_min", self.band_min.to_string()),
            ("band_max", self.band_max.to_string()),
            ("bind", self.bind.clone()),
        ];
        pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
    }

    pub fn synthetic(&self) -> SyntheticConfig {
        SyntheticConfig {
            num_users: self.users,
            num_venue_categories: self.categories,
            venue_affinity_strength: self.affinity,
            cross_platform_consistency: self.consistency,
            seed: self.seed,
            ..SyntheticConfig::default()
        }
    }
}

pub fn pairs_map(pairs: &[(String, String)]) -> BTreeMap<String, String> {
    pairs.iter().cloned().collect()
}

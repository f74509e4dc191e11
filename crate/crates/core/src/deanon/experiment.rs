use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::condition::Condition;
use super::model::{best_user, fit_index_keyed, index_key, DeanonIndex, DEFAULT_DELTA};
use crate::corpus::{sample, Corpus};
use crate::error::{Error, Result};
use crate::seed::SeedKey;

pub const POSTS_SEEN_GRID: [usize; 5] = [50, 100, 200, 500, 1000];
pub const ANON_POSTS_GRID: [usize; 4] = [1, 5, 15, 20];
pub const DEFAULT_RUNS: usize = 10;

pub const CSV_HEADER: &str = "condition,posts_seen,num_anon_posts,run,accuracy,micro_f1,excluded_users";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeanonRun {
    pub condition: Condition,
    pub posts_seen: Vec<usize>,
    pub num_anon_posts: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    pub delta: f64,
}

impl DeanonRun {
    pub fn new(condition: Condition, seed: u64) -> Self {
        DeanonRun {
            condition,
            posts_seen: POSTS_SEEN_GRID.to_vec(),
            num_anon_posts: ANON_POSTS_GRID.to_vec(),
            runs: DEFAULT_RUNS,
            seed,
            delta: DEFAULT_DELTA,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.runs == 0 || self.posts_seen.is_empty() || self.num_anon_posts.is_empty() {
            return Err(Error::InvalidConfig("deanon grid and runs must be nonempty".into()));
        }
        if self.num_anon_posts.contains(&0) {
            return Err(Error::InvalidConfig("num_anon_posts must be positive".into()));
        }
        Ok(())
    }
}

/// One cell × run outcome. `trials + excluded_users` is the corpus size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeanonRow {
    pub condition: Condition,
    pub posts_seen: usize,
    pub num_anon_posts: usize,
    pub run: usize,
    pub correct: usize,
    pub trials: usize,
    pub excluded_users: usize,
}

impl DeanonRow {
    pub fn accuracy(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.correct as f64 / self.trials as f64
        }
    }

    /// Single-label prediction makes micro-F1 coincide with top-1 accuracy.
    pub fn micro_f1(&self) -> f64 {
        self.accuracy()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeanonTable {
    pub rows: Vec<DeanonRow>,
}

impl DeanonTable {
    /// Mean accuracy over runs for one cell.
    pub fn mean_accuracy(&self, posts_seen: usize, num_anon_posts: usize) -> Option<f64> {
        let accs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.posts_seen == posts_seen && r.num_anon_posts == num_anon_posts)
            .map(DeanonRow::accuracy)
            .collect();
        (!accs.is_empty()).then(|| accs.iter().sum::<f64>() / accs.len() as f64)
    }

    fn cells(&self) -> Vec<(Condition, usize, usize)> {
        let mut cells: Vec<_> = self
            .rows
            .iter()
            .map(|r| (r.condition, r.posts_seen, r.num_anon_posts))
            .collect();
        cells.dedup();
        cells
    }

    /// Per-run rows followed by a `mean` row for each cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6},{:.6},{}",
                r.condition,
                r.posts_seen,
                r.num_anon_posts,
                r.run,
                r.accuracy(),
                r.micro_f1(),
                r.excluded_users
            );
        }
        for (c, ps, na) in self.cells() {
            let acc = self.mean_accuracy(ps, na).unwrap_or(0.0);
            let excluded = self
                .rows
                .iter()
                .filter(|r| r.posts_seen == ps && r.num_anon_posts == na)
                .map(|r| r.excluded_users)
                .max()
                .unwrap_or(0);
            let _ = writeln!(out, "{c},{ps},{na},mean,{acc:.6},{acc:.6},{excluded}");
        }
        out
    }
}

fn query_key(seed: u64, condition: Condition, posts_seen: usize, num_anon: usize, run: usize) -> SeedKey {
    SeedKey::new(seed)
        .with_str("deanon-query")
        .with_str(condition.as_str())
        .with_u64(posts_seen as u64)
        .with_u64(num_anon as u64)
        .with_u64(run as u64)
}

/// Scores one cell against a fitted index: every indexed user with enough
/// test posts contributes one query of `num_anon` random test posts.
pub fn evaluate_cell(corpus: &Corpus, index: &DeanonIndex, condition: Condition, num_anon: usize, key: SeedKey) -> (usize, usize) {
    let mut correct = 0;
    let mut trials = 0;
    for user_id in index.models.keys() {
        let user = corpus.user(user_id).expect("index users come from the corpus");
        let pool = condition.test_pool(user);
        if pool.len() < num_anon {
            continue;
        }
        let mut rng = key.with_str(user_id).rng();
        let texts: Vec<String> = sample(pool, num_anon, &mut rng).into_iter().map(|p| p.text).collect();
        let query = index.query(&texts);
        trials += 1;
        if best_user(&query, index) == Some(user_id.as_str()) {
            correct += 1;
        }
    }
    (correct, trials)
}

pub fn run_deanon_experiment(corpus: &Corpus, run: &DeanonRun) -> Result<DeanonTable> {
    run.validate()?;
    let jobs: Vec<(usize, usize)> = run
        .posts_seen
        .iter()
        .flat_map(|&ps| (0..run.runs).map(move |r| (ps, r)))
        .collect();
    let per_job: Vec<Vec<DeanonRow>> = jobs
        .par_iter()
        .map(|&(ps, r)| {
            let index = fit_index_keyed(corpus, run.condition, ps, index_key(run.seed, run.condition, ps, r), run.delta)?;
            Ok(run
                .num_anon_posts
                .iter()
                .map(|&na| {
                    let (correct, trials) =
                        evaluate_cell(corpus, &index, run.condition, na, query_key(run.seed, run.condition, ps, na, r));
                    DeanonRow {
                        condition: run.condition,
                        posts_seen: ps,
                        num_anon_posts: na,
                        run: r,
                        correct,
                        trials,
                        excluded_users: corpus.num_users() - trials,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<DeanonRow> = per_job.into_iter().flatten().collect();
    rows.sort_by_key(|r| {
        let ps = run.posts_seen.iter().position(|&p| p == r.posts_seen);
        let na = run.num_anon_posts.iter().position(|&n| n == r.num_anon_posts);
        (ps, na, r.run)
    });
    Ok(DeanonTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::synthetic::{generate_synthetic, CountRange, SyntheticConfig};

    fn small() -> Corpus {
        generate_synthetic(&SyntheticConfig {
            num_users: 8,
            twitter_posts: CountRange { min: 80, max: 100 },
            ..SyntheticConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn deterministic_and_accounted() {
        let corpus = small();
        let run = DeanonRun {
            posts_seen: vec![50],
            num_anon_posts: vec![1, 5],
            runs: 2,
            ..DeanonRun::new(Condition::TT, 3)
        };
        let a = run_deanon_experiment(&corpus, &run).unwrap();
        let b = run_deanon_experiment(&corpus, &run).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 4);
        for r in &a.rows {
            assert_eq!(r.trials + r.excluded_users, 8);
        }
        assert!(a.to_csv().lines().last().unwrap().contains(",mean,"));
    }

    #[test]
    fn oversized_query_excludes_users() {
        let corpus = small();
        let run = DeanonRun {
            posts_seen: vec![50],
            num_anon_posts: vec![10_000],
            runs: 1,
            ..DeanonRun::new(Condition::TT, 3)
        };
        let t = run_deanon_experiment(&corpus, &run).unwrap();
        assert_eq!(t.rows[0].trials, 0);
        assert_eq!(t.rows[0].excluded_users, 8);
    }

    #[test]
    fn budget_beyond_every_timeline_fails() {
        let run = DeanonRun {
            posts_seen: vec![5000],
            runs: 1,
            ..DeanonRun::new(Condition::TI, 3)
        };
        assert!(matches!(run_deanon_experiment(&small(), &run), Err(Error::TooFewUsers { .. })));
    }
}

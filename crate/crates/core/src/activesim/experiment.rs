use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{aggregate_curves, classify_slope, LearningCurve, SlopeClass, SlopeThresholds};
use super::dataset::VenueDataset;
use super::select::{simulate_user, Policy, RunConfig, SimTrace};
use crate::corpus::{Corpus, Platform};
use crate::ensemble::{
    fit_adaboost, gini_importance, harmonic, stratified_folds, BoostParams, BoostedEnsemble, Confusion, FeatureImportance,
};
use crate::error::{Error, Result};
use crate::infoscore::{relevance, InfoParams};
use crate::seed::SeedKey;
use crate::textproc::{tokenize, CurationPolicy};

pub const CURVE_CSV_HEADER: &str = "venue,policy,lambda,iteration,f1";
pub const SWEEP_CSV_HEADER: &str = "lambda,f1,precision,recall";
pub const SLOPE_CSV_HEADER: &str = "venue,class,mention_frequency";
pub const COMPARISON_CSV_HEADER: &str = "venue,setting,f1";

/// `0.0, 0.1, ..., 1.0`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Cross-validated ensembles for one venue. Every user is simulated with
/// the ensemble of the fold that held them out.
#[derive(Debug, Clone)]
pub struct VenueModels {
    pub venue: String,
    pub labels: Vec<bool>,
    pub folds: Vec<usize>,
    pub ensembles: Vec<BoostedEnsemble>,
    pub importances: Vec<FeatureImportance>,
    /// Per user, per post relevance under the user's held-out ensemble.
    pub relevance: Vec<Vec<f64>>,
    /// Held-out predictions on complete timelines.
    pub full_predictions: Vec<bool>,
}

impl VenueModels {
    pub fn fit(dataset: &VenueDataset, venue: &str, folds: usize, boost: BoostParams, seed: u64) -> Result<Self> {
        let labels = dataset.labels_for(venue);
        let fold_seed = SeedKey::new(seed).with_str("folds").with_str(venue).value();
        let (assignment, k) = stratified_folds(&labels, folds, Some(fold_seed))?;
        let x = dataset.features();
        let mut ensembles = Vec::with_capacity(k);
        for fold in 0..k {
            let train: Vec<usize> = (0..labels.len()).filter(|&i| assignment[i] != fold).collect();
            let y: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
            ensembles.push(fit_adaboost(&x.select(&train), &y, boost)?);
        }
        let importances: Vec<FeatureImportance> = ensembles.iter().map(gini_importance).collect();
        let relevance = dataset
            .users
            .iter()
            .zip(&assignment)
            .map(|(u, &f)| u.posts.iter().map(|p| relevance(p, &importances[f])).collect())
            .collect();
        let full_predictions = (0..labels.len())
            .map(|u| ensembles[assignment[u]].label_of(x.row(u)))
            .collect();
        Ok(VenueModels {
            venue: venue.to_owned(),
            labels,
            folds: assignment,
            ensembles,
            importances,
            relevance,
            full_predictions,
        })
    }

    pub fn full_confusion(&self) -> Confusion {
        Confusion::from_pairs(self.full_predictions.iter().copied().zip(self.labels.iter().copied()))
    }
}

pub fn fit_all_venues(
    dataset: &VenueDataset,
    venues: &[String],
    folds: usize,
    boost: BoostParams,
    seed: u64,
) -> Result<Vec<VenueModels>> {
    venues
        .par_iter()
        .map(|v| VenueModels::fit(dataset, v, folds, boost, seed))
        .collect()
}

fn sim_key(seed: u64, venue: &str, user: &str) -> SeedKey {
    SeedKey::new(seed).with_str("sim").with_str(venue).with_str(user)
}

/// Simulates every user for one venue and aggregates the padded curve.
pub fn simulate_venue(dataset: &VenueDataset, models: &VenueModels, config: &RunConfig) -> Result<(Vec<SimTrace>, LearningCurve)> {
    config.validate()?;
    let traces: Vec<SimTrace> = dataset
        .users
        .par_iter()
        .enumerate()
        .map(|(u, user)| {
            let mut rng = sim_key(config.seed, &models.venue, &user.user_id).rng();
            let ensemble = &models.ensembles[models.folds[u]];
            simulate_user(user, &models.relevance[u], ensemble, dataset.idf(), config, &mut rng)
        })
        .collect();
    let sequences: Vec<Vec<bool>> = traces.iter().map(|t| t.predictions.clone()).collect();
    let curve = aggregate_curves(&models.venue, config.policy, &sequences, &models.labels)?;
    Ok((traces, curve))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// `None` for the random baseline.
    pub lambda: Option<f64>,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn baseline(&self) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.lambda.is_none())
    }

    pub fn row(&self, lambda: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.lambda.is_some_and(|l| (l - lambda).abs() < 1e-9))
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{SWEEP_CSV_HEADER}\n");
        for r in &self.rows {
            let label = r.lambda.map_or_else(|| "baseline".to_owned(), |l| format!("{l:.1}"));
            let _ = writeln!(out, "{label},{:.6},{:.6},{:.6}", r.f1, r.precision, r.recall);
        }
        out
    }
}

/// Mean precision and recall of the final predictions across venues and
/// seeds, with F1 taken as their harmonic mean.
fn averaged(dataset: &VenueDataset, models: &[VenueModels], config: &RunConfig, seeds: &[u64]) -> Result<SweepRow> {
    let mut p = 0.0;
    let mut r = 0.0;
    let mut n = 0usize;
    for &seed in seeds {
        let cfg = RunConfig { seed, ..*config };
        for m in models {
            let (_, curve) = simulate_venue(dataset, m, &cfg)?;
            let c = curve.final_confusion();
            p += c.precision();
            r += c.recall();
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let (p, r) = (p / n as f64, r / n as f64);
    Ok(SweepRow {
        lambda: (config.policy == Policy::Active).then(|| config.params.lambda()),
        f1: harmonic(p, r),
        precision: p,
        recall: r,
    })
}

/// Random baseline followed by one active row per lambda.
pub fn lambda_sweep(
    dataset: &VenueDataset,
    models: &[VenueModels],
    lambdas: &[f64],
    config: &RunConfig,
    seeds: &[u64],
) -> Result<SweepTable> {
    let mut rows = vec![averaged(dataset, models, &RunConfig { policy: Policy::Random, ..*config }, seeds)?];
    for &lambda in lambdas {
        let params = InfoParams::new(lambda, config.params.alpha())?;
        let cfg = RunConfig {
            policy: Policy::Active,
            params,
            ..*config
        };
        rows.push(averaged(dataset, models, &cfg, seeds)?);
    }
    Ok(SweepTable { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub venue: String,
    pub full: f64,
    pub random: f64,
    pub active: f64,
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = format!("{COMPARISON_CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},full,{:.6}", r.venue, r.full);
        let _ = writeln!(out, "{},random,{:.6}", r.venue, r.random);
        let _ = writeln!(out, "{},active,{:.6}", r.venue, r.active);
    }
    out
}

/// Full-timeline F1 against Random and Active at the configured budget,
/// each truncated F1 averaged over `seeds`.
pub fn truncated_vs_full(
    dataset: &VenueDataset,
    models: &[VenueModels],
    config: &RunConfig,
    seeds: &[u64],
) -> Result<Vec<ComparisonRow>> {
    if seeds.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut rows = Vec::with_capacity(models.len());
    for m in models {
        let mut f1 = [0.0; 2];
        for &seed in seeds {
            for (slot, policy) in [Policy::Random, Policy::Active].into_iter().enumerate() {
                let cfg = RunConfig { seed, policy, ..*config };
                f1[slot] += simulate_venue(dataset, m, &cfg)?.1.final_confusion().f1();
            }
        }
        rows.push(ComparisonRow {
            venue: m.venue.clone(),
            full: m.full_confusion().f1(),
            random: f1[0] / seeds.len() as f64,
            active: f1[1] / seeds.len() as f64,
        });
    }
    Ok(rows)
}

pub fn learning_curves(dataset: &VenueDataset, models: &[VenueModels], config: &RunConfig) -> Result<Vec<LearningCurve>> {
    models.iter().map(|m| simulate_venue(dataset, m, config).map(|(_, c)| c)).collect()
}

pub fn curves_csv(curves: &[LearningCurve], lambda: f64) -> String {
    let mut out = format!("{CURVE_CSV_HEADER}\n");
    for c in curves {
        for &(it, f1) in &c.points {
            let _ = writeln!(out, "{},{},{lambda:.1},{it},{f1:.6}", c.venue, c.policy);
        }
    }
    out
}

/// Whether `text` names `venue`: either the squashed name as one token
/// ("Coffee Shop" as "coffeeshop") or every word of the name.
pub fn mentions_venue(tokens: &[String], venue: &str) -> bool {
    let words: Vec<String> = venue
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect();
    if words.is_empty() {
        return false;
    }
    let squashed = words.concat();
    tokens.contains(&squashed) || words.iter().all(|w| tokens.contains(w))
}

/// Mean share of Twitter posts mentioning `venue` among its visitors.
pub fn mention_frequency(corpus: &Corpus, venue: &str, policy: &CurationPolicy) -> f64 {
    let labels = crate::corpus::derive_venue_labels(corpus);
    let mut shares = Vec::new();
    for user in corpus.users() {
        if !labels.get(&user.user_id, venue) {
            continue;
        }
        let posts = user.posts(Platform::Twitter);
        if posts.is_empty() {
            continue;
        }
        let hits = posts
            .iter()
            .filter(|p| mentions_venue(&tokenize(&p.text, policy), venue))
            .count();
        shares.push(hits as f64 / posts.len() as f64);
    }
    if shares.is_empty() {
        0.0
    } else {
        shares.iter().sum::<f64>() / shares.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub venue: String,
    pub class: SlopeClass,
    pub mention_frequency: f64,
}

pub fn classify_curves(
    corpus: &Corpus,
    curves: &[LearningCurve],
    thresholds: &SlopeThresholds,
    policy: &CurationPolicy,
) -> Result<Vec<SlopeRow>> {
    curves
        .iter()
        .map(|c| {
            Ok(SlopeRow {
                venue: c.venue.clone(),
                class: classify_slope(&c.f1(), thresholds)?,
                mention_frequency: mention_frequency(corpus, &c.venue, policy),
            })
        })
        .collect()
}

pub fn slopes_csv(rows: &[SlopeRow]) -> String {
    let mut out = format!("{SLOPE_CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:.6}", r.venue, r.class, r.mention_frequency);
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Strip plot of mention frequency per slope class.
pub fn slopes_svg(rows: &[SlopeRow]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 260.0;
    const LEFT: f64 = 90.0;
    const RIGHT: f64 = 20.0;
    let max = rows.iter().map(|r| r.mention_frequency).fold(0.0f64, f64::max).max(1e-9);
    let x = |v: f64| LEFT + (W - LEFT - RIGHT) * v / max;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
    for (row, class) in SlopeClass::ALL.into_iter().enumerate() {
        let y = 50.0 + 70.0 * row as f64;
        let _ = writeln!(out, r#"<text x="10" y="{:.1}">{class}</text>"#, y + 4.0);
        let _ = writeln!(out, r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ccc"/>"##, W - RIGHT);
        for r in rows.iter().filter(|r| r.class == class) {
            let cx = x(r.mention_frequency);
            let _ = writeln!(
                out,
                r##"<circle cx="{cx:.2}" cy="{y:.1}" r="4" fill="#336"><title>{} {:.4}</title></circle>"##,
                xml_escape(&r.venue),
                r.mention_frequency
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{LEFT}" y="{:.1}">mention frequency among visitors (max {max:.4})</text>"#,
        H - 10.0
    );
    out.push_str("</svg>\n");
    out
}

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use leakscope_core::activesim::{
    classify_curves, comparison_csv, curves_csv, fit_all_venues, learning_curves, lambda_sweep, slopes_csv, slopes_svg,
    Policy, RunConfig, SlopeThresholds, VenueDataset, VenueModels,
};
use leakscope_core::corpus::{
    derive_venue_labels, generate_synthetic, load_corpus, select_venue_categories, write_corpus, VenueLabels, CORPUS_FILE,
    VENUES_FILE,
};
use leakscope_core::deanon::{run_deanon_experiment, DeanonRun, DeanonTable};
use leakscope_core::ensemble::BoostParams;
use leakscope_core::infoscore::InfoParams;
use leakscope_core::seed::SeedKey;
use leakscope_core::textproc::CurationPolicy;
use leakscope_core::{Corpus, Platform};

use crate::artifacts::{sha256_hex, Artifacts};
use crate::config::Settings;

/// Commands that write artifacts and a manifest.
pub const ARTIFACT_COMMANDS: [&str; 9] =
    ["generate", "ingest", "deanon", "venues", "sweep", "curves", "compare", "slopes", "models"];

pub struct Loaded {
    pub corpus: Corpus,
    pub sha256: Option<String>,
}

/// Loads the configured corpus file or directory, or generates the
/// synthetic corpus described by the settings.
pub fn load(settings: &Settings) -> Result<Loaded> {
    let Some(path) = &settings.corpus else {
        let corpus = generate_synthetic(&settings.synthetic())?;
        return Ok(Loaded { corpus, sha256: None });
    };
    let corpus = load_corpus(path).with_context(|| format!("loading corpus {}", path.display()))?;
    let mut bytes = Vec::new();
    if path.is_dir() {
        bytes.extend(fs::read(path.join(CORPUS_FILE))?);
        if let Ok(v) = fs::read(path.join(VENUES_FILE)) {
            bytes.extend(v);
        }
    } else {
        bytes = fs::read(path)?;
    }
    Ok(Loaded {
        corpus,
        sha256: Some(sha256_hex(&bytes)),
    })
}

fn corpus_bytes(corpus: &Corpus) -> Result<(Vec<u8>, String)> {
    let mut jsonl = Vec::new();
    write_corpus(corpus, &mut jsonl)?;
    let venues: String = corpus.venue_taxonomy().iter().map(|v| format!("{v}\n")).collect();
    Ok((jsonl, venues))
}

fn learnable(labels: &VenueLabels, venue: &str) -> bool {
    let pos = labels.visitors(venue);
    pos >= 2 && labels.users().len() - pos >= 2
}

/// Explicit venues when configured, otherwise the visitor band or every
/// learnable category.
pub fn choose_venues(settings: &Settings, labels: &VenueLabels, band: bool) -> Result<Vec<String>> {
    if !settings.venues.is_empty() {
        for v in &settings.venues {
            if !labels.categories().contains(v) {
                bail!("unknown venue category {v:?}");
            }
        }
        return Ok(settings.venues.clone());
    }
    let chosen: Vec<String> = if band {
        select_venue_categories(labels, settings.band_min, settings.band_max)
    } else {
        labels.categories().iter().filter(|v| learnable(labels, v)).cloned().collect()
    };
    if chosen.is_empty() {
        bail!("no venue category qualifies; set venues explicitly");
    }
    Ok(chosen)
}

pub fn run_config(settings: &Settings) -> Result<RunConfig> {
    let cfg = RunConfig {
        d: settings.d,
        budget: settings.budget.posts(),
        params: InfoParams::new(settings.lambda, settings.alpha)?,
        policy: Policy::Active,
        seed: settings.seed,
        folds: settings.folds,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Simulation seeds for the averaged experiments.
pub fn replicate_seeds(settings: &Settings) -> Vec<u64> {
    (0..settings.sim_seeds as u64)
        .map(|i| SeedKey::new(settings.seed).with_str("replicate").with_u64(i).value())
        .collect()
}

struct Prepared {
    dataset: VenueDataset,
    models: Vec<VenueModels>,
}

fn prepare(corpus: &Corpus, settings: &Settings, band: bool) -> Result<Prepared> {
    let dataset = VenueDataset::build(corpus, &CurationPolicy::curated())?;
    let venues = choose_venues(settings, &dataset.labels, band)?;
    let models = fit_all_venues(&dataset, &venues, settings.folds, BoostParams::default(), settings.seed)?;
    Ok(Prepared { dataset, models })
}

pub fn deanon_csv(tables: &[DeanonTable]) -> String {
    let mut out = String::new();
    for (i, t) in tables.iter().enumerate() {
        let csv = t.to_csv();
        // one header for the concatenation
        let body = if i == 0 { csv.as_str() } else { csv.split_once('\n').map_or("", |x| x.1) };
        out.push_str(body);
    }
    out
}

/// Runs an artifact command; returns the artifacts and the corpus hash.
pub fn execute(command: &str, settings: &Settings) -> Result<(Artifacts, Option<String>)> {
    let mut out = Artifacts::default();
    if command == "generate" {
        let corpus = generate_synthetic(&settings.synthetic())?;
        let (jsonl, venues) = corpus_bytes(&corpus)?;
        out.add(CORPUS_FILE, jsonl);
        out.add(VENUES_FILE, venues);
        return Ok((out, None));
    }
    let loaded = load(settings)?;
    let corpus = &loaded.corpus;
    match command {
        "ingest" => {
            let (jsonl, venues) = corpus_bytes(corpus)?;
            out.add(CORPUS_FILE, jsonl);
            out.add(VENUES_FILE, venues);
            let mut stats = String::from("user_id,twitter,instagram,foursquare\n");
            for u in corpus.users() {
                let n = |p: Platform| u.posts(p).len();
                let _ = writeln!(
                    stats,
                    "{},{},{},{}",
                    u.user_id,
                    n(Platform::Twitter),
                    n(Platform::Instagram),
                    n(Platform::Foursquare)
                );
            }
            out.add("corpus_stats.csv", stats);
        }
        "deanon" => {
            let mut tables = Vec::new();
            for &condition in &settings.conditions {
                let run = DeanonRun {
                    condition,
                    posts_seen: settings.posts_seen.clone(),
                    num_anon_posts: settings.anon_posts.clone(),
                    runs: settings.runs,
                    seed: settings.seed,
                    delta: settings.delta,
                };
                tables.push(run_deanon_experiment(corpus, &run).with_context(|| format!("condition {condition}"))?);
            }
            out.add("deanon.csv", deanon_csv(&tables));
        }
        "venues" => {
            let labels = derive_venue_labels(corpus);
            let band: BTreeSet<String> =
                select_venue_categories(&labels, settings.band_min, settings.band_max).into_iter().collect();
            let mut csv = String::from("venue,visitors,fraction,in_band\n");
            for v in labels.categories() {
                let _ = writeln!(csv, "{v},{},{:.6},{}", labels.visitors(v), labels.visit_fraction(v), band.contains(v));
            }
            out.add("venues.csv", csv);
        }
        "sweep" => {
            let p = prepare(corpus, settings, true)?;
            let table = lambda_sweep(&p.dataset, &p.models, &settings.lambdas, &run_config(settings)?, &replicate_seeds(settings))?;
            out.add("sweep.csv", table.to_csv());
        }
        "curves" => {
            let p = prepare(corpus, settings, true)?;
            let cfg = run_config(settings)?;
            let mut csv = String::new();
            for policy in [Policy::Random, Policy::Active] {
                let curves = learning_curves(&p.dataset, &p.models, &RunConfig { policy, ..cfg })?;
                let part = curves_csv(&curves, settings.lambda);
                csv.push_str(if csv.is_empty() { &part } else { part.split_once('\n').map_or("", |x| x.1) });
            }
            out.add("curves.csv", csv);
        }
        "compare" => {
            let p = prepare(corpus, settings, false)?;
            let rows = leakscope_core::activesim::truncated_vs_full(
                &p.dataset,
                &p.models,
                &run_config(settings)?,
                &replicate_seeds(settings),
            )?;
            out.add("comparison.csv", comparison_csv(&rows));
        }
        "slopes" => {
            let p = prepare(corpus, settings, false)?;
            let cfg = RunConfig {
                budget: settings.slope_budget.posts(),
                ..run_config(settings)?
            };
            let curves = learning_curves(&p.dataset, &p.models, &cfg)?;
            let rows = classify_curves(corpus, &curves, &SlopeThresholds::default(), &CurationPolicy::curated())?;
            out.add("slopes.csv", slopes_csv(&rows));
            out.add("slopes.svg", slopes_svg(&rows));
            out.add("slope_curves.csv", curves_csv(&curves, settings.lambda));
        }
        "models" => {
            let p = prepare(corpus, settings, false)?;
            let mut summary = String::from("venue,fold,trees,top_feature,top_importance\n");
            for m in &p.models {
                for (fold, (e, imp)) in m.ensembles.iter().zip(&m.importances).enumerate() {
                    let (feat, w) = imp.ranked().first().copied().unwrap_or((0, 0.0));
                    let term = p.dataset.model.vocab().term(feat).unwrap_or("");
                    let _ = writeln!(summary, "{},{fold},{},{term},{w:.6}", m.venue, e.trees.len());
                }
            }
            out.add("models.csv", summary);
        }
        other => bail!("unknown command {other:?}"),
    }
    Ok((out, loaded.sha256))
}

pub fn check_output_dir(dir: &Path) -> Result<()> {
    if dir.exists() && !dir.is_dir() {
        bail!("{} exists and is not a directory", dir.display());
    }
    Ok(())
}

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use leakscope_cli::artifacts::Manifest;
use leakscope_cli::commands::{self, execute, ARTIFACT_COMMANDS};
use leakscope_cli::config::{read_pairs, Settings, CONFIG_FILE};
use leakscope_core::ensemble::BoostParams;
use leakscope_core::infoscore::InfoParams;
use leakscope_service::AppState;

#[derive(Parser)]
#[command(name = "leakscope", version, about = "Privacy-leakage experiments on social-media timelines")]
struct Cli {
    /// Settings file; defaults to ./leakscope.conf when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus file or directory; "synthetic" generates one from the seed.
    #[arg(long, global = true)]
    corpus: Option<String>,
    #[arg(short, long, global = true, default_value = "out")]
    output_dir: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override any setting, e.g. `--set folds=5`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Default)]
struct SimFlags {
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Post count or "full".
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    folds: Option<String>,
    #[arg(long)]
    sim_seeds: Option<String>,
    /// Comma-separated venue categories.
    #[arg(long)]
    venues: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic corpus.
    Generate {
        #[arg(long)]
        users: Option<String>,
        #[arg(long)]
        categories: Option<String>,
        #[arg(long)]
        affinity: Option<String>,
        #[arg(long)]
        consistency: Option<String>,
    },
    /// Validate a JSON-lines corpus and write it in canonical form.
    Ingest { input: String },
    /// De-anonymization accuracy over the posts-seen by anonymous-posts grid.
    Deanon {
        /// Comma-separated conditions (TT, TFI_T, T_F, TI_F, T_I, TF_I).
        #[arg(long)]
        condition: Option<String>,
        #[arg(long)]
        posts_seen: Option<String>,
        #[arg(long)]
        anon: Option<String>,
        #[arg(long)]
        runs: Option<String>,
    },
    /// Visitor counts per venue category.
    Venues,
    /// Random baseline and one active row per lambda.
    Sweep {
        #[arg(long)]
        lambdas: Option<String>,
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Per-iteration F1 curves for both policies.
    Curves {
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Full-timeline F1 against random and active truncated timelines.
    Compare {
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Learning-curve slope classes against venue mention frequency.
    Slopes {
        #[arg(long)]
        slope_budget: Option<String>,
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Per-fold ensemble summary.
    Models {
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Score a draft against a user's timeline.
    Score {
        #[arg(long)]
        user: String,
        #[arg(long)]
        text: String,
        #[arg(long)]
        venue: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Run the scoring service.
    Serve {
        #[arg(long)]
        bind: Option<String>,
        #[arg(long)]
        venues: Option<String>,
        /// Write sessions here on shutdown.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Re-run a manifest and check that every artifact hash matches.
    Replay { manifest: PathBuf },
}

fn push(pairs: &mut Vec<(String, String)>, key: &str, value: &Option<String>) {
    if let Some(v) = value {
        pairs.push((key.to_owned(), v.clone()));
    }
}

impl SimFlags {
    fn pairs(&self, pairs: &mut Vec<(String, String)>) {
        push(pairs, "lambda", &self.lambda);
        push(pairs, "alpha", &self.alpha);
        push(pairs, "budget", &self.budget);
        push(pairs, "d", &self.d);
        push(pairs, "folds", &self.folds);
        push(pairs, "sim_seeds", &self.sim_seeds);
        push(pairs, "venues", &self.venues);
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate { .. } => "generate",
            Command::Ingest { .. } => "ingest",
            Command::Deanon { .. } => "deanon",
            Command::Venues => "venues",
            Command::Sweep { .. } => "sweep",
            Command::Curves { .. } => "curves",
            Command::Compare { .. } => "compare",
            Command::Slopes { .. } => "slopes",
            Command::Models { .. } => "models",
            Command::Score { .. } => "score",
            Command::Serve { .. } => "serve",
            Command::Replay { .. } => "replay",
        }
    }

    fn pairs(&self) -> Vec<(String, String)> {
        let mut p = Vec::new();
        match self {
            Command::Generate {
                users,
                categories,
                affinity,
                consistency,
            } => {
                push(&mut p, "users", users);
                push(&mut p, "categories", categories);
                push(&mut p, "affinity", affinity);
                push(&mut p, "consistency", consistency);
            }
            Command::Ingest { input } => push(&mut p, "corpus", &Some(input.clone())),
            Command::Deanon {
                condition,
                posts_seen,
                anon,
                runs,
            } => {
                push(&mut p, "conditions", condition);
                push(&mut p, "posts_seen", posts_seen);
                push(&mut p, "anon_posts", anon);
                push(&mut p, "runs", runs);
            }
            Command::Sweep { lambdas, sim } => {
                push(&mut p, "lambdas", lambdas);
                sim.pairs(&mut p);
            }
            Command::Curves { sim } | Command::Compare { sim } | Command::Models { sim } => sim.pairs(&mut p),
            Command::Slopes { slope_budget, sim } => {
                push(&mut p, "slope_budget", slope_budget);
                sim.pairs(&mut p);
            }
            Command::Score { lambda, alpha, venue, .. } => {
                push(&mut p, "lambda", lambda);
                push(&mut p, "alpha", alpha);
                push(&mut p, "venues", venue);
            }
            Command::Serve { bind, venues, .. } => {
                push(&mut p, "bind", bind);
                push(&mut p, "venues", venues);
            }
            Command::Venues | Command::Replay { .. } => {}
        }
        p
    }
}

fn settings(cli: &Cli) -> Result<Settings> {
    let mut s = Settings::default();
    let file = cli.config.clone().or_else(|| Path::new(CONFIG_FILE).exists().then(|| PathBuf::from(CONFIG_FILE)));
    if let Some(path) = file {
        s.apply(&read_pairs(&path)?)?;
    }
    for kv in &cli.set {
        let Some((k, v)) = kv.split_once('=') else {
            bail!("--set expects KEY=VALUE, got {kv:?}");
        };
        s.set(k.trim(), v.trim())?;
    }
    if let Some(c) = &cli.corpus {
        s.set("corpus", c)?;
    }
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    s.apply(&cli.command.pairs())?;
    Ok(s)
}

fn run_artifacts(command: &str, settings: Settings, dir: &Path) -> Result<Vec<(String, String)>> {
    commands::check_output_dir(dir)?;
    let (artifacts, corpus_sha256) = execute(command, &settings)?;
    let manifest = Manifest {
        command: command.to_owned(),
        settings,
        corpus_sha256,
    };
    for path in artifacts.commit(dir, &manifest)? {
        println!("wrote {}", path.display());
    }
    Ok(artifacts.hashes())
}

fn replay(path: &Path, dir: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (manifest, recorded) = Manifest::parse(&text)?;
    if let (Some(want), Some(corpus)) = (&manifest.corpus_sha256, &manifest.settings.corpus) {
        let got = commands::load(&manifest.settings)?.sha256;
        if got.as_ref() != Some(want) {
            bail!("corpus {} changed since the manifest was written", corpus.display());
        }
    }
    let hashes = run_artifacts(&manifest.command, manifest.settings, dir)?;
    let mut mismatched = Vec::new();
    for (name, want) in &recorded {
        match hashes.iter().find(|(n, _)| n == name) {
            Some((_, got)) if got == want => println!("match {name}"),
            _ => mismatched.push(name.clone()),
        }
    }
    if !mismatched.is_empty() {
        bail!("artifacts differ from the manifest: {}", mismatched.join(", "));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let settings = settings(&cli)?;
    match &cli.command {
        Command::Replay { manifest } => replay(manifest, &cli.output_dir),
        Command::Score { user, text, .. } => {
            let corpus = commands::load(&settings)?.corpus;
            let venue = match settings.venues.first() {
                Some(v) => v.clone(),
                None => commands::choose_venues(&settings, &leakscope_core::corpus::derive_venue_labels(&corpus), true)?[0].clone(),
            };
            let state = AppState::from_corpus(&corpus, std::slice::from_ref(&venue), BoostParams::default())?;
            let params = InfoParams::new(settings.lambda, settings.alpha)?;
            let id = state.create_session(&venue, params, Some(user)).map_err(|e| anyhow::anyhow!("{}", e.body))?;
            let breakdown = state.score(&id, text).map_err(|e| anyhow::anyhow!("{}", e.body))?;
            println!("{}", serde_json::to_string_pretty(&breakdown)?);
            Ok(())
        }
        Command::Serve { snapshot, .. } => {
            let corpus = commands::load(&settings)?.corpus;
            let addr: SocketAddr = settings.bind.parse().with_context(|| format!("bad bind address {:?}", settings.bind))?;
            let state = Arc::new(AppState::from_corpus(&corpus, &settings.venues, BoostParams::default())?);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(leakscope_service::serve(state, addr, snapshot.clone()))?;
            Ok(())
        }
        other => {
            let name = other.name();
            debug_assert!(ARTIFACT_COMMANDS.contains(&name));
            run_artifacts(name, settings, &cli.output_dir).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| level.into()))
        .with_writer(std::io::stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 usage error, 2 bad input data, 3 internal error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::account::{parse_snapshot, AccountSnapshot};
use crate::evaluation::{cross_validate, roc_curve};
use crate::features::{extract_all, named_values, FeatureRegistry, FeatureVector, SentimentLexicons};
use crate::forest::{train_suite, ForestParams, Scores};
use crate::ingest::{fetch_account, generate_corpus, load_corpus, write_corpus, LabeledCorpus, SynthParams};
use crate::service::{AppState, Scorer, ServiceConfig};
use crate::store::{ScoreStore, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "botscope", version, about = "Score social media accounts for bot-like behavior")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Service configuration file (TOML).
    #[arg(long, global = true, env = "BOTSCOPE_CONFIG")]
    pub config: Option<PathBuf>,
    /// Directory holding happiness.tsv, vad.tsv and emoticons.tsv.
    #[arg(long, global = true)]
    pub lexicons: Option<PathBuf>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct ForestArgs {
    /// Trees per forest.
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Features tried per split (default: floor(sqrt(width))).
    #[arg(long)]
    pub max_features: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub min_samples_leaf: usize,
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Grow every tree on the full training set.
    #[arg(long)]
    pub no_bootstrap: bool,
}

impl ForestArgs {
    fn params(&self, seed: u64) -> ForestParams {
        ForestParams {
            n_trees: self.trees,
            max_features: self.max_features,
            min_samples_leaf: self.min_samples_leaf,
            max_depth: self.max_depth,
            bootstrap: !self.no_bootstrap,
            rng_seed: seed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic labeled corpus.
    Synth {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        bots: usize,
        #[arg(long, default_value_t = 500)]
        humans: usize,
        /// Chance that a trait group of an account follows the other class.
        #[arg(long)]
        overlap: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the seven-model suite on a corpus.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        forest: ForestArgs,
    },
    /// Stratified k-fold cross-validation of the suite.
    Crossval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Seeds both the fold split and the forests.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write pooled held-out ROC points (overall model) as CSV.
        #[arg(long)]
        roc_csv: Option<PathBuf>,
        #[command(flatten)]
        forest: ForestArgs,
    },
    /// Score one account from a snapshot file or by screen name.
    Score {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, conflicts_with = "name")]
        snapshot: Option<PathBuf>,
        #[arg(long, required_unless_present = "snapshot")]
        name: Option<String>,
        /// Fixture directory for --name (overrides the configured source).
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Include tweet and mention times in the report.
        #[arg(long)]
        detail: bool,
    },
    /// Dump the named feature vector of a snapshot.
    Features {
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Print the feature registry manifest.
    Manifest,
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        listen: Option<String>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Score-store statistics.
    Stats {
        #[command(subcommand)]
        what: StatsCommand,
    },
    /// Rewrite the score log keeping only the latest score per account.
    Compact {
        #[arg(long)]
        store: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Empirical CDF of the latest overall score per account.
    Cdf {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) | CliError::Data(e) | CliError::Internal(e) => write!(f, "{e:#}"),
        }
    }
}

trait OrExit<T> {
    fn data(self) -> Result<T, CliError>;
    fn internal(self) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> OrExit<T> for Result<T, E> {
    fn data(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Data(e.into()))
    }
    fn internal(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Internal(e.into()))
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            if !out.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            0
        }
        Err(e) => {
            eprintln!("botscope: {e}");
            e.exit_code()
        }
    }
}

fn lexicons(cli: &Cli) -> Result<SentimentLexicons, CliError> {
    match &cli.lexicons {
        Some(d) => SentimentLexicons::load_dir(d).data(),
        None => Ok(SentimentLexicons::builtin()),
    }
}

fn read_snapshot(path: &Path) -> Result<AccountSnapshot, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .data()?;
    let parsed = parse_snapshot(&text)
        .with_context(|| format!("{}", path.display()))
        .data()?;
    for w in &parsed.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(parsed.snapshot)
}

/// Feature vectors for every account, extracted in parallel.
pub fn corpus_features(
    corpus: &LabeledCorpus,
    registry: &FeatureRegistry,
    lexicons: &SentimentLexicons,
) -> Result<Vec<FeatureVector>, crate::features::FeatureError> {
    corpus
        .accounts
        .par_iter()
        .map(|a| extract_all(&a.snapshot, registry, lexicons))
        .collect()
}

fn load_training(cli: &Cli, dir: &Path) -> Result<(LabeledCorpus, FeatureRegistry, Vec<FeatureVector>), CliError> {
    let corpus = load_corpus(dir).data()?;
    let registry = FeatureRegistry::standard();
    let x = corpus_features(&corpus, &registry, &lexicons(cli)?).internal()?;
    Ok((corpus, registry, x))
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn service_config(cli: &Cli) -> Result<ServiceConfig, CliError> {
    ServiceConfig::load(cli.config.as_deref()).map_err(|e| CliError::Usage(e.into()))
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Synth {
            seed,
            bots,
            humans,
            overlap,
            out,
        } => {
            let mut params = SynthParams::new(*seed, *bots, *humans);
            if let Some(o) = overlap {
                params.overlap = *o;
            }
            let started = Instant::now();
            let corpus = generate_corpus(&params).map_err(|e| CliError::Usage(e.into()))?;
            write_corpus(out, &corpus).internal()?;
            let doc = json!({
                "command": "synth",
                "seed": seed,
                "bots": bots,
                "humans": humans,
                "out": out,
                "dataset_digest": corpus.digest,
                "params": params,
                "seconds": started.elapsed().as_secs_f64(),
            });
            Ok(match cli.format {
                Format::Json => to_json(&doc),
                Format::Csv => format!("seed,bots,humans,dataset_digest\n{seed},{bots},{humans},{}", corpus.digest),
                Format::Text => format!(
                    "wrote {bots} bots and {humans} humans to {} (seed {seed}, digest {})",
                    out.display(),
                    corpus.digest
                ),
            })
        }
        Command::Train {
            corpus,
            model,
            seed,
            forest,
        } => {
            let started = Instant::now();
            let (corpus, registry, x) = load_training(cli, corpus)?;
            let y = corpus.labels();
            let params = forest.params(*seed);
            let suite = train_suite(&x, &y, &params, &registry, &corpus.digest).data()?;
            suite
                .save(model)
                .with_context(|| format!("cannot write {}", model.display()))
                .internal()?;
            let oob = suite.overall.oob_accuracy(&x, &y);
            let doc = json!({
                "command": "train",
                "seed": seed,
                "model": model,
                "model_version": suite.version(),
                "registry_version": registry.version(),
                "dataset_digest": corpus.digest,
                "n_bots": suite.meta.n_bots,
                "n_humans": suite.meta.n_humans,
                "oob_accuracy": oob,
                "seconds": started.elapsed().as_secs_f64(),
            });
            Ok(match cli.format {
                Format::Json => to_json(&doc),
                Format::Csv => format!(
                    "seed,model_version,dataset_digest,n_bots,n_humans,oob_accuracy\n{seed},{},{},{},{},{}",
                    suite.version(),
                    corpus.digest,
                    suite.meta.n_bots,
                    suite.meta.n_humans,
                    oob.map(|v| v.to_string()).unwrap_or_default()
                ),
                Format::Text => format!(
                    "trained {} on {} bots / {} humans (seed {seed}); out-of-bag accuracy {}",
                    suite.version(),
                    suite.meta.n_bots,
                    suite.meta.n_humans,
                    oob.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into())
                ),
            })
        }
        Command::Crossval {
            corpus,
            k,
            seed,
            roc_csv,
            forest,
        } => {
            let started = Instant::now();
            let (corpus, registry, x) = load_training(cli, corpus)?;
            let y = corpus.labels();
            let report = cross_validate(&x, &y, &registry, &forest.params(*seed), *k, *seed, &corpus.digest).data()?;
            if let Some(path) = roc_csv {
                let points = roc_curve(&report.oof_scores, &y).internal()?;
                let mut s = String::from("fpr,tpr\n");
                for (f, t) in points {
                    let _ = writeln!(s, "{f},{t}");
                }
                std::fs::write(path, s)
                    .with_context(|| format!("cannot write {}", path.display()))
                    .internal()?;
            }
            let secs = started.elapsed().as_secs_f64();
            Ok(match cli.format {
                Format::Json => {
                    let mut v = serde_json::to_value(&report).expect("report serializes");
                    v["command"] = json!("crossval");
                    v["seconds"] = json!(secs);
                    to_json(&v)
                }
                Format::Csv => {
                    let mut s = String::from("fold,overall");
                    for c in &report.per_class {
                        let _ = write!(s, ",{}", c.class);
                    }
                    s.push('\n');
                    for f in 0..report.k {
                        let _ = write!(s, "{},{}", f + 1, report.fold_aucs[f]);
                        for c in &report.per_class {
                            let _ = write!(s, ",{}", c.fold_aucs[f]);
                        }
                        s.push('\n');
                    }
                    s
                }
                Format::Text => {
                    let mut s = format!(
                        "{}-fold cross-validation, seed {seed}, corpus {}\noverall AUC {:.4} (std {:.4})\n",
                        report.k, report.dataset_digest, report.mean_auc, report.std_auc
                    );
                    for c in &report.per_class {
                        let _ = writeln!(s, "{:<10} AUC {:.4}", c.class.as_str(), c.mean_auc);
                    }
                    let _ = write!(s, "{secs:.1} s");
                    s
                }
            })
        }
        Command::Score {
            model,
            snapshot,
            name,
            fixtures,
            detail,
        } => {
            let mut cfg = service_config(cli)?;
            if let Some(m) = model {
                cfg.model_path = m.clone();
            }
            if let Some(f) = fixtures {
                cfg.fixtures_dir = f.clone();
                cfg.source = crate::service::SourceKind::FixtureDir;
            }
            if let Some(l) = &cli.lexicons {
                cfg.lexicon_dir = Some(l.clone());
            }
            let scorer = Scorer::load(&cfg.model_path, cfg.lexicon_dir.as_deref()).data()?;
            let snap = match (snapshot, name) {
                (Some(p), _) => read_snapshot(p)?,
                (None, Some(n)) => fetch_account(cfg.build_source().as_ref(), n).data()?,
                (None, None) => return Err(CliError::Usage(anyhow!("give --snapshot or --name"))),
            };
            let scores = scorer.scores(&snap).internal()?;
            let report = scorer.report(&snap, scores, chrono::Utc::now().timestamp(), *detail);
            Ok(match cli.format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let header = Scores::NAMES.join(",");
                    let row: Vec<String> = scores.as_array().iter().map(|v| v.to_string()).collect();
                    format!("screen_name,{header}\n{},{}", report.screen_name, row.join(","))
                }
                Format::Text => {
                    let mut s = format!("@{} ({})\n", report.screen_name, report.meta.model_version);
                    for (n, v) in Scores::NAMES.iter().zip(scores.as_array()) {
                        let _ = writeln!(s, "{n:<10} {v:.3}");
                    }
                    s
                }
            })
        }
        Command::Features { snapshot } => {
            let snap = read_snapshot(snapshot)?;
            let registry = FeatureRegistry::standard();
            let x = extract_all(&snap, &registry, &lexicons(cli)?).internal()?;
            Ok(match cli.format {
                Format::Json => {
                    let mut map = serde_json::Map::new();
                    for (spec, v) in named_values(&registry, &x) {
                        map.insert(spec.name.clone(), if v.is_nan() { json!(null) } else { json!(v) });
                    }
                    to_json(&json!({
                        "screen_name": snap.user.screen_name,
                        "registry_version": registry.version(),
                        "features": map,
                    }))
                }
                Format::Csv => {
                    let mut s = String::from("name,class,value\n");
                    for (spec, v) in named_values(&registry, &x) {
                        let _ = writeln!(s, "{},{},{}", spec.name, spec.class, if v.is_nan() { String::new() } else { v.to_string() });
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for (spec, v) in named_values(&registry, &x) {
                        let _ = writeln!(s, "{:<48} {v}", spec.name);
                    }
                    s
                }
            })
        }
        Command::Manifest => {
            let registry = FeatureRegistry::standard();
            Ok(match cli.format {
                Format::Json => to_json(&json!({
                    "registry_version": registry.version(),
                    "features": registry.specs(),
                })),
                _ => registry.manifest(),
            })
        }
        Command::Serve {
            listen,
            model,
            store,
            fixtures,
        } => {
            let mut cfg = service_config(cli)?;
            if let Some(v) = listen {
                cfg.listen = v.clone();
            }
            if let Some(v) = model {
                cfg.model_path = v.clone();
            }
            if let Some(v) = store {
                cfg.store_path = v.clone();
            }
            if let Some(v) = fixtures {
                cfg.fixtures_dir = v.clone();
                cfg.source = crate::service::SourceKind::FixtureDir;
            }
            if let Some(l) = &cli.lexicons {
                cfg.lexicon_dir = Some(l.clone());
            }
            let state = AppState::from_config(&cfg).data()?;
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().internal()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(&cfg.listen)
                    .await
                    .with_context(|| format!("cannot listen on {}", cfg.listen))
                    .map_err(CliError::Usage)?;
                let addr = listener.local_addr().internal()?;
                println!("listening on http://{addr}");
                let _ = std::io::stdout().flush();
                crate::service::serve(listener, state).await.internal()
            })?;
            Ok(String::from("stopped"))
        }
        Command::Stats {
            what: StatsCommand::Cdf { store, bins },
        } => {
            if !store.exists() {
                return Err(CliError::Data(anyhow!("no score log at {}", store.display())));
            }
            let s = ScoreStore::open(store).data()?;
            let points = match s.score_cdf(*bins) {
                Ok(p) => p,
                Err(StoreError::EmptyStore) => Vec::new(),
                Err(e) => return Err(CliError::Usage(e.into())),
            };
            Ok(match cli.format {
                Format::Json => to_json(&json!({
                    "bins": bins,
                    "unique_accounts": s.unique_accounts(),
                    "points": points,
                })),
                _ => {
                    let mut out = String::from("threshold,fraction\n");
                    for p in points {
                        let _ = writeln!(out, "{},{}", p.threshold, p.fraction);
                    }
                    out
                }
            })
        }
        Command::Compact { store } => {
            let mut s = ScoreStore::open(store).data()?;
            let before = s.record_count();
            s.compact().internal()?;
            Ok(match cli.format {
                Format::Json => to_json(&json!({
                    "store": store,
                    "records_before": before,
                    "records_after": s.record_count(),
                })),
                _ => format!("{}: {before} -> {} records", store.display(), s.record_count()),
            })
        }
    }
}

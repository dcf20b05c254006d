//! The scoring service: shared scoring pipeline, HTTP routes, rate limiting.

pub mod config;
mod http;
pub mod limiter;

use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::account::{iso_time, AccountSnapshot, Timestamp};
use crate::features::{extract_all, FeatureError, FeatureRegistry, LexiconError, SentimentLexicons};
use crate::forest::{score_suite, ForestError, ScoreSuiteModel, Scores};
use crate::ingest::DataSource;
use crate::store::{ScoreStore, ScoreStoreEntry, StoreError};

pub use config::{ConfigError, KeyMode, ServiceConfig, SourceKind};
pub use http::{router, serve};
pub use limiter::{Clock, Decision, ManualClock, RateLimiter, SystemClock};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("model: {0}")]
    Model(#[from] ForestError),
    #[error("features: {0}")]
    Features(#[from] FeatureError),
    #[error("lexicons: {0}")]
    Lexicons(#[from] LexiconError),
    #[error("store: {0}")]
    Store(#[from] StoreError),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("model was trained on feature registry {model}, this build extracts {build}")]
    RegistryMismatch { model: String, build: String },
}

/// Raw activity echoed back with `?detail=1` so clients can draw
/// per-account histograms without scoring anything themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDetail {
    /// Own tweet times, newest first, ISO-8601 UTC.
    pub tweet_times: Vec<String>,
    pub mention_times: Vec<String>,
    pub captured_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tweets_used: usize,
    pub mentions_used: usize,
    pub model_version: String,
    pub registry_version: String,
    /// When the score was recorded, ISO-8601 UTC.
    pub timestamp: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<ReportDetail>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub screen_name: String,
    pub scores: Scores,
    pub meta: ReportMeta,
}

/// Immutable scoring pipeline shared by the service, the CLI and the C API.
#[derive(Debug)]
pub struct Scorer {
    suite: ScoreSuiteModel,
    version: String,
    registry: FeatureRegistry,
    lexicons: SentimentLexicons,
}

impl Scorer {
    pub fn new(suite: ScoreSuiteModel, lexicons: SentimentLexicons) -> Result<Self, ServiceError> {
        let registry = FeatureRegistry::standard();
        if suite.meta.registry_version != registry.version() {
            return Err(ServiceError::RegistryMismatch {
                model: suite.meta.registry_version.clone(),
                build: registry.version().to_string(),
            });
        }
        Ok(Scorer {
            version: suite.version(),
            suite,
            registry,
            lexicons,
        })
    }

    pub fn load(model: &Path, lexicon_dir: Option<&Path>) -> Result<Self, ServiceError> {
        let suite = ScoreSuiteModel::load(model)?;
        let lexicons = match lexicon_dir {
            Some(d) => SentimentLexicons::load_dir(d)?,
            None => SentimentLexicons::builtin(),
        };
        Self::new(suite, lexicons)
    }

    pub fn model_version(&self) -> &str {
        &self.version
    }

    pub fn registry(&self) -> &FeatureRegistry {
        &self.registry
    }

    pub fn suite(&self) -> &ScoreSuiteModel {
        &self.suite
    }

    pub fn scores(&self, snapshot: &AccountSnapshot) -> Result<Scores, ServiceError> {
        let x = extract_all(snapshot, &self.registry, &self.lexicons)?;
        Ok(score_suite(&self.suite, &x)?)
    }

    pub fn report(&self, snapshot: &AccountSnapshot, scores: Scores, recorded_at: Timestamp, detail: bool) -> ScoreReport {
        let times = |ts: &[crate::account::Tweet]| ts.iter().map(|t| iso_time::format(t.created_at)).collect();
        ScoreReport {
            screen_name: snapshot.user.screen_name.clone(),
            scores,
            meta: ReportMeta {
                tweets_used: snapshot.tweets.len(),
                mentions_used: snapshot.mentions.len(),
                model_version: self.version.clone(),
                registry_version: self.registry.version().to_string(),
                timestamp: iso_time::format(recorded_at),
                detail: detail.then(|| ReportDetail {
                    tweet_times: times(&snapshot.tweets),
                    mention_times: times(&snapshot.mentions),
                    captured_at: iso_time::format(snapshot.captured_at),
                }),
            },
        }
    }
}

/// Everything a request handler needs. Cheap to clone.
#[derive(Clone)]
pub struct AppState {
    pub scorer: Arc<Scorer>,
    pub source: Arc<dyn DataSource>,
    /// The single writer of the score log.
    pub store: Arc<Mutex<ScoreStore>>,
    pub limiter: Arc<RateLimiter>,
    pub clock: Arc<dyn Clock>,
    pub key_mode: KeyMode,
    pub cors_origins: Vec<String>,
}

impl AppState {
    pub fn new(scorer: Scorer, source: Arc<dyn DataSource>, store: ScoreStore, limiter: RateLimiter) -> Self {
        AppState {
            scorer: Arc::new(scorer),
            source,
            store: Arc::new(Mutex::new(store)),
            limiter: Arc::new(limiter),
            clock: Arc::new(SystemClock),
            key_mode: KeyMode::TokenOrAddress,
            cors_origins: vec!["*".into()],
        }
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn from_config(cfg: &ServiceConfig) -> Result<Self, ServiceError> {
        let scorer = Scorer::load(&cfg.model_path, cfg.lexicon_dir.as_deref())?;
        let store = if cfg.store_path.as_os_str().is_empty() {
            ScoreStore::in_memory()
        } else {
            ScoreStore::open(&cfg.store_path)?
        };
        let mut state = AppState::new(
            scorer,
            Arc::from(cfg.build_source()),
            store,
            RateLimiter::new(cfg.rate_limit, cfg.rate_window_secs),
        );
        state.key_mode = cfg.key_mode;
        state.cors_origins = cfg.cors_origins.clone();
        Ok(state)
    }

    /// Scores a snapshot, records the result and builds the report.
    pub fn score_and_record(&self, snapshot: &AccountSnapshot, detail: bool) -> Result<ScoreReport, ServiceError> {
        let scores = self.scorer.scores(snapshot)?;
        let entry = ScoreStoreEntry::new(
            &snapshot.user.screen_name,
            scores,
            self.scorer.model_version(),
            self.clock.now(),
        );
        let ack = self.store.lock().unwrap_or_else(|e| e.into_inner()).record(entry)?;
        Ok(self.scorer.report(snapshot, scores, ack.recorded_at, detail))
    }
}

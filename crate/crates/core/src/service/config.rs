//! Service configuration: a TOML file, then `BOTSCOPE_*` environment
//! overrides, then defaults for anything left unset.
//!
//! | key              | env                     | default            |
//! |------------------|-------------------------|--------------------|
//! | `listen`         | `BOTSCOPE_LISTEN`       | `127.0.0.1:8080`   |
//! | `model_path`     | `BOTSCOPE_MODEL`        | `model.bin`        |
//! | `store_path`     | `BOTSCOPE_STORE`        | `scores.log`       |
//! | `source`         | `BOTSCOPE_SOURCE`       | `fixture_dir`      |
//! | `fixtures_dir`   | `BOTSCOPE_FIXTURES`     | `fixtures`         |
//! | `backend_url`    | `BOTSCOPE_BACKEND_URL`  | (none)             |
//! | `token_env`      | `BOTSCOPE_TOKEN_ENV`    | (none)             |
//! | `max_in_flight`  | `BOTSCOPE_MAX_IN_FLIGHT`| `8`                |
//! | `timeout_secs`   | `BOTSCOPE_TIMEOUT_SECS` | `10`               |
//! | `rate_limit`     | `BOTSCOPE_RATE_LIMIT`   | `180`              |
//! | `rate_window_secs`| `BOTSCOPE_RATE_WINDOW` | `900`              |
//! | `key_mode`       | `BOTSCOPE_KEY_MODE`     | `token_or_address` |
//! | `cors_origins`   | `BOTSCOPE_CORS_ORIGINS` | `["*"]`            |
//! | `lexicon_dir`    | `BOTSCOPE_LEXICONS`     | built-in lexicons  |
//!
//! `store_path = ""` keeps scores in memory only. `BOTSCOPE_CORS_ORIGINS`
//! takes a comma-separated list.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::limiter::{DEFAULT_LIMIT, DEFAULT_WINDOW_SECS};
use crate::ingest::{DataSource, FixtureSource, HttpSource};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config {path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("environment variable {var}: {message}")]
    Env { var: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    FixtureDir,
    HttpBackend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyMode {
    /// API token when the request carries one, else the client address.
    TokenOrAddress,
    Address,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub listen: String,
    pub model_path: PathBuf,
    pub store_path: PathBuf,
    pub source: SourceKind,
    pub fixtures_dir: PathBuf,
    pub backend_url: Option<String>,
    pub token_env: Option<String>,
    pub max_in_flight: usize,
    pub timeout_secs: u64,
    pub rate_limit: u32,
    pub rate_window_secs: i64,
    pub key_mode: KeyMode,
    pub cors_origins: Vec<String>,
    pub lexicon_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: "127.0.0.1:8080".into(),
            model_path: "model.bin".into(),
            store_path: "scores.log".into(),
            source: SourceKind::FixtureDir,
            fixtures_dir: "fixtures".into(),
            backend_url: None,
            token_env: None,
            max_in_flight: 8,
            timeout_secs: 10,
            rate_limit: DEFAULT_LIMIT,
            rate_window_secs: DEFAULT_WINDOW_SECS,
            key_mode: KeyMode::TokenOrAddress,
            cors_origins: vec!["*".into()],
            lexicon_dir: None,
        }
    }
}

fn parse_env<T: std::str::FromStr>(var: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e: T::Err| ConfigError::Env {
        var: var.into(),
        message: e.to_string(),
    })
}

fn parse_enum<T: for<'de> Deserialize<'de>>(var: &str, raw: &str) -> Result<T, ConfigError> {
    serde_json::from_value(serde_json::Value::String(raw.into())).map_err(|e| ConfigError::Env {
        var: var.into(),
        message: e.to_string(),
    })
}

impl ServiceConfig {
    /// Reads `path` when given, then applies the process environment.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        cfg.apply_env(|k| std::env::var(k).ok())?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Syntax {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        let get = |k: &str| lookup(k).filter(|v| !v.is_empty() || k == "BOTSCOPE_STORE");
        if let Some(v) = get("BOTSCOPE_LISTEN") {
            self.listen = v;
        }
        if let Some(v) = get("BOTSCOPE_MODEL") {
            self.model_path = v.into();
        }
        if let Some(v) = get("BOTSCOPE_STORE") {
            self.store_path = v.into();
        }
        if let Some(v) = get("BOTSCOPE_SOURCE") {
            self.source = parse_enum("BOTSCOPE_SOURCE", &v)?;
        }
        if let Some(v) = get("BOTSCOPE_FIXTURES") {
            self.fixtures_dir = v.into();
        }
        if let Some(v) = get("BOTSCOPE_BACKEND_URL") {
            self.backend_url = Some(v);
        }
        if let Some(v) = get("BOTSCOPE_TOKEN_ENV") {
            self.token_env = Some(v);
        }
        if let Some(v) = get("BOTSCOPE_MAX_IN_FLIGHT") {
            self.max_in_flight = parse_env("BOTSCOPE_MAX_IN_FLIGHT", &v)?;
        }
        if let Some(v) = get("BOTSCOPE_TIMEOUT_SECS") {
            self.timeout_secs = parse_env("BOTSCOPE_TIMEOUT_SECS", &v)?;
        }
        if let Some(v) = get("BOTSCOPE_RATE_LIMIT") {
            self.rate_limit = parse_env("BOTSCOPE_RATE_LIMIT", &v)?;
        }
        if let Some(v) = get("BOTSCOPE_RATE_WINDOW") {
            self.rate_window_secs = parse_env("BOTSCOPE_RATE_WINDOW", &v)?;
        }
        if let Some(v) = get("BOTSCOPE_KEY_MODE") {
            self.key_mode = parse_enum("BOTSCOPE_KEY_MODE", &v)?;
        }
        if let Some(v) = get("BOTSCOPE_CORS_ORIGINS") {
            self.cors_origins = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        }
        if let Some(v) = get("BOTSCOPE_LEXICONS") {
            self.lexicon_dir = Some(v.into());
        }
        Ok(())
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        if self.rate_limit == 0 {
            return Err(ConfigError::Invalid("rate_limit must be positive".into()));
        }
        if self.rate_window_secs <= 0 {
            return Err(ConfigError::Invalid("rate_window_secs must be positive".into()));
        }
        if self.source == SourceKind::HttpBackend && self.backend_url.is_none() {
            return Err(ConfigError::Invalid("source = http_backend needs backend_url".into()));
        }
        Ok(())
    }

    pub fn build_source(&self) -> Box<dyn DataSource> {
        match self.source {
            SourceKind::FixtureDir => Box::new(FixtureSource::new(&self.fixtures_dir)),
            SourceKind::HttpBackend => Box::new(HttpSource::new(
                self.backend_url.as_deref().unwrap_or_default(),
                self.token_env.clone(),
                self.max_in_flight,
                Duration::from_secs(self.timeout_secs.max(1)),
            )),
        }
    }
}

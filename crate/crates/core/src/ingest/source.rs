use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use thiserror::Error;

use crate::account::{parse_snapshot, AccountSnapshot, SnapshotError};

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("account `{0}` not found")]
    NotFound(String),
    #[error("invalid screen name `{0}`")]
    InvalidName(String),
    #[error("upstream error: {0}")]
    Upstream(String),
    #[error(transparent)]
    Schema(#[from] SnapshotError),
}

/// A read-only supplier of account snapshots.
pub trait DataSource: Send + Sync {
    /// Returns the raw snapshot document for `screen_name`.
    fn fetch_document(&self, screen_name: &str) -> Result<String, FetchError>;

    fn describe(&self) -> String;
}

/// Screen names are 1-50 ASCII letters, digits or underscores; anything
/// else could escape the fixture directory or the URL path.
fn check_name(screen_name: &str) -> Result<(), FetchError> {
    let ok = !screen_name.is_empty()
        && screen_name.len() <= 50
        && screen_name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_');
    if ok {
        Ok(())
    } else {
        Err(FetchError::InvalidName(screen_name.to_string()))
    }
}

/// Fetches, validates and caps a snapshot.
pub fn fetch_account(source: &dyn DataSource, screen_name: &str) -> Result<AccountSnapshot, FetchError> {
    let name = screen_name.trim_start_matches('@');
    check_name(name)?;
    let doc = source.fetch_document(name)?;
    let parsed = parse_snapshot(&doc)?;
    for w in &parsed.warnings {
        log::info!("{name}: {w}");
    }
    Ok(parsed.snapshot)
}

/// Reads `<root>/<screen_name>.json`, falling back to the lowercased name.
#[derive(Debug, Clone)]
pub struct FixtureSource {
    root: PathBuf,
}

impl FixtureSource {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        FixtureSource { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

impl DataSource for FixtureSource {
    fn fetch_document(&self, screen_name: &str) -> Result<String, FetchError> {
        check_name(screen_name)?;
        let lower = screen_name.to_lowercase();
        for name in [screen_name, lower.as_str()] {
            let path = self.root.join(format!("{name}.json"));
            match std::fs::read_to_string(&path) {
                Ok(s) => return Ok(s),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
                Err(e) => return Err(FetchError::Upstream(format!("{}: {e}", path.display()))),
            }
        }
        Err(FetchError::NotFound(screen_name.to_string()))
    }

    fn describe(&self) -> String {
        format!("fixture_dir:{}", self.root.display())
    }
}

/// Generic HTTP backend: `GET <base>/accounts/<screen_name>` returning a
/// snapshot document, with an optional bearer token read from an
/// environment variable and a ceiling on concurrent requests.
pub struct HttpSource {
    base_url: String,
    token_env: Option<String>,
    agent: ureq::Agent,
    max_in_flight: usize,
    in_flight: Mutex<usize>,
    slot_free: Condvar,
}

impl std::fmt::Debug for HttpSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpSource")
            .field("base_url", &self.base_url)
            .field("token_env", &self.token_env)
            .field("max_in_flight", &self.max_in_flight)
            .finish()
    }
}

impl HttpSource {
    pub fn new(base_url: &str, token_env: Option<String>, max_in_flight: usize, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpSource {
            base_url: base_url.trim_end_matches('/').to_string(),
            token_env,
            agent,
            max_in_flight: max_in_flight.max(1),
            in_flight: Mutex::new(0),
            slot_free: Condvar::new(),
        }
    }

    fn acquire(&self) {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.max_in_flight {
            n = self.slot_free.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
    }

    fn release(&self) {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.slot_free.notify_one();
    }

    fn get(&self, url: &str) -> Result<String, FetchError> {
        let mut req = self.agent.get(url);
        if let Some(var) = &self.token_env {
            if let Ok(token) = std::env::var(var) {
                req = req.header("Authorization", &format!("Bearer {token}"));
            }
        }
        let mut resp = req.call().map_err(|e| FetchError::Upstream(e.to_string()))?;
        let status = resp.status().as_u16();
        match status {
            200..=299 => resp
                .body_mut()
                .read_to_string()
                .map_err(|e| FetchError::Upstream(e.to_string())),
            404 => Err(FetchError::NotFound(String::new())),
            s => Err(FetchError::Upstream(format!("GET {url} returned {s}"))),
        }
    }
}

impl DataSource for HttpSource {
    fn fetch_document(&self, screen_name: &str) -> Result<String, FetchError> {
        check_name(screen_name)?;
        let url = format!("{}/accounts/{screen_name}", self.base_url);
        self.acquire();
        let out = self.get(&url);
        self.release();
        out.map_err(|e| match e {
            FetchError::NotFound(_) => FetchError::NotFound(screen_name.to_string()),
            e => e,
        })
    }

    fn describe(&self) -> String {
        format!("http_backend:{}", self.base_url)
    }
}

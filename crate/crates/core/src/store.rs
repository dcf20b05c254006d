//! Append-only score log with an in-memory latest-per-account index.
//!
//! Only the scored account, its seven scores, the model version and a
//! timestamp are stored; nothing about who asked.
//!
//! ```text
//! file    := header record*
//! header  := "BSSCORES" u16:version(=1) u16:reserved      (little-endian)
//! record  := u32:len u32:crc32(payload) payload[len]       (payload = JSON entry)
//! ```
//!
//! On open, records are replayed until the first truncated or corrupt one;
//! the file is cut back to the last good record so a torn tail never
//! survives a restart.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::account::Timestamp;
use crate::forest::Scores;

const MAGIC: &[u8; 8] = b"BSSCORES";
const VERSION: u16 = 1;
const HEADER_LEN: u64 = 12;
/// Upper bound on one record's payload; anything larger is corruption.
const MAX_RECORD: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store I/O on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} is not a score log")]
    BadHeader(PathBuf),
    #[error("invalid entry: {0}")]
    InvalidEntry(String),
    #[error("the store holds no scores")]
    EmptyStore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreStoreEntry {
    /// Case-folded screen name.
    pub account: String,
    pub scores: Scores,
    pub model_version: String,
    pub recorded_at: Timestamp,
}

impl ScoreStoreEntry {
    pub fn new(screen_name: &str, scores: Scores, model_version: &str, recorded_at: Timestamp) -> Self {
        ScoreStoreEntry {
            account: account_key(screen_name),
            scores,
            model_version: model_version.to_string(),
            recorded_at,
        }
    }
}

/// Store key for a screen name: trimmed, without a leading `@`, lowercased.
pub fn account_key(screen_name: &str) -> String {
    screen_name.trim().trim_start_matches('@').to_lowercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ack {
    /// 1-based position of the record in the log.
    pub sequence: u64,
    pub recorded_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub threshold: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct StoreOptions {
    /// fsync after every append.
    pub sync_writes: bool,
}

impl Default for StoreOptions {
    fn default() -> Self {
        StoreOptions { sync_writes: true }
    }
}

#[derive(Debug)]
pub struct ScoreStore {
    file: Option<(File, PathBuf)>,
    options: StoreOptions,
    latest: HashMap<String, ScoreStoreEntry>,
    records: u64,
    last_ts: Timestamp,
    recovered_bytes: u64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl ScoreStore {
    pub fn in_memory() -> Self {
        ScoreStore {
            file: None,
            options: StoreOptions::default(),
            latest: HashMap::new(),
            records: 0,
            last_ts: i64::MIN,
            recovered_bytes: 0,
        }
    }

    pub fn open(path: &Path) -> Result<Self, StoreError> {
        Self::open_with(path, StoreOptions::default())
    }

    pub fn open_with(path: &Path, options: StoreOptions) -> Result<Self, StoreError> {
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)
            .map_err(io_err(path))?;
        let mut store = ScoreStore {
            options,
            ..Self::in_memory()
        };
        let len = file.metadata().map_err(io_err(path))?.len();
        if len < HEADER_LEN {
            // New file, or a header torn mid-write.
            file.set_len(0).map_err(io_err(path))?;
            let mut header = Vec::with_capacity(HEADER_LEN as usize);
            header.extend_from_slice(MAGIC);
            header.extend_from_slice(&VERSION.to_le_bytes());
            header.extend_from_slice(&0u16.to_le_bytes());
            file.write_all(&header).map_err(io_err(path))?;
            file.sync_all().map_err(io_err(path))?;
        } else {
            let mut bytes = Vec::with_capacity(len as usize);
            file.read_to_end(&mut bytes).map_err(io_err(path))?;
            if &bytes[..8] != MAGIC || u16::from_le_bytes([bytes[8], bytes[9]]) != VERSION {
                return Err(StoreError::BadHeader(path.to_path_buf()));
            }
            let good = store.replay(&bytes);
            if good < len {
                log::warn!(
                    "{}: discarding {} bytes of torn or corrupt tail",
                    path.display(),
                    len - good
                );
                store.recovered_bytes = len - good;
                file.set_len(good).map_err(io_err(path))?;
                file.sync_all().map_err(io_err(path))?;
            }
        }
        file.seek(SeekFrom::End(0)).map_err(io_err(path))?;
        store.file = Some((file, path.to_path_buf()));
        Ok(store)
    }

    /// Applies every intact record; returns the offset just past the last one.
    fn replay(&mut self, bytes: &[u8]) -> u64 {
        let mut pos = HEADER_LEN as usize;
        while let Some(head) = bytes.get(pos..pos + 8) {
            let len = u32::from_le_bytes(head[..4].try_into().unwrap()) as usize;
            let crc = u32::from_le_bytes(head[4..].try_into().unwrap());
            if len > MAX_RECORD {
                break;
            }
            let Some(payload) = bytes.get(pos + 8..pos + 8 + len) else {
                break;
            };
            if crc32fast::hash(payload) != crc {
                break;
            }
            let Ok(entry) = serde_json::from_slice::<ScoreStoreEntry>(payload) else {
                break;
            };
            self.apply(entry);
            pos += 8 + len;
        }
        pos as u64
    }

    fn apply(&mut self, entry: ScoreStoreEntry) {
        self.records += 1;
        self.last_ts = self.last_ts.max(entry.recorded_at);
        self.latest.insert(entry.account.clone(), entry);
    }

    /// Bytes cut from the end of the file when it was opened.
    pub fn recovered_bytes(&self) -> u64 {
        self.recovered_bytes
    }

    /// Appends `entry`. Timestamps are raised to the last recorded one so
    /// they never go backwards within this writer.
    pub fn record(&mut self, mut entry: ScoreStoreEntry) -> Result<Ack, StoreError> {
        if entry.account.is_empty() {
            return Err(StoreError::InvalidEntry("empty account key".into()));
        }
        if !entry.scores.all_in_unit_interval() {
            return Err(StoreError::InvalidEntry(format!("scores outside [0,1]: {:?}", entry.scores)));
        }
        entry.account = account_key(&entry.account);
        entry.recorded_at = entry.recorded_at.max(self.last_ts);
        if let Some((file, path)) = &mut self.file {
            let payload = serde_json::to_vec(&entry).expect("entry serializes");
            let mut rec = Vec::with_capacity(8 + payload.len());
            rec.extend_from_slice(&(payload.len() as u32).to_le_bytes());
            rec.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
            rec.extend_from_slice(&payload);
            file.write_all(&rec).map_err(io_err(path))?;
            if self.options.sync_writes {
                file.sync_data().map_err(io_err(path))?;
            }
        }
        let recorded_at = entry.recorded_at;
        self.apply(entry);
        Ok(Ack {
            sequence: self.records,
            recorded_at,
        })
    }

    pub fn latest(&self, screen_name: &str) -> Option<&ScoreStoreEntry> {
        self.latest.get(&account_key(screen_name))
    }

    pub fn record_count(&self) -> u64 {
        self.records
    }

    pub fn unique_accounts(&self) -> usize {
        self.latest.len()
    }

    /// Latest overall score per account.
    pub fn unique_account_scores(&self) -> BTreeMap<String, f64> {
        self.latest
            .iter()
            .map(|(k, e)| (k.clone(), e.scores.overall))
            .collect()
    }

    /// Fraction of accounts whose latest overall score is `<= threshold`.
    pub fn cdf_at(&self, threshold: f64) -> Result<f64, StoreError> {
        if self.latest.is_empty() {
            return Err(StoreError::EmptyStore);
        }
        let below = self
            .latest
            .values()
            .filter(|e| e.scores.overall <= threshold)
            .count();
        Ok(below as f64 / self.latest.len() as f64)
    }

    /// Empirical CDF of latest overall scores at `bins + 1` evenly spaced
    /// thresholds `0, 1/bins, ..., 1`.
    pub fn score_cdf(&self, bins: usize) -> Result<Vec<CdfPoint>, StoreError> {
        if bins == 0 {
            return Err(StoreError::InvalidEntry("bins must be positive".into()));
        }
        if self.latest.is_empty() {
            return Err(StoreError::EmptyStore);
        }
        let mut scores: Vec<f64> = self.latest.values().map(|e| e.scores.overall).collect();
        scores.sort_by(f64::total_cmp);
        let n = scores.len() as f64;
        Ok((0..=bins)
            .map(|j| {
                let threshold = j as f64 / bins as f64;
                let below = scores.partition_point(|&s| s <= threshold);
                CdfPoint {
                    threshold,
                    fraction: below as f64 / n,
                }
            })
            .collect())
    }

    /// Rewrites the log keeping only the latest entry per account.
    pub fn compact(&mut self) -> Result<(), StoreError> {
        let Some((_, path)) = &self.file else {
            return Ok(());
        };
        let path = path.clone();
        let tmp = path.with_extension("compact.tmp");
        let _ = std::fs::remove_file(&tmp);
        let mut entries: Vec<ScoreStoreEntry> = self.latest.values().cloned().collect();
        entries.sort_by(|a, b| (a.recorded_at, &a.account).cmp(&(b.recorded_at, &b.account)));
        {
            let mut fresh = ScoreStore::open_with(&tmp, StoreOptions { sync_writes: false })?;
            for e in entries {
                fresh.record(e)?;
            }
            if let Some((f, p)) = &fresh.file {
                f.sync_all().map_err(io_err(p))?;
            }
        }
        std::fs::rename(&tmp, &path).map_err(io_err(&path))?;
        *self = ScoreStore::open_with(&path, self.options)?;
        Ok(())
    }

    /// Every record in log order, for audits.
    pub fn read_log(path: &Path) -> Result<Vec<ScoreStoreEntry>, StoreError> {
        let bytes = std::fs::read(path).map_err(io_err(path))?;
        if bytes.len() < HEADER_LEN as usize || &bytes[..8] != MAGIC {
            return Err(StoreError::BadHeader(path.to_path_buf()));
        }
        let mut out = Vec::new();
        let mut pos = HEADER_LEN as usize;
        while let Some(head) = bytes.get(pos..pos + 8) {
            let len = u32::from_le_bytes(head[..4].try_into().unwrap()) as usize;
            let Some(payload) = bytes.get(pos + 8..pos + 8 + len) else {
                break;
            };
            if crc32fast::hash(payload) != u32::from_le_bytes(head[4..].try_into().unwrap()) {
                break;
            }
            match serde_json::from_slice(payload) {
                Ok(e) => out.push(e),
                Err(_) => break,
            }
            pos += 8 + len;
        }
        Ok(out)
    }
}

//! Fixed-window request limiter keyed by API token or client address.

use std::collections::HashMap;
use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::account::Timestamp;

pub const DEFAULT_LIMIT: u32 = 180;
pub const DEFAULT_WINDOW_SECS: i64 = 900;

/// Stale windows are swept once the table grows past this many keys.
const SWEEP_AT: usize = 10_000;

pub trait Clock: Send + Sync {
    fn now(&self) -> Timestamp;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> Timestamp {
        chrono::Utc::now().timestamp()
    }
}

/// A clock that only moves when told to.
#[derive(Debug, Default)]
pub struct ManualClock(AtomicI64);

impl ManualClock {
    pub fn new(t: Timestamp) -> Self {
        ManualClock(AtomicI64::new(t))
    }

    pub fn set(&self, t: Timestamp) {
        self.0.store(t, Ordering::SeqCst);
    }

    pub fn advance(&self, secs: i64) {
        self.0.fetch_add(secs, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Timestamp {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub allowed: bool,
    pub limit: u32,
    pub remaining: u32,
    /// When the current window ends.
    pub reset_at: Timestamp,
}

impl Decision {
    /// Seconds until the window resets, at least 1.
    pub fn retry_after(&self, now: Timestamp) -> i64 {
        (self.reset_at - now).max(1)
    }
}

#[derive(Debug, Clone, Copy)]
struct Window {
    start: Timestamp,
    count: u32,
}

/// Windows start at a key's first request and last `window_secs`; within a
/// window at most `limit` requests are admitted.
#[derive(Debug)]
pub struct RateLimiter {
    limit: u32,
    window_secs: i64,
    windows: Mutex<HashMap<String, Window>>,
}

impl Default for RateLimiter {
    fn default() -> Self {
        RateLimiter::new(DEFAULT_LIMIT, DEFAULT_WINDOW_SECS)
    }
}

impl RateLimiter {
    pub fn new(limit: u32, window_secs: i64) -> Self {
        RateLimiter {
            limit,
            window_secs: window_secs.max(1),
            windows: Mutex::new(HashMap::new()),
        }
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    pub fn window_secs(&self) -> i64 {
        self.window_secs
    }

    pub fn allow(&self, key: &str, now: Timestamp) -> Decision {
        let mut windows = self.windows.lock().unwrap_or_else(|e| e.into_inner());
        if windows.len() >= SWEEP_AT && !windows.contains_key(key) {
            let span = self.window_secs;
            windows.retain(|_, w| now < w.start + span);
        }
        let w = windows.entry(key.to_string()).or_insert(Window { start: now, count: 0 });
        if now >= w.start + self.window_secs {
            *w = Window { start: now, count: 0 };
        }
        let allowed = w.count < self.limit;
        if allowed {
            w.count += 1;
        }
        Decision {
            allowed,
            limit: self.limit,
            remaining: self.limit - w.count,
            reset_at: w.start + self.window_secs,
        }
    }
}

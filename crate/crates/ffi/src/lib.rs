//! C API for scoring snapshots with a trained model suite.
//!
//! Every function returns a [`BsStatus`]; on failure a message is available
//! from [`bs_last_error_message`] on the same thread. Strings handed out by
//! the library must be released with [`bs_string_free`], suites with
//! [`bs_suite_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use botscope::evaluation::roc_auc;
use botscope::parse_snapshot;
use botscope::service::{Scorer, ServiceError};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    InvalidModel = 4,
    InvalidSnapshot = 5,
    InvalidInput = 6,
    Internal = 7,
}

/// The seven scores, each in [0, 1].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BsScores {
    pub overall: f64,
    pub network: f64,
    pub user: f64,
    pub friends: f64,
    pub temporal: f64,
    pub content: f64,
    pub sentiment: f64,
}

/// A loaded model suite with its feature registry and lexicons. Opaque.
pub struct BsSuite {
    scorer: Scorer,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: BsStatus, msg: impl Into<String>) -> BsStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting panics into `Internal`.
fn guard(f: impl FnOnce() -> BsStatus) -> BsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            fail(BsStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

/// Borrows a C string as UTF-8.
///
/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, BsStatus> {
    if p.is_null() {
        return Err(fail(BsStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(BsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn service_status(e: &ServiceError) -> BsStatus {
    match e {
        ServiceError::Model(botscope::forest::ForestError::Io { .. }) | ServiceError::Lexicons(_) => BsStatus::Io,
        ServiceError::Model(_) | ServiceError::RegistryMismatch { .. } => BsStatus::InvalidModel,
        _ => BsStatus::Internal,
    }
}

fn out_string(s: String, out: *mut *mut c_char) -> BsStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for null before getting here.
            unsafe { *out = c.into_raw() };
            BsStatus::Ok
        }
        Err(_) => fail(BsStatus::Internal, "output contained a NUL byte"),
    }
}

/// Loads a model suite. `lexicon_dir` may be null to use the built-in
/// sentiment lexicons. On success `*out` owns the suite.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_suite_load(
    model_path: *const c_char,
    lexicon_dir: *const c_char,
    out: *mut *mut BsSuite,
) -> BsStatus {
    guard(|| {
        if out.is_null() {
            return fail(BsStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let model = match str_arg(model_path, "model_path") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let lex = if lexicon_dir.is_null() {
            None
        } else {
            match str_arg(lexicon_dir, "lexicon_dir") {
                Ok(s) => Some(Path::new(s)),
                Err(s) => return s,
            }
        };
        match Scorer::load(Path::new(model), lex) {
            Ok(scorer) => {
                *out = Box::into_raw(Box::new(BsSuite { scorer }));
                BsStatus::Ok
            }
            Err(e) => fail(service_status(&e), e.to_string()),
        }
    })
}

/// Releases a suite. Null is ignored.
///
/// # Safety
/// `suite` must be null or a pointer from [`bs_suite_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bs_suite_free(suite: *mut BsSuite) {
    if !suite.is_null() {
        drop(Box::from_raw(suite));
    }
}

/// Copies the suite's model version string into `*out`.
///
/// # Safety
/// `suite` must come from [`bs_suite_load`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_suite_model_version(suite: *const BsSuite, out: *mut *mut c_char) -> BsStatus {
    guard(|| {
        if suite.is_null() || out.is_null() {
            return fail(BsStatus::NullArgument, "suite or out is null");
        }
        out_string((*suite).scorer.model_version().to_string(), out)
    })
}

/// Scores one snapshot document (the JSON accepted by the scoring API).
///
/// # Safety
/// `suite` must come from [`bs_suite_load`]; `snapshot_json` must be
/// NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_score_snapshot_json(
    suite: *const BsSuite,
    snapshot_json: *const c_char,
    out: *mut BsScores,
) -> BsStatus {
    guard(|| {
        if suite.is_null() || out.is_null() {
            return fail(BsStatus::NullArgument, "suite or out is null");
        }
        let doc = match str_arg(snapshot_json, "snapshot_json") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let snapshot = match parse_snapshot(doc) {
            Ok(p) => p.snapshot,
            Err(e) => return fail(BsStatus::InvalidSnapshot, e.to_string()),
        };
        match (*suite).scorer.scores(&snapshot) {
            Ok(s) => {
                *out = BsScores {
                    overall: s.overall,
                    network: s.network,
                    user: s.user,
                    friends: s.friends,
                    temporal: s.temporal,
                    content: s.content,
                    sentiment: s.sentiment,
                };
                BsStatus::Ok
            }
            Err(e) => fail(service_status(&e), e.to_string()),
        }
    })
}

/// Scores a snapshot and writes the JSON score report to `*out`.
/// `recorded_at` is the report timestamp in Unix seconds; nonzero `detail`
/// adds the tweet and mention times.
///
/// # Safety
/// As for [`bs_score_snapshot_json`]; free `*out` with [`bs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bs_score_report_json(
    suite: *const BsSuite,
    snapshot_json: *const c_char,
    recorded_at: i64,
    detail: i32,
    out: *mut *mut c_char,
) -> BsStatus {
    guard(|| {
        if suite.is_null() || out.is_null() {
            return fail(BsStatus::NullArgument, "suite or out is null");
        }
        *out = ptr::null_mut();
        let doc = match str_arg(snapshot_json, "snapshot_json") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let snapshot = match parse_snapshot(doc) {
            Ok(p) => p.snapshot,
            Err(e) => return fail(BsStatus::InvalidSnapshot, e.to_string()),
        };
        let scorer = &(*suite).scorer;
        match scorer.scores(&snapshot) {
            Ok(s) => {
                let report = scorer.report(&snapshot, s, recorded_at, detail != 0);
                match serde_json::to_string(&report) {
                    Ok(j) => out_string(j, out),
                    Err(e) => fail(BsStatus::Internal, e.to_string()),
                }
            }
            Err(e) => fail(service_status(&e), e.to_string()),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next library call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn bs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Rank (Mann-Whitney) AUC of `n` scores against 0/1 labels.
///
/// # Safety
/// `scores` and `labels` must point to `n` readable elements; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bs_roc_auc(scores: *const f64, labels: *const u8, n: usize, out: *mut f64) -> BsStatus {
    guard(|| {
        if scores.is_null() || labels.is_null() || out.is_null() {
            return fail(BsStatus::NullArgument, "scores, labels or out is null");
        }
        let s = std::slice::from_raw_parts(scores, n);
        let y: Vec<bool> = std::slice::from_raw_parts(labels, n).iter().map(|&b| b != 0).collect();
        match roc_auc(s, &y) {
            Ok(a) => {
                *out = a;
                BsStatus::Ok
            }
            Err(e) => fail(BsStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn bs_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

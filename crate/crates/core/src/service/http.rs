//! HTTP routes.
//!
//! ```text
//! GET  /api/v1/score/{screen_name}[?detail=1]  -> ScoreReport
//! POST /api/v1/score[?detail=1]                -> ScoreReport (body: snapshot document)
//! GET  /api/v1/stats/cdf?bins=K                -> CDF document, 204 when no scores yet
//! GET  /api/v1/health                          -> build and model versions
//! ```
//!
//! Both score routes are rate limited and answer with `X-RateLimit-*`
//! headers; a refused request gets 429 with `Retry-After`.

use std::net::SocketAddr;

use axum::extract::{ConnectInfo, Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderName, HeaderValue, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use super::{AppState, KeyMode, ServiceError};
use crate::account::parse_snapshot;
use crate::ingest::{fetch_account, FetchError};
use crate::store::{CdfPoint, StoreError};

const DEFAULT_BINS: usize = 20;
const MAX_BINS: usize = 1000;

const X_LIMIT: HeaderName = HeaderName::from_static("x-ratelimit-limit");
const X_REMAINING: HeaderName = HeaderName::from_static("x-ratelimit-remaining");
const X_RESET: HeaderName = HeaderName::from_static("x-ratelimit-reset");
const X_API_KEY: HeaderName = HeaderName::from_static("x-api-key");

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        log::error!("internal error: {e}");
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", "internal error")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.code, "message": self.message }))).into_response()
    }
}

impl From<FetchError> for ApiError {
    fn from(e: FetchError) -> Self {
        match e {
            FetchError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "not_found", e.to_string()),
            FetchError::InvalidName(_) => ApiError::new(StatusCode::BAD_REQUEST, "invalid_name", e.to_string()),
            FetchError::Upstream(_) | FetchError::Schema(_) => {
                ApiError::new(StatusCode::BAD_GATEWAY, "upstream", e.to_string())
            }
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError::internal(e)
    }
}

#[derive(Debug, Default, Deserialize)]
struct DetailQuery {
    #[serde(default)]
    detail: Option<String>,
}

impl DetailQuery {
    fn wanted(&self) -> bool {
        matches!(self.detail.as_deref(), Some("1" | "true" | "yes"))
    }
}

#[derive(Debug, Deserialize)]
struct CdfQuery {
    bins: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CdfDocument {
    pub bins: usize,
    pub unique_accounts: usize,
    pub points: Vec<CdfPoint>,
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(ApiError::internal)?
}

async fn score_by_name(
    State(state): State<AppState>,
    Path(screen_name): Path<String>,
    Query(q): Query<DetailQuery>,
) -> Result<Response, ApiError> {
    let detail = q.wanted();
    let report = blocking(move || {
        let snapshot = fetch_account(state.source.as_ref(), &screen_name)?;
        Ok(state.score_and_record(&snapshot, detail)?)
    })
    .await?;
    Ok(Json(report).into_response())
}

async fn score_snapshot(
    State(state): State<AppState>,
    Query(q): Query<DetailQuery>,
    body: String,
) -> Result<Response, ApiError> {
    let detail = q.wanted();
    let report = blocking(move || {
        let parsed = parse_snapshot(&body)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_snapshot", e.to_string()))?;
        Ok(state.score_and_record(&parsed.snapshot, detail)?)
    })
    .await?;
    Ok(Json(report).into_response())
}

async fn score_cdf(State(state): State<AppState>, Query(q): Query<CdfQuery>) -> Result<Response, ApiError> {
    let bins = q.bins.unwrap_or(DEFAULT_BINS);
    if bins == 0 || bins > MAX_BINS {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_bins",
            format!("bins must be between 1 and {MAX_BINS}"),
        ));
    }
    let store = state.store.lock().unwrap_or_else(|e| e.into_inner());
    match store.score_cdf(bins) {
        Ok(points) => Ok(Json(CdfDocument {
            bins,
            unique_accounts: store.unique_accounts(),
            points,
        })
        .into_response()),
        Err(StoreError::EmptyStore) => Ok(StatusCode::NO_CONTENT.into_response()),
        Err(e) => Err(ApiError::internal(e)),
    }
}

async fn health(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "build": env!("CARGO_PKG_VERSION"),
        "model_version": state.scorer.model_version(),
        "registry_version": state.scorer.registry().version(),
        "features": state.scorer.registry().len(),
    }))
}

fn limiter_key(mode: KeyMode, headers: &HeaderMap, addr: Option<SocketAddr>) -> String {
    if mode == KeyMode::TokenOrAddress {
        let token = headers
            .get(X_API_KEY)
            .and_then(|v| v.to_str().ok())
            .or_else(|| {
                headers
                    .get(header::AUTHORIZATION)
                    .and_then(|v| v.to_str().ok())
                    .and_then(|v| v.strip_prefix("Bearer "))
            })
            .map(str::trim)
            .filter(|t| !t.is_empty());
        if let Some(t) = token {
            return format!("token:{t}");
        }
    }
    match addr {
        Some(a) => format!("addr:{}", a.ip()),
        None => "addr:unknown".into(),
    }
}

fn header_num(v: i64) -> HeaderValue {
    HeaderValue::from(v)
}

async fn rate_limit(State(state): State<AppState>, req: Request, next: Next) -> Response {
    let addr = req.extensions().get::<ConnectInfo<SocketAddr>>().map(|c| c.0);
    let key = limiter_key(state.key_mode, req.headers(), addr);
    let now = state.clock.now();
    let d = state.limiter.allow(&key, now);
    let mut resp = if d.allowed {
        next.run(req).await
    } else {
        let retry = d.retry_after(now);
        let mut r = ApiError::new(
            StatusCode::TOO_MANY_REQUESTS,
            "rate_limited",
            format!("limit of {} requests per window reached; retry in {retry} s", d.limit),
        )
        .into_response();
        r.headers_mut().insert(header::RETRY_AFTER, header_num(retry));
        r
    };
    let h = resp.headers_mut();
    h.insert(X_LIMIT, header_num(d.limit.into()));
    h.insert(X_REMAINING, header_num(d.remaining.into()));
    h.insert(X_RESET, header_num(d.reset_at));
    resp
}

fn cors(origins: &[String]) -> CorsLayer {
    let base = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers([header::CONTENT_TYPE, header::AUTHORIZATION, X_API_KEY])
        .expose_headers([X_LIMIT, X_REMAINING, X_RESET, header::RETRY_AFTER]);
    if origins.iter().any(|o| o == "*") {
        base.allow_origin(Any)
    } else {
        let list: Vec<HeaderValue> = origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
        base.allow_origin(AllowOrigin::list(list))
    }
}

pub fn router(state: AppState) -> Router {
    let limited = Router::new()
        .route("/api/v1/score/{screen_name}", get(score_by_name))
        .route("/api/v1/score", axum::routing::post(score_snapshot))
        .route_layer(middleware::from_fn_with_state(state.clone(), rate_limit));
    Router::new()
        .merge(limited)
        .route("/api/v1/stats/cdf", get(score_cdf))
        .route("/api/v1/health", get(health))
        .layer(cors(&state.cors_origins))
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    let app = router(state).into_make_service_with_connect_info::<SocketAddr>();
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_beats_address() {
        let addr: SocketAddr = "10.0.0.1:5555".parse().unwrap();
        let mut h = HeaderMap::new();
        assert_eq!(limiter_key(KeyMode::TokenOrAddress, &h, Some(addr)), "addr:10.0.0.1");
        h.insert(header::AUTHORIZATION, HeaderValue::from_static("Bearer abc"));
        assert_eq!(limiter_key(KeyMode::TokenOrAddress, &h, Some(addr)), "token:abc");
        h.insert(X_API_KEY, HeaderValue::from_static("k1"));
        assert_eq!(limiter_key(KeyMode::TokenOrAddress, &h, Some(addr)), "token:k1");
        assert_eq!(limiter_key(KeyMode::Address, &h, Some(addr)), "addr:10.0.0.1");
        assert_eq!(limiter_key(KeyMode::Address, &h, None), "addr:unknown");
    }

    #[test]
    fn detail_flag() {
        for (v, want) in [(Some("1"), true), (Some("true"), true), (Some("0"), false), (None, false)] {
            let q = DetailQuery { detail: v.map(String::from) };
            assert_eq!(q.wanted(), want);
        }
    }
}

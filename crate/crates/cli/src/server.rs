//! Glossary HTTP API, plus a classification proxy for browser clients.

use std::num::NonZeroUsize;
use std::sync::Arc;

use acro_core::classify::PageClassification;
use acro_core::content::SourceDocument;
use acro_core::error::{GlossaryError, PipelineError};
use acro_core::glossary::{Contribution, GlossaryEntry, GlossaryStore, Origin};
use acro_core::pipeline::Pipeline;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEARCH_LIMIT: usize = 20;

#[derive(Debug, Serialize, Deserialize)]
pub struct KeysBody {
    pub keys: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SearchBody {
    pub results: Vec<GlossaryEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ContributionAck {
    pub id: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

/// Body of `POST /classify`: page text, or raw HTML to extract it from.
#[derive(Debug, Serialize, Deserialize)]
pub struct ClassifyRequest {
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub html: Option<String>,
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<GlossaryStore>,
    /// Used for `/classify` only: noise selectors and the classifier.
    pub pipeline: Arc<Pipeline>,
}

pub struct ApiError {
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
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code.to_string(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<GlossaryError> for ApiError {
    fn from(e: GlossaryError) -> Self {
        let message = e.to_string();
        let (status, code) = match e {
            GlossaryError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            GlossaryError::ConflictCurated(_) => (StatusCode::CONFLICT, "conflict_curated"),
            GlossaryError::ValidationFailed(_) => (StatusCode::BAD_REQUEST, "validation_failed"),
            GlossaryError::UnknownContribution(_) => (StatusCode::NOT_FOUND, "unknown_contribution"),
            GlossaryError::Unreachable(_)
            | GlossaryError::StoreUnavailable(_)
            | GlossaryError::Corrupt { .. } => (StatusCode::SERVICE_UNAVAILABLE, "store_unavailable"),
        };
        ApiError::new(status, code, message)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text())
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/terms", get(list_terms))
        .route("/terms/{key}", get(get_term))
        .route("/search", get(search))
        .route("/cache", post(cache))
        .route("/contributions", post(contribute).get(pending))
        .route("/contributions/{id}/approve", post(approve))
        .route("/classify", post(classify))
        .fallback(not_found)
        .with_state(state)
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({"status": "ok"}))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

async fn list_terms(State(st): State<AppState>) -> Json<KeysBody> {
    Json(KeysBody {
        keys: st.store.list_keys().into_vec(),
    })
}

async fn get_term(State(st): State<AppState>, Path(key): Path<String>) -> ApiResult<Json<GlossaryEntry>> {
    Ok(Json(st.store.get_entry(&key)?))
}

#[derive(Debug, Deserialize)]
pub struct SearchParams {
    #[serde(default)]
    q: String,
    limit: Option<String>,
}

async fn search(State(st): State<AppState>, Query(p): Query<SearchParams>) -> ApiResult<Json<SearchBody>> {
    let limit = match p.limit.as_deref() {
        None | Some("") => NonZeroUsize::new(DEFAULT_SEARCH_LIMIT).expect("non-zero"),
        Some(raw) => raw.parse::<NonZeroUsize>().map_err(|_| {
            ApiError::new(
                StatusCode::BAD_REQUEST,
                "validation_failed",
                format!("limit must be a positive integer, got {raw:?}"),
            )
        })?,
    };
    Ok(Json(SearchBody {
        results: st.store.search(&p.q, limit),
    }))
}

/// Cached write-backs may omit `origin`; any other origin is rejected.
#[derive(Debug, Deserialize)]
struct CacheRequest {
    key: String,
    expansion: String,
    definition: String,
    #[serde(default = "ai_cached")]
    origin: Origin,
}

fn ai_cached() -> Origin {
    Origin::AiCached
}

async fn cache(
    State(st): State<AppState>,
    body: Result<Json<CacheRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<GlossaryEntry>)> {
    let Json(r) = body?;
    let entry = GlossaryEntry::new(r.key, r.expansion, r.definition, r.origin);
    let stored = st.store.upsert_cached(entry)?;
    Ok((StatusCode::CREATED, Json(stored)))
}

#[derive(Debug, Deserialize)]
struct ContributionRequest {
    key: String,
    expansion: String,
    definition: String,
}

async fn contribute(
    State(st): State<AppState>,
    body: Result<Json<ContributionRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<ContributionAck>)> {
    let Json(r) = body?;
    let entry = GlossaryEntry::new(r.key, r.expansion, r.definition, Origin::PendingContribution);
    let id = st.store.submit_contribution(entry)?;
    Ok((StatusCode::ACCEPTED, Json(ContributionAck { id })))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PendingBody {
    pub pending: Vec<Contribution>,
}

async fn pending(State(st): State<AppState>) -> Json<PendingBody> {
    Json(PendingBody {
        pending: st.store.pending(),
    })
}

async fn approve(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<GlossaryEntry>> {
    let id: u64 = id.parse().map_err(|_| {
        ApiError::new(StatusCode::BAD_REQUEST, "validation_failed", format!("invalid contribution id {id:?}"))
    })?;
    Ok(Json(st.store.approve_contribution(id)?))
}

async fn classify(
    State(st): State<AppState>,
    body: Result<Json<ClassifyRequest>, JsonRejection>,
) -> ApiResult<Json<PageClassification>> {
    let Json(req) = body?;
    // Live providers use blocking HTTP; keep them off the async workers.
    let pipeline = st.pipeline.clone();
    let result = tokio::task::spawn_blocking(move || match (req.text, req.html) {
        (Some(text), None) => pipeline.classifier.classify(&text),
        (None, Some(html)) => pipeline
            .classify_document(&SourceDocument::new("request", html))
            .map(|(_, c)| c),
        _ => Err(PipelineError::ParseFailure("send exactly one of `text` or `html`".into())),
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    result.map(Json).map_err(|e| {
        let message = e.to_string();
        match e {
            PipelineError::AllProvidersFailed(_) => {
                ApiError::new(StatusCode::BAD_GATEWAY, "providers_failed", message)
            }
            PipelineError::Glossary(g) => g.into(),
            _ => ApiError::new(StatusCode::BAD_REQUEST, "invalid_input", message),
        }
    })
}

/// Serve until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

//! Live informativeness scoring over HTTP.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/sessions` | `{venue_task, lambda?, alpha?, import_user_id?}` | `{session_id, lambda, alpha}` |
//! | POST | `/sessions/{id}/score` | `{text}` | score breakdown |
//! | POST | `/sessions/{id}/share` | `{text}` | breakdown scored before the share |
//! | GET | `/sessions/{id}` | | session summary |
//! | GET | `/venues` | | loaded tasks |
//!
//! A breakdown carries `novelty`, `relevance`, `informativeness`, `lambda`,
//! `alpha` and a `per_term` list of `{index, term, count, seen, novelty,
//! importance}`. Drafts without in-vocabulary terms get HTTP 422 with
//! `{"error": "no scoreable terms", "novelty": null}`.

mod error;
mod state;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use leakscope_core::infoscore::{InfoParams, ScoreBreakdown, DEFAULT_ALPHA, DEFAULT_LAMBDA};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

pub use error::ApiError;
pub use state::{AppState, HistoryEntry, Session, SessionSummary, ShareRecord, VenueTask};

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub venue_task: String,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub import_user_id: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub session_id: String,
    pub lambda: f64,
    pub alpha: f64,
}

#[derive(Debug, Deserialize)]
pub struct Draft {
    pub text: String,
}

#[derive(Debug, Serialize)]
pub struct VenueInfo {
    pub venue: String,
    pub trees: usize,
    pub visitors: usize,
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/score", post(score))
        .route("/sessions/{id}/share", post(share))
        .route("/venues", get(venues))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

async fn create_session(State(state): State<Arc<AppState>>, Json(req): Json<CreateSession>) -> Result<Json<Created>, ApiError> {
    let params = InfoParams::new(req.lambda.unwrap_or(DEFAULT_LAMBDA), req.alpha.unwrap_or(DEFAULT_ALPHA))
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let session_id = state.create_session(&req.venue_task, params, req.import_user_id.as_deref())?;
    Ok(Json(Created {
        session_id,
        lambda: params.lambda(),
        alpha: params.alpha(),
    }))
}

async fn score(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(draft): Json<Draft>,
) -> Result<Json<ScoreBreakdown>, ApiError> {
    state.score(&id, &draft.text).map(Json)
}

async fn share(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(draft): Json<Draft>,
) -> Result<Json<ScoreBreakdown>, ApiError> {
    state.share(&id, &draft.text).map(Json)
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionSummary>, ApiError> {
    state.summary(&id).map(Json)
}

async fn venues(State(state): State<Arc<AppState>>) -> Json<Vec<VenueInfo>> {
    Json(
        state
            .tasks
            .iter()
            .map(|(venue, t)| VenueInfo {
                venue: venue.clone(),
                trees: t.ensemble.trees.len(),
                visitors: t.visitors,
            })
            .collect(),
    )
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Serves until Ctrl-C, then writes the session snapshot if a path is set.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr, snapshot: Option<PathBuf>) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })?;
    tracing::info!(%addr, tasks = state.tasks.len(), "scoring service listening");
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(path) = snapshot {
        let body = serde_json::to_vec_pretty(&state.snapshot()).expect("snapshot serializes");
        std::fs::write(&path, body)?;
        tracing::info!(path = %path.display(), "wrote session snapshot");
    }
    Ok(())
}

//! HTTP routes. Bodies are JSON; 400 marks a rule or input violation, 404
//! an unknown session and 409 a session busy with another request.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use thue_core::Transcript;

use crate::session::{Mode, ServiceError, SessionStore, View};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let code = match self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Busy(_) => StatusCode::CONFLICT,
        };
        (code, Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    pub mode: Mode,
    pub q: u64,
    pub rounds: u64,
}

#[derive(Debug, Serialize)]
pub struct Created {
    pub id: String,
    pub view: View,
}

#[derive(Debug, Deserialize)]
pub struct BobMove {
    pub slot: usize,
}

#[derive(Debug, Deserialize)]
pub struct AliceMove {
    pub color: u64,
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload.map(|Json(v)| v).map_err(|e| ServiceError::BadRequest(e.body_text()))
}

async fn health() -> &'static str {
    "ok"
}

async fn create(
    State(store): State<Arc<SessionStore>>,
    payload: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<Json<Created>, ServiceError> {
    let req = body(payload)?;
    // a table search may run here, off the async workers
    let view = tokio::task::spawn_blocking(move || store.create(req.mode, req.q, req.rounds))
        .await
        .map_err(|e| ServiceError::BadRequest(format!("session setup failed: {e}")))??;
    Ok(Json(Created { id: view.id.clone(), view }))
}

async fn view(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> Result<Json<View>, ServiceError> {
    store.view(&id).map(Json)
}

async fn transcript(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
) -> Result<Json<Transcript>, ServiceError> {
    store.transcript(&id).map(Json)
}

async fn bob_move(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    payload: Result<Json<BobMove>, JsonRejection>,
) -> Result<Json<View>, ServiceError> {
    let m = body(payload)?;
    store.bob_move(&id, m.slot).map(Json)
}

async fn alice_move(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    payload: Result<Json<AliceMove>, JsonRejection>,
) -> Result<Json<View>, ServiceError> {
    let m = body(payload)?;
    // engine-Bob's reply may consult the solver
    tokio::task::spawn_blocking(move || store.alice_move(&id, m.color))
        .await
        .map_err(|e| ServiceError::BadRequest(format!("move failed: {e}")))?
        .map(Json)
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(view))
        .route("/sessions/{id}/transcript", get(transcript))
        .route("/sessions/{id}/bob-move", post(bob_move))
        .route("/sessions/{id}/alice-move", post(alice_move))
        .with_state(store)
}

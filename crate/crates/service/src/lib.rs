//! HTTP facade over graph view sessions.
//!
//! Graphs are uploaded in the line-oriented ingestion format and frozen under
//! a content hash. A session walks one graph with the selection, expansion
//! and navigation operators; every operator response is the minimal weighted
//! view of the new state. Operations on one session are serialized.

pub mod config;
pub mod error;
pub mod store;

use std::collections::BTreeSet;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use graphview_core::{EdgeMode, GraphSummary, Label, NavState, Operation, VertexId, ViewDocument};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use config::Config;
pub use error::ApiError;
pub use store::Store;

pub type AppState = Arc<Store>;

pub fn router(store: AppState) -> Router {
    Router::new()
        .route("/graphs", post(create_graph))
        .route("/graphs/{id}/schema", get(graph_schema))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_state))
        .route("/sessions/{id}/select", post(op_select))
        .route("/sessions/{id}/expand", post(op_expand))
        .route("/sessions/{id}/navigate", post(op_navigate))
        .route("/sessions/{id}/view", get(session_view))
        .route("/sessions/{id}/history", get(session_history))
        .with_state(store)
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

fn labels(names: Vec<String>) -> BTreeSet<Label> {
    names.into_iter().map(Label::from).collect()
}

async fn create_graph(State(store): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?.to_owned();
    let (id, g, report) = tokio::task::spawn_blocking(move || store.add_graph(&text))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    #[derive(Serialize)]
    struct Created {
        id: String,
        #[serde(flatten)]
        summary: GraphSummary,
    }
    let body = Created {
        id,
        summary: GraphSummary::new(&g, report),
    };
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn graph_schema(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let g = store.graph(&id)?;
    Ok(Json(g.schema()).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    graph: String,
    #[serde(default)]
    l_c: Option<Vec<String>>,
    #[serde(default)]
    l_b: Option<Vec<String>>,
    #[serde(default)]
    mode: Option<EdgeMode>,
    /// A history export to replay instead of starting fresh.
    #[serde(default)]
    history: Option<String>,
}

fn session_body(s: &store::Session) -> serde_json::Value {
    json!({
        "id": s.id,
        "graph": s.graph_id,
        "mode": s.nav.mode(),
        "state": s.nav.state(),
        "view": s.nav.document(false),
    })
}

async fn create_session(State(store): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateSession = parse_body(&body)?;
    let cfg = store.config();
    let mode = req.mode.unwrap_or_else(|| cfg.mode());
    let l_c = labels(req.l_c.unwrap_or_else(|| cfg.entry_l_c.clone()));
    let l_b = labels(req.l_b.unwrap_or_else(|| cfg.entry_l_b.clone()));
    let history = req.history;
    let graph = req.graph;
    let handle = tokio::task::spawn_blocking(move || {
        let entry = match history {
            Some(_) => None,
            None => {
                let g = store.graph(&graph)?;
                let entry = NavState::entry(l_c, l_b)?;
                entry.validate(&g)?;
                Some(entry)
            }
        };
        store.create_session(&graph, entry, history.as_deref(), mode)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    let session = handle.lock().await;
    Ok((StatusCode::CREATED, Json(session_body(&session))).into_response())
}

async fn session_state(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let handle = store.session(&id)?;
    let session = handle.lock().await;
    Ok(Json(session_body(&session)).into_response())
}

/// Runs `op` on the session while holding its lock; concurrent requests on
/// the same session queue behind it.
async fn apply(store: AppState, id: String, op: Operation) -> Result<Response, ApiError> {
    let handle = store.session(&id)?;
    let mut session = handle.lock_owned().await;
    let doc: ViewDocument = tokio::task::spawn_blocking(move || {
        session.nav.apply(&op)?;
        store.persist(&session)?;
        Ok::<_, ApiError>(session.nav.document(false))
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(doc).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectBody {
    ids: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpandBody {
    l_c: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NavigateBody {
    l_c: Vec<String>,
    l_b: Vec<String>,
}

async fn op_select(State(store): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: SelectBody = parse_body(&body)?;
    let ids = req.ids.into_iter().map(VertexId::from).collect();
    apply(store, id, Operation::Select(ids)).await
}

async fn op_expand(State(store): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: ExpandBody = parse_body(&body)?;
    apply(store, id, Operation::Expand(labels(req.l_c))).await
}

async fn op_navigate(State(store): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: NavigateBody = parse_body(&body)?;
    apply(
        store,
        id,
        Operation::Navigate {
            l_c: labels(req.l_c),
            l_b: labels(req.l_b),
        },
    )
    .await
}

#[derive(Deserialize)]
struct ViewQuery {
    #[serde(default)]
    full: bool,
}

async fn session_view(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> Result<Response, ApiError> {
    let handle = store.session(&id)?;
    let session = handle.lock().await;
    Ok(Json(session.nav.document(q.full)).into_response())
}

async fn session_history(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let handle = store.session(&id)?;
    let session = handle.lock().await;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], session.nav.history().export()).into_response())
}


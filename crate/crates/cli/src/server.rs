//! HTTP stepping service over [`Session`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use bpom_core::pomset::{BranchingPomset, EventId};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::CorsLayer;

use crate::error::CliError;
use crate::session::{EnabledEvent, Session};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_TTL: Duration = Duration::from_secs(3600);

struct Entry {
    session: Session,
    last_used: Instant,
}

/// Sessions by token. Each session has its own lock so that requests on one
/// session are serialized while distinct sessions proceed in parallel.
#[derive(Clone)]
pub struct Store {
    sessions: Arc<Mutex<HashMap<String, Arc<Mutex<Entry>>>>>,
    ttl: Duration,
}

impl Store {
    pub fn new(ttl: Duration) -> Self {
        Store { sessions: Arc::default(), ttl }
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Entry>>, ApiError> {
        self.sessions.lock().expect("store lock").get(id).cloned().ok_or(ApiError::NotFound)
    }

    /// Drops sessions idle for longer than the TTL.
    pub fn sweep(&self) {
        let now = Instant::now();
        self.sessions.lock().expect("store lock").retain(|_, entry| {
            // A session busy in a request is in use, keep it.
            entry.try_lock().map_or(true, |e| now.duration_since(e.last_used) <= self.ttl)
        });
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Serialize)]
pub struct Payload<'a> {
    pub id: &'a str,
    pub state: &'a BranchingPomset,
    pub chor: String,
    pub enabled: Vec<EnabledEvent>,
    pub terminated: bool,
}

fn payload(id: &str, s: &Session) -> Result<Response, ApiError> {
    let enabled = s.enabled();
    let body = Payload { id, state: s.pom_state(), chor: s.chor_state().to_string(), enabled, terminated: s.terminated() };
    let json = serde_json::to_value(&body).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(Json(json).into_response())
}

#[derive(Debug)]
enum ApiError {
    BadRequest(String),
    NotFound,
    NotEnabled(EventId),
    Internal(String),
}

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        match e {
            CliError::User(msg) => ApiError::BadRequest(msg),
            CliError::Internal(msg) => ApiError::Internal(msg),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::BadRequest(msg) => (StatusCode::BAD_REQUEST, msg),
            ApiError::NotFound => (StatusCode::NOT_FOUND, "unknown session".into()),
            ApiError::NotEnabled(e) => (StatusCode::CONFLICT, format!("event {} is not enabled", e.0)),
            ApiError::Internal(msg) => {
                log::error!("{msg}");
                (StatusCode::INTERNAL_SERVER_ERROR, msg)
            }
        };
        (status, Json(json!({ "error": msg }))).into_response()
    }
}

fn body<T: for<'de> Deserialize<'de>>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
}

#[derive(Deserialize)]
struct CreateRequest {
    text: String,
    #[serde(default)]
    unfold: Option<usize>,
}

#[derive(Deserialize)]
struct FireRequest {
    event: u32,
}

async fn create(State(store): State<Store>, bytes: Bytes) -> Result<Response, ApiError> {
    let req: CreateRequest = body(&bytes)?;
    let session = Session::new(&req.text, req.unfold)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let mut response = payload(&id, &session)?;
    *response.status_mut() = StatusCode::CREATED;
    let entry = Entry { session, last_used: Instant::now() };
    store.sessions.lock().expect("store lock").insert(id.clone(), Arc::new(Mutex::new(entry)));
    log::info!("session {id} created");
    Ok(response)
}

async fn state(State(store): State<Store>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let entry = store.get(&id)?;
    let mut entry = entry.lock().expect("session lock");
    entry.last_used = Instant::now();
    payload(&id, &entry.session)
}

async fn fire(State(store): State<Store>, Path(id): Path<String>, bytes: Bytes) -> Result<Response, ApiError> {
    let entry = store.get(&id)?;
    let req: FireRequest = body(&bytes)?;
    let event = EventId(req.event);
    let mut entry = entry.lock().expect("session lock");
    entry.last_used = Instant::now();
    if !entry.session.enabled().iter().any(|e| e.event == event) {
        return Err(ApiError::NotEnabled(event));
    }
    entry.session.fire(event)?;
    payload(&id, &entry.session)
}

async fn reset(State(store): State<Store>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let entry = store.get(&id)?;
    let mut entry = entry.lock().expect("session lock");
    entry.last_used = Instant::now();
    entry.session.reset();
    payload(&id, &entry.session)
}

async fn remove(State(store): State<Store>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    store.sessions.lock().expect("store lock").remove(&id).ok_or(ApiError::NotFound)?;
    Ok(StatusCode::NO_CONTENT)
}

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/session", post(create))
        .route("/session/{id}", delete(remove))
        .route("/session/{id}/state", get(state))
        .route("/session/{id}/fire", post(fire))
        .route("/session/{id}/reset", post(reset))
        .layer(CorsLayer::permissive())
        .with_state(store)
}

/// Serves on `listener` until the process ends, sweeping idle sessions.
pub async fn serve(listener: tokio::net::TcpListener, ttl: Duration) -> std::io::Result<()> {
    let store = Store::new(ttl);
    let sweeper = store.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(ttl.min(Duration::from_secs(60)).max(Duration::from_secs(1)));
        loop {
            tick.tick().await;
            sweeper.sweep();
        }
    });
    axum::serve(listener, router(store)).await
}

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;
use url::Url;
use uuid::Uuid;

use super::screens::{screens_for_task, Direction, SessionState, TaskCard};
use super::ServiceError;
use crate::resolve::{CompiledTask, SegmentSpan};

pub struct AppState {
    tasks: BTreeMap<String, Arc<CompiledTask>>,
    cards: Vec<TaskCard>,
    asset_base: Option<Url>,
    sessions: Mutex<HashMap<Uuid, Arc<Mutex<SessionState>>>>,
}

impl AppState {
    pub fn new(compiled: Vec<CompiledTask>, asset_base: Option<Url>) -> Result<Self, ServiceError> {
        let mut tasks = BTreeMap::new();
        for c in compiled {
            let id = c.task_id().to_string();
            if tasks.insert(id.clone(), Arc::new(c)).is_some() {
                return Err(ServiceError::DuplicateTask(id));
            }
        }
        let cards = tasks.values().map(|c| TaskCard::of(c)).collect();
        Ok(Self {
            tasks,
            cards,
            asset_base,
            sessions: Mutex::new(HashMap::new()),
        })
    }

    /// Loads every `*.json` compiled task in `dir`.
    pub fn from_compiled_dir(dir: &Path, asset_base: Option<Url>) -> Result<Self, ServiceError> {
        let io = |e: std::io::Error| ServiceError::Load(format!("{}: {e}", dir.display()));
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("json"))
            .collect();
        paths.sort();
        let compiled = paths
            .iter()
            .map(|p| {
                let text = std::fs::read_to_string(p).map_err(|e| ServiceError::Load(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| ServiceError::Load(format!("{}: {e}", p.display())))
            })
            .collect::<Result<Vec<CompiledTask>, _>>()?;
        Self::new(compiled, asset_base)
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn not_found(what: impl Into<String>) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, what.into())
}

fn bad_request(msg: impl std::fmt::Display) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, format!("malformed body: {msg}"))
}

type Shared = Arc<AppState>;

impl AppState {
    fn task(&self, id: &str) -> Result<&Arc<CompiledTask>, ApiError> {
        self.tasks.get(id).ok_or_else(|| not_found(format!("unknown task {id}")))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<SessionState>>, ApiError> {
        let uuid = Uuid::parse_str(id).map_err(|_| not_found(format!("unknown session {id}")))?;
        self.sessions
            .lock()
            .expect("session map lock")
            .get(&uuid)
            .cloned()
            .ok_or_else(|| not_found(format!("unknown session {id}")))
    }
}

async fn health(State(s): State<Shared>) -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "name": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "tasks": s.task_count(),
    }))
}

async fn list_tasks(State(s): State<Shared>) -> Json<Vec<TaskCard>> {
    Json(s.cards.clone())
}

async fn get_task(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    Ok(Json(&s.task(&id)?.task).into_response())
}

async fn get_screens(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    Ok(Json(screens_for_task(s.task(&id)?, &s.cards)).into_response())
}

#[derive(Serialize)]
struct PlaylistBody<'a> {
    task_id: &'a str,
    step_index: usize,
    asset_base: Option<&'a str>,
    segments: &'a [String],
    /// `segments` resolved against `asset_base`, when one is configured.
    urls: Option<Vec<String>>,
    boundaries: &'a [SegmentSpan],
}

async fn get_playlist(
    State(s): State<Shared>,
    UrlPath((id, n)): UrlPath<(String, String)>,
) -> Result<Response, ApiError> {
    let task = s.task(&id)?;
    let step = n
        .parse::<usize>()
        .ok()
        .and_then(|n| task.steps.get(n))
        .ok_or_else(|| not_found(format!("task {id} has no step {n}")))?;
    let playlist = step
        .playlist
        .as_ref()
        .ok_or_else(|| not_found(format!("step {n} of {id} failed to compile")))?;
    let urls = match &s.asset_base {
        None => None,
        Some(base) => Some(
            playlist
                .segments
                .iter()
                .map(|seg| base.join(seg).map(String::from))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?,
        ),
    };
    Ok(Json(PlaylistBody {
        task_id: &task.task.task_id,
        step_index: step.step_index,
        asset_base: s.asset_base.as_ref().map(Url::as_str),
        segments: &playlist.segments,
        urls,
        boundaries: &playlist.boundaries,
    })
    .into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewSession {
    task_id: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Navigate {
    direction: Direction,
}

async fn create_session(State(s): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req: NewSession = serde_json::from_slice(&body).map_err(bad_request)?;
    s.task(&req.task_id)?;
    let state = SessionState::new(&req.task_id);
    s.sessions
        .lock()
        .expect("session map lock")
        .insert(state.session_id, Arc::new(Mutex::new(state.clone())));
    Ok((StatusCode::CREATED, Json(state)).into_response())
}

async fn get_session(State(s): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let session = s.session(&id)?;
    let state = session.lock().expect("session lock").clone();
    Ok(Json(state).into_response())
}

async fn navigate(State(s): State<Shared>, UrlPath(id): UrlPath<String>, body: Bytes) -> Result<Response, ApiError> {
    let session = s.session(&id)?;
    let req: Navigate = serde_json::from_slice(&body).map_err(bad_request)?;
    let mut state = session.lock().expect("session lock");
    let steps = s.task(&state.task_id)?.steps.len();
    match state.navigate(req.direction, steps) {
        Some(_) => Ok(Json(state.clone()).into_response()),
        None => Ok((
            StatusCode::CONFLICT,
            Json(json!({ "error": "navigation out of bounds", "state": *state })),
        )
            .into_response()),
    }
}

/// All API routes; `ui_dir`, when given, is served under `/ui`.
pub fn router(state: AppState, ui_dir: Option<&Path>) -> Router {
    let mut app = Router::new()
        .route("/health", get(health))
        .route("/tasks", get(list_tasks))
        .route("/tasks/{id}", get(get_task))
        .route("/tasks/{id}/screens", get(get_screens))
        .route("/tasks/{id}/steps/{n}/playlist", get(get_playlist))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/navigate", post(navigate));
    if let Some(dir) = ui_dir {
        app = app.nest_service("/ui", ServeDir::new(dir));
    }
    app.with_state(Arc::new(state))
}

/// Serves until ctrl-c.
pub async fn serve(app: Router, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

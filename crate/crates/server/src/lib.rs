//! HTTP/JSON service for playing the reversed Zeckendorf game, the build-up
//! game and reversed Chomp against the engine.
//!
//! Routes:
//!
//! - `POST /games` creates a session
//! - `GET /games/{id}` returns it
//! - `POST /games/{id}/moves` plays the human's move and the engine's reply
//! - `GET /games/{id}/analysis` labels the current position
//! - `DELETE /games/{id}` drops it

pub mod error;
pub mod session;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

pub use error::ApiError;
pub use session::{
    Analysis, CreateRequest, EnginePolicy, Limits, ModeSpec, MoveBody, Session, SessionView, Status,
};

type Shared = Arc<Mutex<Session>>;

/// Every live session. Each session has its own lock, so requests on
/// different games do not wait for each other.
#[derive(Default)]
pub struct Store {
    sessions: RwLock<HashMap<String, Shared>>,
    limits: Limits,
}

/// What a snapshot keeps per session: enough to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub request: CreateRequest,
    pub moves: Vec<MoveBody>,
}

impl Store {
    pub fn new(limits: Limits) -> Store {
        Store {
            sessions: RwLock::default(),
            limits,
        }
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    fn get(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn insert(&self, session: Session) -> Shared {
        let id = session.id.clone();
        let shared = Arc::new(Mutex::new(session));
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id, Arc::clone(&shared));
        shared
    }

    fn fresh_id(&self) -> String {
        let map = self.sessions.read().expect("session map poisoned");
        loop {
            let id = format!("{:016x}", rand::random::<u64>());
            if !map.contains_key(&id) {
                return id;
            }
        }
    }

    fn remove(&self, id: &str) -> Option<Shared> {
        self.sessions
            .write()
            .expect("session map poisoned")
            .remove(id)
    }

    pub fn records(&self) -> Vec<SessionRecord> {
        let map = self.sessions.read().expect("session map poisoned");
        let mut out: Vec<SessionRecord> = map
            .values()
            .map(|s| {
                let s = s.lock().expect("session poisoned");
                SessionRecord {
                    id: s.id.clone(),
                    request: s.request.clone(),
                    moves: s.history.iter().map(|h| h.mv.clone()).collect(),
                }
            })
            .collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }

    /// Restore sessions by replaying their moves. Records that no longer
    /// replay cleanly are skipped and returned.
    pub fn restore(&self, records: Vec<SessionRecord>) -> Vec<(String, ApiError)> {
        let mut skipped = Vec::new();
        for r in records {
            match Session::replay(r.id.clone(), r.request, &r.moves, self.limits) {
                Ok(s) => {
                    self.insert(s);
                }
                Err(e) => skipped.push((r.id, e)),
            }
        }
        skipped
    }

    pub fn save_snapshot(&self, path: &Path) -> std::io::Result<()> {
        let json = serde_json::to_vec_pretty(&self.records())?;
        std::fs::write(path, json)
    }

    pub fn load_snapshot(&self, path: &Path) -> std::io::Result<Vec<(String, ApiError)>> {
        let records: Vec<SessionRecord> = serde_json::from_slice(&std::fs::read(path)?)?;
        Ok(self.restore(records))
    }
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    match payload {
        Ok(Json(v)) => Ok(v),
        Err(JsonRejection::JsonDataError(e)) => Err(ApiError::invalid(e.body_text())),
        Err(e) => Err(ApiError::bad_request(e.body_text())),
    }
}

/// Run `f` on a blocking thread with the session locked.
async fn with_session<T, F>(store: &Store, id: &str, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&mut Session) -> Result<T, ApiError> + Send + 'static,
{
    let shared = store.get(id)?;
    tokio::task::spawn_blocking(move || f(&mut shared.lock().expect("session poisoned")))
        .await
        .map_err(ApiError::internal)?
}

async fn create(
    State(store): State<Arc<Store>>,
    payload: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let request = body(payload)?;
    let id = store.fresh_id();
    let limits = store.limits();
    let session = tokio::task::spawn_blocking(move || Session::create(id, request, limits))
        .await
        .map_err(ApiError::internal)??;
    tracing::info!(id = %session.id, mode = ?session.request.mode, "created game");
    let view = session.view();
    store.insert(session);
    Ok((StatusCode::CREATED, Json(view)))
}

async fn show(
    State(store): State<Arc<Store>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionView>, ApiError> {
    with_session(&store, &id, |s| Ok(s.view())).await.map(Json)
}

async fn play(
    State(store): State<Arc<Store>>,
    UrlPath(id): UrlPath<String>,
    payload: Result<Json<MoveBody>, JsonRejection>,
) -> Result<Json<SessionView>, ApiError> {
    let mv = body(payload)?;
    with_session(&store, &id, move |s| {
        s.human_move(mv)?;
        Ok(s.view())
    })
    .await
    .map(Json)
}

async fn analysis(
    State(store): State<Arc<Store>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<Analysis>, ApiError> {
    with_session(&store, &id, |s| s.analysis()).await.map(Json)
}

async fn delete(
    State(store): State<Arc<Store>>,
    UrlPath(id): UrlPath<String>,
) -> Result<StatusCode, ApiError> {
    store.remove(&id).ok_or_else(|| ApiError::not_found(&id))?;
    Ok(StatusCode::NO_CONTENT)
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/games", post(create))
        .route("/games/{id}", get(show).delete(delete))
        .route("/games/{id}/moves", post(play))
        .route("/games/{id}/analysis", get(analysis))
        .with_state(store)
}

#[derive(Debug, Clone, Default)]
pub struct ServeConfig {
    pub limits: Limits,
    /// Sessions are loaded from here at start-up (if present) and saved
    /// here on shutdown.
    pub snapshot: Option<PathBuf>,
}

/// Serve until Ctrl-C, then write the snapshot if one is configured.
pub async fn serve(listener: TcpListener, config: ServeConfig) -> std::io::Result<()> {
    let store = Arc::new(Store::new(config.limits));
    if let Some(path) = config.snapshot.as_deref().filter(|p| p.exists()) {
        for (id, e) in store.load_snapshot(path)? {
            tracing::warn!(%id, error = %e, "dropped session from snapshot");
        }
    }
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(Arc::clone(&store)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(path) = &config.snapshot {
        store.save_snapshot(path)?;
        tracing::info!(path = %path.display(), "saved snapshot");
    }
    Ok(())
}

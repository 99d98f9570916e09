//! Real-vs-synthetic judgment sessions and the HTTP API that serves them.
//!
//! A session mixes `n` real erroneous sentences with `n` synthetic ones in a
//! seeded order. Clients only ever see `{id, text}`; the answer key stays on
//! the server and is used to score the judgments once the session is closed.
//!
//! | route               | result                                   |
//! |---------------------|------------------------------------------|
//! | `GET /api/session`  | `{"items":[{"id","text"}]}`              |
//! | `POST /api/judgment`| `{"id","synthetic"}` → 204               |
//! | `POST /api/close`   | metrics JSON (idempotent)                |
//! | `GET /api/results`  | metrics JSON, 409 before close           |

use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::eval::{score_turing, DetectionMetrics};
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub id: String,
    pub synthetic: bool,
}

#[derive(Debug, Clone)]
pub struct TuringSession {
    items: Vec<Item>,
    key: Vec<(String, bool)>,
    judgments: Vec<(String, bool)>,
    seed: u64,
    results: Option<DetectionMetrics>,
}

fn pick(pool: &[Sentence], n: usize, seed: u64) -> Vec<&Sentence> {
    let mut picked: Vec<&Sentence> = pool.iter().collect();
    picked.shuffle(&mut seeded(seed));
    picked.truncate(n);
    picked
}

impl TuringSession {
    /// Draws `n` sentences from each pool and shuffles them together. Ids are
    /// assigned after shuffling so they carry no class information.
    pub fn new(real: &[Sentence], synthetic: &[Sentence], n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("session size must be at least 1"));
        }
        if real.len() < n || synthetic.len() < n {
            return Err(Error::config(format!(
                "need {n} sentences of each kind, got {} real and {} synthetic",
                real.len(),
                synthetic.len()
            )));
        }
        let mut mixed: Vec<(&Sentence, bool)> = pick(real, n, derive_seed(seed, 0))
            .into_iter()
            .map(|s| (s, false))
            .chain(pick(synthetic, n, derive_seed(seed, 1)).into_iter().map(|s| (s, true)))
            .collect();
        mixed.shuffle(&mut seeded(derive_seed(seed, 2)));
        let width = (2 * n).to_string().len();
        let mut items = Vec::with_capacity(2 * n);
        let mut key = Vec::with_capacity(2 * n);
        for (k, (sentence, is_synthetic)) in mixed.into_iter().enumerate() {
            let id = format!("item-{:0width$}", k + 1);
            items.push(Item {
                id: id.clone(),
                text: sentence.to_string(),
            });
            key.push((id, is_synthetic));
        }
        Ok(TuringSession {
            items,
            key,
            judgments: Vec::new(),
            seed,
            results: None,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            items: self.items.clone(),
        }
    }

    /// Records a judgment; judging an id again overwrites the earlier one.
    pub fn judge(&mut self, id: &str, synthetic: bool) -> Result<()> {
        if self.results.is_some() {
            return Err(Error::config("session is closed"));
        }
        if !self.key.iter().any(|(k, _)| k == id) {
            return Err(Error::Key(id.to_string()));
        }
        self.judgments.push((id.to_string(), synthetic));
        Ok(())
    }

    /// Scores the session. Closing again returns the same metrics.
    pub fn close(&mut self) -> Result<DetectionMetrics> {
        if let Some(m) = &self.results {
            return Ok(*m);
        }
        let m = score_turing(&self.judgments, &self.key)?;
        self.results = Some(m);
        Ok(m)
    }

    pub fn is_closed(&self) -> bool {
        self.results.is_some()
    }

    pub fn results(&self) -> Option<&DetectionMetrics> {
        self.results.as_ref()
    }

    /// The answer key, available only once the session is closed.
    pub fn key(&self) -> Option<&[(String, bool)]> {
        self.results.as_ref().map(|_| self.key.as_slice())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServerOptions {
    /// Where the metrics JSON is written on close.
    pub results_path: Option<PathBuf>,
    /// Static UI assets served at `/`.
    pub ui_dir: Option<PathBuf>,
}

#[derive(Clone)]
struct AppState {
    session: Arc<Mutex<TuringSession>>,
    results_path: Option<PathBuf>,
}

const PLACEHOLDER: &str =
    "<!doctype html>\n<title>wrongsmith</title>\n<p>Judgment API at <code>/api/session</code>.</p>\n";

fn error(status: StatusCode, message: impl ToString) -> Response {
    (status, Json(serde_json::json!({ "error": message.to_string() }))).into_response()
}

async fn get_session(State(app): State<AppState>) -> Json<SessionView> {
    Json(app.session.lock().expect("session lock").view())
}

async fn post_judgment(State(app): State<AppState>, Json(judgment): Json<Judgment>) -> Response {
    let mut session = app.session.lock().expect("session lock");
    match session.judge(&judgment.id, judgment.synthetic) {
        Ok(()) => StatusCode::NO_CONTENT.into_response(),
        Err(Error::Key(id)) => error(StatusCode::NOT_FOUND, format!("unknown item id {id}")),
        Err(e) => error(StatusCode::CONFLICT, e),
    }
}

async fn post_close(State(app): State<AppState>) -> Response {
    let (metrics, first) = {
        let mut session = app.session.lock().expect("session lock");
        let first = !session.is_closed();
        match session.close() {
            Ok(m) => (m, first),
            Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, e),
        }
    };
    if first {
        if let Some(path) = &app.results_path {
            if let Err(e) = std::fs::write(path, metrics.to_json() + "\n") {
                log::error!("could not write {}: {e}", path.display());
                return error(StatusCode::INTERNAL_SERVER_ERROR, e);
            }
            log::info!("wrote session results to {}", path.display());
        }
    }
    Json(metrics).into_response()
}

async fn get_results(State(app): State<AppState>) -> Response {
    match app.session.lock().expect("session lock").results() {
        Some(m) => Json(*m).into_response(),
        None => error(StatusCode::CONFLICT, "session is still open"),
    }
}

pub fn router(session: TuringSession, options: ServerOptions) -> Router {
    let state = AppState {
        session: Arc::new(Mutex::new(session)),
        results_path: options.results_path,
    };
    let api = Router::new()
        .route("/api/session", get(get_session))
        .route("/api/judgment", post(post_judgment))
        .route("/api/close", post(post_close))
        .route("/api/results", get(get_results))
        .with_state(state);
    match options.ui_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER) })),
    }
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

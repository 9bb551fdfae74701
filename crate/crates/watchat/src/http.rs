//! JSON API under `/api/v1`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::Value;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::config::Config;
use crate::dto::*;
use crate::engine::{ApiError, Engine, Expectation};
use crate::session::{ConfigSnapshot, ExportLine, SessionStore};

#[derive(Clone)]
pub struct AppState {
    pub engine: Arc<Engine>,
    pub sessions: Arc<SessionStore>,
    pub jobs: Arc<Jobs>,
    /// Diagnose requests above this budget become background jobs.
    pub sync_budget: usize,
}

impl AppState {
    pub fn new(config: &Config) -> anyhow::Result<Self> {
        let engine = Engine::from_config(config)?;
        let snapshot = ConfigSnapshot {
            kappa: engine.kappa,
            max_candidates: engine.max_candidates,
            prior_q: watchat_core::MisconceptionId::all().map(|m| engine.prior.q(m)).collect(),
        };
        Ok(AppState {
            engine: Arc::new(engine),
            sessions: Arc::new(SessionStore::new(snapshot, config.session_export_dir.clone())),
            jobs: Arc::new(Jobs::default()),
            sync_budget: config.diagnose_sync_budget,
        })
    }
}

type JobResult = Result<DiagnoseReport, ApiError>;

struct Job {
    cancel: Arc<AtomicBool>,
    result: Arc<Mutex<Option<JobResult>>>,
}

#[derive(Default)]
pub struct Jobs {
    next: AtomicU64,
    map: Mutex<HashMap<String, Job>>,
}

pub fn router(state: AppState, cors_origins: &[String]) -> Router {
    let origins = if cors_origins.is_empty() {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(cors_origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    let cors = CorsLayer::new()
        .allow_origin(origins)
        .allow_methods([Method::GET, Method::POST, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE]);
    let api = Router::new()
        .route("/eval", post(eval))
        .route("/wat", post(wat))
        .route("/explain", post(explain))
        .route("/misconceptions", get(misconceptions))
        .route("/diagnose", post(diagnose))
        .route("/diagnose/{job}", get(poll_job).delete(cancel_job))
        .route("/sessions/{id}", get(session));
    Router::new().nest("/api/v1", api).fallback(not_found).layer(cors).with_state(state)
}

pub async fn serve(config: &Config) -> anyhow::Result<()> {
    let state = AppState::new(config)?;
    let app = router(state, &config.cors_origins);
    let addr: SocketAddr = format!("{}:{}", config.host, config.port).parse()?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("watchat listening on http://{}/api/v1", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn envelope<T: Serialize>(status: StatusCode, env: ApiEnvelope<T>) -> Response {
    (status, Json(env)).into_response()
}

fn error_response(e: &ApiError) -> Response {
    let status = StatusCode::from_u16(e.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    envelope::<()>(status, ApiEnvelope::failure(e.body()))
}

fn bad_body(rejection: JsonRejection) -> ApiError {
    ApiError::new(400, "invalid_request", rejection.body_text())
}

async fn not_found() -> Response {
    error_response(&ApiError::new(404, "not_found", "no such endpoint"))
}

/// Runs engine work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    tokio::task::spawn_blocking(f).await.expect("engine task panicked")
}

/// Builds the response and, for session requests, appends it to the export.
fn finish<T: Serialize>(st: &AppState, interaction: &str, session: Option<&str>, request: Value, result: Result<T, ApiError>) -> Response {
    let (status, env) = match result {
        Ok(p) => (StatusCode::OK, ApiEnvelope::success(p)),
        Err(e) => (StatusCode::from_u16(e.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR), ApiEnvelope::failure(e.body())),
    };
    if let Some(id) = session {
        let line = ExportLine { interaction: interaction.to_string(), session: id.to_string(), request, envelope: env };
        if let Err(e) = st.sessions.export(id, &line) {
            eprintln!("session export failed for {id}: {e}");
        }
        return envelope(status, line.envelope);
    }
    envelope(status, env)
}

async fn eval(State(st): State<AppState>, body: Result<Json<EvalRequest>, JsonRejection>) -> Response {
    let req = match body {
        Ok(Json(r)) => r,
        Err(e) => return error_response(&bad_body(e)),
    };
    let engine = st.engine.clone();
    let source = req.source.clone();
    let result = blocking(move || engine.eval(&source)).await;
    if let (Some(id), Ok(r)) = (&req.session, &result) {
        st.sessions.record_eval(id, &req.source, &r.display);
    }
    finish(&st, "eval", req.session.as_deref(), serde_json::json!({"source": req.source}), result)
}

async fn wat(State(st): State<AppState>, body: Result<Json<WatRequest>, JsonRejection>) -> Response {
    let req = match body {
        Ok(Json(r)) => r,
        Err(e) => return error_response(&bad_body(e)),
    };
    let engine = st.engine.clone();
    let source = req.source.clone();
    let result = blocking(move || engine.wat(&source)).await;
    if let (Some(id), Ok(r)) = (&req.session, &result) {
        st.sessions.record_wat(id, &req.source, &r.display, &r.candidates, r.question.as_deref());
    }
    finish(&st, "wat", req.session.as_deref(), serde_json::json!({"source": req.source}), result)
}

async fn explain(State(st): State<AppState>, body: Result<Json<ExplainRequest>, JsonRejection>) -> Response {
    let req = match body {
        Ok(Json(r)) => r,
        Err(e) => return error_response(&bad_body(e)),
    };
    let request = serde_json::json!({
        "source": req.source,
        "expected_display": req.expected_display,
        "candidate_id": req.candidate_id,
    });
    let engine = st.engine.clone();
    let (source, display, id) = (req.source.clone(), req.expected_display.clone(), req.candidate_id);
    let result = blocking(move || match (display.as_deref(), id) {
        (Some(d), _) => engine.explain(&source, Expectation::Display(d)),
        (None, Some(i)) => engine.explain(&source, Expectation::CandidateId(i)),
        (None, None) => Err(ApiError::new(400, "invalid_request", "expected_display or candidate_id is required")),
    })
    .await;
    if let (Some(id), Ok(r)) = (&req.session, &result) {
        st.sessions.record_explain(id, &req.source, r);
    }
    finish(&st, "explain", req.session.as_deref(), request, result)
}

async fn misconceptions(State(st): State<AppState>) -> Response {
    envelope(StatusCode::OK, ApiEnvelope::success(st.engine.misconceptions()))
}

/// Sets the flag when dropped, so a synchronous search stops once the
/// client goes away and the handler future is dropped.
struct CancelOnDrop(Arc<AtomicBool>);

impl Drop for CancelOnDrop {
    fn drop(&mut self) {
        self.0.store(true, Ordering::Relaxed);
    }
}

async fn diagnose(State(st): State<AppState>, body: Result<Json<DiagnoseRequest>, JsonRejection>) -> Response {
    let req = match body {
        Ok(Json(r)) => r,
        Err(e) => return error_response(&bad_body(e)),
    };
    let budget = match st.engine.synthesis_options(&req) {
        Ok((_, opts)) => opts.budget,
        Err(e) => return error_response(&e),
    };
    let cancel = Arc::new(AtomicBool::new(false));
    let engine = st.engine.clone();

    if budget <= st.sync_budget {
        let guard = CancelOnDrop(cancel.clone());
        let result = blocking(move || engine.diagnose(&req, &|| cancel.load(Ordering::Relaxed))).await;
        std::mem::forget(guard);
        return match result {
            Ok(r) => envelope(StatusCode::OK, ApiEnvelope::success(r)),
            Err(e) => error_response(&e),
        };
    }

    let token = format!("job-{}", st.jobs.next.fetch_add(1, Ordering::Relaxed) + 1);
    let slot = Arc::new(Mutex::new(None));
    st.jobs.map.lock().expect("job lock").insert(token.clone(), Job { cancel: cancel.clone(), result: slot.clone() });
    tokio::task::spawn_blocking(move || {
        let r = engine.diagnose(&req, &|| cancel.load(Ordering::Relaxed));
        *slot.lock().expect("job slot") = Some(r);
    });
    envelope(StatusCode::ACCEPTED, ApiEnvelope::success(ticket(&token, "pending")))
}

fn ticket(token: &str, status: &str) -> JobTicket {
    JobTicket { job: token.to_string(), status: status.to_string(), poll: format!("/api/v1/diagnose/{token}") }
}

async fn poll_job(State(st): State<AppState>, Path(token): Path<String>) -> Response {
    let map = st.jobs.map.lock().expect("job lock");
    let Some(job) = map.get(&token) else {
        return error_response(&ApiError::new(404, "unknown_job", format!("no job {token}")));
    };
    let done = job.result.lock().expect("job slot").clone();
    match done {
        None => envelope(StatusCode::ACCEPTED, ApiEnvelope::success(ticket(&token, "pending"))),
        Some(Ok(r)) => envelope(StatusCode::OK, ApiEnvelope::success(r)),
        Some(Err(e)) => error_response(&e),
    }
}

async fn cancel_job(State(st): State<AppState>, Path(token): Path<String>) -> Response {
    let map = st.jobs.map.lock().expect("job lock");
    match map.get(&token) {
        Some(job) => {
            job.cancel.store(true, Ordering::Relaxed);
            envelope(StatusCode::OK, ApiEnvelope::success(ticket(&token, "cancelling")))
        }
        None => error_response(&ApiError::new(404, "unknown_job", format!("no job {token}"))),
    }
}

async fn session(State(st): State<AppState>, Path(id): Path<String>) -> Response {
    match st.sessions.get(&id) {
        Some(s) => envelope(StatusCode::OK, ApiEnvelope::success(s)),
        None => error_response(&ApiError::new(404, "unknown_session", format!("no session {id}"))),
    }
}

use std::time::Duration;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use watchat::config::Config;
use watchat::engine::{Engine, Expectation};
use watchat::http::{router, AppState};

#[path = "../../core/tests/corpus/mod.rs"]
mod corpus;

fn app_with(config: &Config) -> Router {
    router(AppState::new(config).unwrap(), &config.cors_origins)
}

fn app() -> Router {
    app_with(&Config::default())
}

async fn call(app: &Router, method: Method, path: &str, body: Option<Value>) -> (StatusCode, Value, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(path);
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    let v = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, v, bytes)
}

/// The value as a client sees it after a trip through JSON text.
fn wire<T: serde::Serialize>(t: &T) -> Value {
    serde_json::from_str(&serde_json::to_string(t).unwrap()).unwrap()
}

async fn post(app: &Router, path: &str, body: Value) -> (StatusCode, Value) {
    let (s, v, _) = call(app, Method::POST, path, Some(body)).await;
    (s, v)
}

#[tokio::test]
async fn eval_matches_the_library_on_goldens() {
    let app = app();
    let engine = Engine::default();
    for src in corpus::all_programs() {
        let (s, v) = post(&app, "/api/v1/eval", json!({"source": src})).await;
        assert_eq!(s, StatusCode::OK, "{src}");
        assert_eq!(v["ok"], true);
        assert_eq!(v["payload"], wire(&engine.eval(src).unwrap()), "{src}");
    }
}

#[tokio::test]
async fn wat_and_explain_match_the_library() {
    let app = app();
    let engine = Engine::default();
    let (s, v) = post(&app, "/api/v1/wat", json!({"source": corpus::C_LEX})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["payload"], wire(&engine.wat(corpus::C_LEX).unwrap()));
    assert_eq!(v["payload"]["question"], "Did you expect 10, 4 or 3?");
    let ids: Vec<&str> = v["payload"]["candidates"].as_array().unwrap().iter().map(|c| c["expected_display"].as_str().unwrap()).collect();
    assert_eq!(ids, ["10", "4", "3"]);

    let (s, v) = post(&app, "/api/v1/explain", json!({"source": corpus::C_LEX, "expected_display": "4"})).await;
    assert_eq!(s, StatusCode::OK);
    let direct = engine.explain(corpus::C_LEX, Expectation::Display("4")).unwrap();
    assert_eq!(v["payload"], wire(&direct));
    let (_, by_id) = post(&app, "/api/v1/explain", json!({"source": corpus::C_LEX, "candidate_id": 2})).await;
    assert_eq!(by_id["payload"], v["payload"]);
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (s, v) = post(&app, "/api/v1/eval", json!({"source": "1 +"})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!((v["ok"].clone(), v["error"]["code"].clone()), (json!(false), json!("parse_error")));
    assert_eq!(v["error"]["position"]["column"], 4);

    let (s, v) = post(&app, "/api/v1/eval", json!({"source": "   "})).await;
    assert_eq!((s, v["error"]["code"].clone()), (StatusCode::UNPROCESSABLE_ENTITY, json!("empty_source")));

    let (s, v) = post(&app, "/api/v1/wat", json!({"source": "while (1) {}"})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{v}");

    let (s, v) = post(&app, "/api/v1/explain", json!({"source": corpus::C_IDX, "expected_display": "42"})).await;
    assert_eq!((s, v["error"]["code"].clone()), (StatusCode::NOT_FOUND, json!("unknown_expectation")));

    let (s, v) = post(&app, "/api/v1/explain", json!({"source": corpus::C_IDX})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{v}");

    let (s, v) = post(&app, "/api/v1/eval", json!({"src": "1"})).await;
    assert_eq!((s, v["ok"].clone()), (StatusCode::BAD_REQUEST, json!(false)));

    let (s, v, _) = call(&app, Method::GET, "/api/v1/nope", None).await;
    assert_eq!((s, v["error"]["code"].clone()), (StatusCode::NOT_FOUND, json!("not_found")));

    let (s, _) = post(&app, "/api/v1/diagnose", json!({"misconception_id": 33})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn misconceptions_lists_all() {
    let (s, v, _) = call(&app(), Method::GET, "/api/v1/misconceptions", None).await;
    assert_eq!(s, StatusCode::OK);
    let list = v["payload"].as_array().unwrap();
    assert_eq!(list.len(), 32);
    assert_eq!(list[10]["id"], 11);
    assert_eq!(list[10]["message"], "JavaScript is 0-indexed, not 1-indexed.");
}

#[tokio::test]
async fn diagnose_synchronously() {
    let app = app();
    let (s, v) = post(&app, "/api/v1/diagnose", json!({"misconception_id": 8, "budget": 3})).await;
    assert_eq!(s, StatusCode::OK);
    let p = &v["payload"];
    assert_eq!(p["status"], "found");
    let src = p["program_source"].as_str().unwrap();
    let q = watchat_core::diagnostics::question_for(
        watchat_core::parse(src).unwrap(),
        watchat_core::MisconceptionId::new(8).unwrap(),
        3,
        watchat_core::MisconceptionSet::EMPTY,
    );
    assert!(q.is_ok(), "{src} does not re-verify");

    let (s, v) = post(&app, "/api/v1/diagnose", json!({"misconception_id": 1, "budget": 1})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["payload"]["status"], "failed");
    assert_eq!(v["payload"]["failure"]["kind"], "budget_exhausted");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn large_budgets_run_as_jobs() {
    let config = Config { diagnose_sync_budget: 2, ..Config::default() };
    let app = app_with(&config);
    let (s, v) = post(&app, "/api/v1/diagnose", json!({"misconception_id": 23, "budget": 4})).await;
    assert_eq!(s, StatusCode::ACCEPTED);
    let poll = v["payload"]["poll"].as_str().unwrap().to_string();
    let mut done = None;
    for _ in 0..600 {
        let (s, v, _) = call(&app, Method::GET, &poll, None).await;
        if s == StatusCode::OK {
            done = Some(v);
            break;
        }
        assert_eq!(s, StatusCode::ACCEPTED);
        tokio::time::sleep(Duration::from_millis(50)).await;
    }
    let v = done.expect("job finished");
    assert_eq!(v["payload"]["status"], "found");
    assert_eq!(v["payload"]["program_source"], r#"(+"")"#);

    let (s, _, _) = call(&app, Method::DELETE, &poll, None).await;
    assert_eq!(s, StatusCode::OK);
    let (s, _, _) = call(&app, Method::GET, "/api/v1/diagnose/job-999", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn cancelled_jobs_report_cancelled() {
    let config = Config { diagnose_sync_budget: 1, ..Config::default() };
    let app = app_with(&config);
    // 6 is entangled, so this search runs until it is stopped.
    let (_, v) = post(&app, "/api/v1/diagnose", json!({"misconception_id": 6, "budget": 9})).await;
    let poll = v["payload"]["poll"].as_str().unwrap().to_string();
    let (s, _, _) = call(&app, Method::DELETE, &poll, None).await;
    assert_eq!(s, StatusCode::OK);
    for _ in 0..600 {
        let (s, v, _) = call(&app, Method::GET, &poll, None).await;
        if s == StatusCode::OK {
            assert_eq!(v["payload"]["status"], "cancelled");
            return;
        }
        tokio::time::sleep(Duration::from_millis(50)).await;
    }
    panic!("cancelled job never finished");
}

#[tokio::test]
async fn responses_are_deterministic() {
    let app = app();
    for (path, body) in [
        ("/api/v1/eval", json!({"source": corpus::A_STR})),
        ("/api/v1/wat", json!({"source": corpus::B_PROGRAM})),
        ("/api/v1/explain", json!({"source": corpus::A_STR, "candidate_id": 1})),
    ] {
        let (_, _, a) = call(&app, Method::POST, path, Some(body.clone())).await;
        let (_, _, b) = call(&app, Method::POST, path, Some(body)).await;
        assert_eq!(a, b, "{path}");
    }
}

#[tokio::test]
async fn sessions_are_isolated_and_exported() {
    let dir = tempfile::tempdir().unwrap();
    let config = Config { session_export_dir: Some(dir.path().to_path_buf()), ..Config::default() };
    let app = app_with(&config);
    post(&app, "/api/v1/eval", json!({"source": corpus::C_IDX, "session": "alice"})).await;
    post(&app, "/api/v1/wat", json!({"source": corpus::C_IDX, "session": "alice"})).await;
    post(&app, "/api/v1/explain", json!({"source": corpus::C_IDX, "expected_display": "1", "session": "alice"})).await;
    post(&app, "/api/v1/eval", json!({"source": "1 + 1", "session": "bob"})).await;

    let (s, v, _) = call(&app, Method::GET, "/api/v1/sessions/alice", None).await;
    assert_eq!(s, StatusCode::OK);
    let h = v["payload"]["history"].as_array().unwrap();
    assert_eq!(h.len(), 1);
    assert_eq!(h[0]["state"], "explained");
    assert_eq!(v["payload"]["config"]["kappa"], 3);

    let (_, v, _) = call(&app, Method::GET, "/api/v1/sessions/bob", None).await;
    assert_eq!(v["payload"]["history"][0]["source"], "1 + 1");
    let (s, _, _) = call(&app, Method::GET, "/api/v1/sessions/carol", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let text = std::fs::read_to_string(dir.path().join("alice.jsonl")).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let kinds: Vec<&str> = lines.iter().map(|l| l["interaction"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["eval", "wat", "explain"]);
    assert!(lines.iter().all(|l| l["ok"] == true));
}

#[tokio::test]
async fn cors_preflight() {
    let config = Config { cors_origins: vec!["http://localhost:5173".into()], ..Config::default() };
    let app = app_with(&config);
    let req = Request::builder()
        .method(Method::OPTIONS)
        .uri("/api/v1/eval")
        .header(header::ORIGIN, "http://localhost:5173")
        .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
        .body(Body::empty())
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN], "http://localhost:5173");

    let req = Request::builder()
        .method(Method::OPTIONS)
        .uri("/api/v1/eval")
        .header(header::ORIGIN, "http://evil.example")
        .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
        .body(Body::empty())
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert!(resp.headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).is_none());
}

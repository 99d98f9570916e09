use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;
use wrongsmith::corpus::Sentence;
use wrongsmith::eval::DetectionMetrics;
use wrongsmith::turing::{router, ServerOptions, SessionView, TuringSession};

fn pool(kind: &str, n: usize) -> Vec<Sentence> {
    (0..n)
        .map(|k| Sentence::from_words(&[kind, &k.to_string(), "."]).unwrap())
        .collect()
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req
            .header("content-type", "application/json")
            .body(Body::from(v.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec())
}

#[tokio::test]
async fn judgment_session_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let results_path = dir.path().join("results.json");
    let session = TuringSession::new(&pool("real", 80), &pool("fake", 60), 50, 7).unwrap();
    let app = router(
        session,
        ServerOptions {
            results_path: Some(results_path.clone()),
            ui_dir: None,
        },
    );

    let (status, body) = call(&app, "GET", "/api/session", None).await;
    assert_eq!(status, StatusCode::OK);
    let raw: Value = serde_json::from_slice(&body).unwrap();
    for item in raw["items"].as_array().unwrap() {
        let keys: Vec<&String> = item.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["id", "text"]);
    }
    assert!(!String::from_utf8_lossy(&body).contains("synthetic"));
    let view: SessionView = serde_json::from_slice(&body).unwrap();
    assert_eq!(view.items.len(), 100);

    let (status, _) = call(&app, "GET", "/api/results", None).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let fakes: Vec<&str> = view
        .items
        .iter()
        .filter(|i| i.text.starts_with("fake"))
        .map(|i| i.id.as_str())
        .collect();
    let reals: Vec<&str> = view
        .items
        .iter()
        .filter(|i| i.text.starts_with("real"))
        .map(|i| i.id.as_str())
        .collect();
    let flagged = fakes[..13].iter().chain(&reals[..3]);
    for id in flagged {
        let (status, _) = call(
            &app,
            "POST",
            "/api/judgment",
            Some(json!({"id": id, "synthetic": true})),
        )
        .await;
        assert_eq!(status, StatusCode::NO_CONTENT);
    }
    // A changed mind overrides the earlier judgment.
    for synthetic in [true, false] {
        let (status, _) = call(
            &app,
            "POST",
            "/api/judgment",
            Some(json!({"id": reals[10], "synthetic": synthetic})),
        )
        .await;
        assert_eq!(status, StatusCode::NO_CONTENT);
    }
    let (status, _) = call(
        &app,
        "POST",
        "/api/judgment",
        Some(json!({"id": "item-999", "synthetic": true})),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "POST", "/api/judgment", Some(json!({"id": reals[0]}))).await;
    assert!(status.is_client_error());

    let (status, body) = call(&app, "POST", "/api/close", None).await;
    assert_eq!(status, StatusCode::OK);
    let closed: DetectionMetrics = serde_json::from_slice(&body).unwrap();
    assert_eq!((closed.tp, closed.fp, closed.fn_), (13, 3, 37));
    assert!((closed.precision * 100.0 - 81.25).abs() < 0.01);
    assert!((closed.recall * 100.0 - 26.00).abs() < 0.01);
    assert!((closed.f * 100.0 - 39.39).abs() < 0.01);
    assert_eq!(closed.beta, 1.0);

    let (status, body) = call(&app, "GET", "/api/results", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_slice::<DetectionMetrics>(&body).unwrap(), closed);
    let written: DetectionMetrics = serde_json::from_str(&std::fs::read_to_string(&results_path).unwrap()).unwrap();
    assert_eq!(written, closed);

    let (status, _) = call(
        &app,
        "POST",
        "/api/judgment",
        Some(json!({"id": fakes[20], "synthetic": true})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (_, again) = call(&app, "POST", "/api/close", None).await;
    assert_eq!(serde_json::from_slice::<DetectionMetrics>(&again).unwrap(), closed);
}

#[tokio::test]
async fn serves_placeholder_or_ui_directory() {
    let session = || TuringSession::new(&pool("real", 2), &pool("fake", 2), 2, 1).unwrap();
    let app = router(session(), ServerOptions::default());
    let (status, body) = call(&app, "GET", "/", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains("/api/session"));

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>ui</p>").unwrap();
    let app = router(
        session(),
        ServerOptions {
            results_path: None,
            ui_dir: Some(dir.path().to_path_buf()),
        },
    );
    let (status, body) = call(&app, "GET", "/", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"<p>ui</p>");
    let (status, _) = call(&app, "GET", "/api/session", None).await;
    assert_eq!(status, StatusCode::OK);
}

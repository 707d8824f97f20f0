use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use graphview_service::{router, Config, Store};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const G0: &str = "\
N x1 X
N x2 X
N y1 Y
N y2 Y
N y3 Y
N z1 Z
N z2 Z
E x1 y1
E x1 y2
E x2 y2
E x2 y3
E y1 z1
E y2 z1
E y3 z2
";

fn app_with(config: Config) -> Router {
    router(Arc::new(Store::open(config).unwrap()))
}

fn app() -> Router {
    app_with(Config::default())
}

async fn call(app: &Router, method: &str, uri: &str, body: impl Into<Body>) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).body(body.into()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn call_json(app: &Router, method: &str, uri: &str, body: Value) -> (StatusCode, Value) {
    let (s, text) = call(app, method, uri, body.to_string()).await;
    (s, serde_json::from_str(&text).unwrap_or(Value::String(text)))
}

async fn upload(app: &Router) -> String {
    let (s, text) = call(app, "POST", "/graphs", G0).await;
    assert_eq!(s, StatusCode::CREATED);
    let v: Value = serde_json::from_str(&text).unwrap();
    v["id"].as_str().unwrap().to_string()
}

async fn session(app: &Router, graph: &str, l_c: &str, l_b: &str) -> String {
    let (s, v) = call_json(app, "POST", "/sessions", json!({"graph": graph, "l_c": [l_c], "l_b": [l_b]})).await;
    assert_eq!(s, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

fn weights(view: &Value) -> Vec<(String, u64)> {
    view["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| (v["id"].as_str().unwrap().to_string(), v["weight"].as_u64().unwrap()))
        .collect()
}

#[tokio::test]
async fn graph_upload_summary_and_schema() {
    let app = app();
    let (s, text) = call(&app, "POST", "/graphs", G0).await;
    assert_eq!(s, StatusCode::CREATED);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!((v["vertices"].as_u64(), v["edges"].as_u64(), v["labels"].as_u64()), (Some(7), Some(7), Some(3)));
    let id = v["id"].as_str().unwrap();
    assert_eq!(upload(&app).await, id);

    let (s, schema) = call_json(&app, "GET", &format!("/graphs/{id}/schema"), Value::Null).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(schema["labels"], json!(["X", "Y", "Z"]));
    assert_eq!(schema["edges"], json!([["X", "Y"], ["Y", "Z"]]));

    let (s, v) = call_json(&app, "GET", "/graphs/nope/schema", Value::Null).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "unknown_graph");
}

#[tokio::test]
async fn empty_and_malformed_uploads() {
    let app = app();
    let (s, text) = call(&app, "POST", "/graphs", "").await;
    assert_eq!(s, StatusCode::CREATED);
    assert!(text.contains("\"vertices\":0"));

    let (s, text) = call(&app, "POST", "/graphs", "N x1 X\nE x1\n").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["error"]["code"], "parse_error");
    assert!(v["error"]["message"].as_str().unwrap().contains("line 2"));

    let (s, text) = call(&app, "POST", "/graphs", "N x1 X\nE x1 q\n").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(text.contains("unknown_endpoint"));
}

#[tokio::test]
async fn session_creation() {
    let app = app();
    let g = upload(&app).await;
    let (s, v) = call_json(&app, "POST", "/sessions", json!({"graph": g, "l_c": ["X"], "l_b": ["Y"]})).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["state"], json!({"filter": [], "l_c": ["X"], "l_b": ["Y"]}));
    assert_eq!(weights(&v["view"]), [("x1".into(), 2), ("x2".into(), 2)]);
    assert_eq!(v["view"]["edges"][0]["weight"], 1);

    let (s, v) = call_json(&app, "POST", "/sessions", json!({"graph": g, "l_c": ["X"], "l_b": ["X"]})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "disjointness_violation");

    let (s, v) = call_json(&app, "POST", "/sessions", json!({"graph": "missing", "l_c": ["X"], "l_b": ["Y"]})).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "unknown_graph");

    let (s, v) = call_json(&app, "POST", "/sessions", json!({"graph": g})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{v}");

    let (s, v) = call_json(&app, "POST", "/sessions", json!({"graph": g, "l_c": ["X"], "l_b": ["Y"], "mode": "directed"})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["code"], "unconnectable");
}

#[tokio::test]
async fn entry_labels_from_config() {
    let config = Config {
        entry_l_c: vec!["Z".into()],
        entry_l_b: vec!["Y".into()],
        ..Config::default()
    };
    let app = app_with(config);
    let g = upload(&app).await;
    let (s, v) = call_json(&app, "POST", "/sessions", json!({"graph": g})).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["state"]["l_c"], json!(["Z"]));
}

#[tokio::test]
async fn operator_walk() {
    let app = app();
    let g = upload(&app).await;
    let sid = session(&app, &g, "X", "Y").await;
    let op = |name: &str| format!("/sessions/{sid}/{name}");

    let (s, v) = call_json(&app, "POST", &op("select"), json!({"ids": ["x1"]})).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(weights(&v), [("x1".into(), 2)]);

    let (s, v) = call_json(&app, "POST", &op("navigate"), json!({"l_c": ["Z"], "l_b": ["Y"]})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(weights(&v), [("z1".into(), 2)]);

    let (s, v) = call_json(&app, "POST", &op("select"), json!({"ids": ["z2"]})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["code"], "selection_outside_view");
    let (s, v) = call_json(&app, "POST", &op("select"), json!({"ids": []})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "empty_selection");
    let (s, v) = call_json(&app, "POST", &op("expand"), json!({"l_c": ["Y"]})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "disjointness_violation");
    let (s, v) = call_json(&app, "POST", &op("select"), json!({"id": ["z1"]})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "bad_request");

    let (s, v) = call_json(&app, "POST", &op("select"), json!({"ids": ["z1"]})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(weights(&v), [("z1".into(), 2)]);
    assert_eq!(v["filter"], json!(["x1", "z1"]));

    let (_, full) = call_json(&app, "GET", &format!("/sessions/{sid}/view?full=true"), Value::Null).await;
    assert_eq!(weights(&full), [("z1".into(), 2)]);

    let (s, history) = call(&app, "GET", &format!("/sessions/{sid}/history"), "").await;
    assert_eq!(s, StatusCode::OK);
    let steps: Vec<&str> = history.lines().skip_while(|l| *l != "# steps").skip(1).collect();
    assert_eq!(steps.len(), 3);
    assert_eq!(history.lines().take_while(|l| *l != "# steps").count() - 1, 4);

    // navigate back: c_q = {x1} via the filter
    let (s, v) = call_json(&app, "POST", &op("navigate"), json!({"l_c": ["X"], "l_b": ["Y"]})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(weights(&v), [("x1".into(), 2)]);

    // replaying the export lands on the same state and the same bytes
    let (_, history) = call(&app, "GET", &format!("/sessions/{sid}/history"), "").await;
    let (s, replayed) = call_json(&app, "POST", "/sessions", json!({"graph": g, "history": history})).await;
    assert_eq!(s, StatusCode::CREATED, "{replayed}");
    let (_, original) = call_json(&app, "GET", &format!("/sessions/{sid}"), Value::Null).await;
    assert_eq!(replayed["state"], original["state"]);
    let rid = replayed["id"].as_str().unwrap();
    assert_eq!(
        call(&app, "GET", &format!("/sessions/{rid}/view"), "").await.1,
        call(&app, "GET", &format!("/sessions/{sid}/view"), "").await.1
    );
}

#[tokio::test]
async fn fresh_history_and_unknown_session() {
    let app = app();
    let g = upload(&app).await;
    let sid = session(&app, &g, "X", "Y").await;
    let (_, history) = call(&app, "GET", &format!("/sessions/{sid}/history"), "").await;
    assert_eq!(history.lines().count(), 3);
    let (s, v) = call_json(&app, "GET", "/sessions/nope/view", Value::Null).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "unknown_session");
}

#[tokio::test]
async fn identical_requests_identical_bytes() {
    let app = app();
    let g = upload(&app).await;
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let sid = session(&app, &g, "X", "Y").await;
        let (_, a) = call(&app, "POST", &format!("/sessions/{sid}/select"), r#"{"ids":["x2"]}"#).await;
        let (_, b) = call(&app, "POST", &format!("/sessions/{sid}/navigate"), r#"{"l_c":["Z"],"l_b":["Y"]}"#).await;
        outputs.push((a, b));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_operations_serialize() {
    let app = app();
    let g = upload(&app).await;
    let sid = session(&app, &g, "X", "Y").await;
    let mut tasks = Vec::new();
    for i in 0..16 {
        let app = app.clone();
        let uri = format!("/sessions/{sid}/navigate");
        let body = if i % 2 == 0 {
            r#"{"l_c":["Z"],"l_b":["Y"]}"#
        } else {
            r#"{"l_c":["X"],"l_b":["Y"]}"#
        };
        tasks.push(tokio::spawn(async move { call(&app, "POST", &uri, body).await.0 }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let (_, history) = call(&app, "GET", &format!("/sessions/{sid}/history"), "").await;
    let steps: Vec<&str> = history.lines().skip_while(|l| *l != "# steps").skip(1).collect();
    assert_eq!(steps.len(), 16);
    // each step leaves from the previous step's target
    for w in steps.windows(2) {
        assert_eq!(w[0].split(' ').nth(2), w[1].split(' ').next());
    }
}

#[tokio::test]
async fn persistence_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let config = Config {
        data_dir: Some(dir.path().to_path_buf()),
        ..Config::default()
    };
    let app = app_with(config.clone());
    let g = upload(&app).await;
    let sid = session(&app, &g, "X", "Y").await;
    call(&app, "POST", &format!("/sessions/{sid}/select"), r#"{"ids":["x1"]}"#).await;
    let (_, before) = call(&app, "GET", &format!("/sessions/{sid}/view"), "").await;
    drop(app);

    let app = app_with(config);
    let (s, after) = call(&app, "GET", &format!("/sessions/{sid}/view"), "").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(after, before);
    let (s, _) = call(&app, "GET", &format!("/graphs/{g}/schema"), "").await;
    assert_eq!(s, StatusCode::OK);
}

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use pdei_app::api::Context;
use pdei_app::server::router;
use pdei_core::labor::{Dataset, BUILTIN_DATASET};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> axum::Router {
    router(Arc::new(Context::new(Dataset::builtin(BUILTIN_DATASET).unwrap()).unwrap()))
}

async fn call(req: Request<Body>) -> (StatusCode, Value) {
    let resp = app().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn get(uri: &str) -> (StatusCode, Value) {
    call(Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post(uri: &str, body: impl Into<Body>) -> (StatusCode, Value) {
    call(
        Request::post(uri)
            .header("content-type", "application/json")
            .body(body.into())
            .unwrap(),
    )
    .await
}

#[tokio::test]
async fn health_and_sectors() {
    let (s, v) = get("/api/health").await;
    assert_eq!((s, v["status"].as_str()), (StatusCode::OK, Some("ok")));
    let (s, v) = get("/api/sectors").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["sectors"].as_array().unwrap().len(), 6);
    assert_eq!(v["sectors"][0]["sector_name"], "Chief executives");
}

#[tokio::test]
async fn disparity_lookup() {
    let (s, v) = get("/api/disparity?sector=S2").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["sectors"].as_array().unwrap().len(), 1);
    assert!((v["sectors"][0]["G1"].as_f64().unwrap() - 0.5198).abs() < 1e-4);
    let (_, v) = get("/api/disparity").await;
    assert_eq!(v["sectors"].as_array().unwrap().len(), 6);
    let (s, v) = get("/api/disparity?sector=S9").await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v, json!({"code": "unknown_sector", "message": "unknown sector S9", "field": "sector"}));
}

#[tokio::test]
async fn rank_uniform_pool() {
    let pool = pdei_core::pipeline::uniform_pool(pdei_core::pipeline::Scenario::RaceOnly);
    let body = json!({"candidates": pool, "sector": "S1", "scenario": "race_only"}).to_string();
    let (s, v) = post("/api/rank", body).await;
    assert_eq!(s, StatusCode::OK);
    let top = &v["ranking"][0];
    assert_eq!((top["candidate_id"].as_str(), top["pdei"].as_f64()), (Some("R4/C1"), Some(1.0)));
}

#[tokio::test]
async fn malformed_bodies_are_422() {
    let (s, v) = post("/api/rank", "{not json").await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "malformed_json");

    let body = r#"{"sector":"S1","candidates":[{"id":"a","race_group":"R1","gender_group":"G1","scores":"x"}]}"#;
    let (s, v) = post("/api/rank", body).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["field"], "candidates[0].scores");

    let (s, v) = post("/api/rank", r#"{"sector":"S1","extra":1}"#).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "invalid_field");

    let (s, v) = post("/api/audit", r#"{"candidates":[]}"#).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["message"].as_str().unwrap().contains("selected_ids"));
}

#[tokio::test]
async fn whatif_round_trip() {
    let (s, v) = post("/api/whatif", r#"{"request_id":"r7","sector":"S1","scheme":"equal","k":4}"#).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["request_id"], "r7");
    assert_eq!(v["audit"]["passes"], true);
    assert_eq!(v["selection"]["selected"].as_array().unwrap().len(), 4);
    assert_eq!(v["plot"].as_array().unwrap().len(), 16);

    let (s, v) = post("/api/whatif", r#"{"request_id":"r8","sector":"S1","scheme":"raw","k":17}"#).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!((v["code"].as_str(), v["field"].as_str()), (Some("k_out_of_range"), Some("k")));
    assert_eq!(v["request_id"], "r8");
}

#[tokio::test]
async fn audit_endpoint() {
    let pool = pdei_core::pipeline::uniform_pool(pdei_core::pipeline::Scenario::RaceAndGender);
    let body = json!({"candidates": pool, "selected_ids": ["R1&G1/C1", "R1&G2/C1"], "group_by": "gender"});
    let (s, v) = post("/api/audit", body.to_string()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["passes"], true);
    assert_eq!(v["groups"]["G1"]["rate"], 1.0 / 16.0);

    let body = json!({"candidates": pool, "selected_ids": ["nobody"]});
    let (s, v) = post("/api/audit", body.to_string()).await;
    assert_eq!((s, v["field"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("selected_ids")));
}

#[tokio::test]
async fn unknown_route_and_method() {
    let (s, _) = get("/api/nothing").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let resp = app().oneshot(Request::get("/api/rank").body(Body::empty()).unwrap()).await.unwrap();
    assert_eq!(resp.status(), StatusCode::METHOD_NOT_ALLOWED);
}

#[tokio::test]
async fn responses_do_not_depend_on_order() {
    let app = app();
    let reqs = [
        r#"{"sector":"S2","scenario":"race_gender"}"#,
        r#"{"sector":"S6"}"#,
        r#"{"sector":"S9"}"#,
    ];
    let mut first = Vec::new();
    for r in reqs {
        let resp = app.clone().oneshot(Request::post("/api/rank").body(Body::from(r)).unwrap()).await.unwrap();
        first.push(resp.into_body().collect().await.unwrap().to_bytes());
    }
    for (i, r) in reqs.iter().enumerate().rev() {
        let resp = app.clone().oneshot(Request::post("/api/rank").body(Body::from(*r)).unwrap()).await.unwrap();
        assert_eq!(resp.into_body().collect().await.unwrap().to_bytes(), first[i]);
    }
}

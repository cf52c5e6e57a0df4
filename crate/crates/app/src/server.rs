//! HTTP front end. Handlers are stateless over a shared, immutable [`Context`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};

use crate::api::{self, ApiError, AuditRequest, Context, RankRequest, WhatIfRequest};

fn json_response<T: Serialize>(status: StatusCode, value: &T) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], api::to_json(value)).into_response()
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = if self.is_internal() {
            StatusCode::INTERNAL_SERVER_ERROR
        } else {
            StatusCode::UNPROCESSABLE_ENTITY
        };
        json_response(status, &self)
    }
}

fn reply<T: Serialize>(result: Result<T, ApiError>) -> Response {
    match result {
        Ok(v) => json_response(StatusCode::OK, &v),
        Err(e) => e.into_response(),
    }
}

type Shared = State<Arc<Context>>;

async fn health(State(ctx): Shared) -> Response {
    json_response(StatusCode::OK, &api::health(&ctx))
}

async fn sectors(State(ctx): Shared) -> Response {
    json_response(StatusCode::OK, &api::sectors(&ctx))
}

#[derive(Deserialize)]
struct DisparityQuery {
    sector: Option<String>,
}

async fn disparity(State(ctx): Shared, Query(q): Query<DisparityQuery>) -> Response {
    reply(api::disparity(&ctx, q.sector.as_deref()))
}

async fn rank(State(ctx): Shared, body: Bytes) -> Response {
    reply(api::parse_json::<RankRequest>(&body).and_then(|req| api::rank_pool(&ctx, &req)))
}

async fn audit(body: Bytes) -> Response {
    reply(api::parse_json::<AuditRequest>(&body).and_then(|req| api::audit(&req)))
}

async fn whatif(State(ctx): Shared, body: Bytes) -> Response {
    reply(api::parse_json::<WhatIfRequest>(&body).and_then(|req| api::whatif(&ctx, &req)))
}

async fn not_found() -> Response {
    json_response(
        StatusCode::NOT_FOUND,
        &ApiError::validation("not_found", "no such endpoint", None),
    )
}

pub fn router(ctx: Arc<Context>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/sectors", get(sectors))
        .route("/api/disparity", get(disparity))
        .route("/api/rank", post(rank))
        .route("/api/audit", post(audit))
        .route("/api/whatif", post(whatif))
        .fallback(not_found)
        .with_state(ctx)
}

/// Binds `addr` and serves until interrupted. Binding failures are returned
/// before any request is accepted.
pub async fn serve(ctx: Arc<Context>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(ctx))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

//! HTTP binding: one POST route per endpoint, bodies and responses as in
//! the in-process API.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::sync::Mutex;

use super::{
    AccessService, ApiRequest, ApiResponse, ClockRequest, EntityRequest, ErrorKind, PlanRequest, RevokeRequest,
    RuleRequest, Status, VerifyRequest,
};

type Shared = Arc<Mutex<AccessService>>;

fn status_code(r: &ApiResponse) -> StatusCode {
    match (r.status, r.error.as_ref().map(|e| e.kind)) {
        (Status::Ok | Status::OkExisting, _) => StatusCode::OK,
        (Status::Denied, _) => StatusCode::FORBIDDEN,
        (Status::Error, Some(ErrorKind::Unauthorized)) => StatusCode::UNAUTHORIZED,
        (Status::Error, Some(ErrorKind::StalePath)) => StatusCode::CONFLICT,
        (Status::Error, Some(ErrorKind::Contract)) => StatusCode::UNPROCESSABLE_ENTITY,
        (Status::Error, Some(ErrorKind::Ledger)) => StatusCode::INTERNAL_SERVER_ERROR,
        (Status::Error, _) => StatusCode::BAD_REQUEST,
    }
}

async fn dispatch(state: Shared, request: ApiRequest) -> (StatusCode, Json<ApiResponse>) {
    let response = state.lock().await.handle(request);
    (status_code(&response), Json(response))
}

pub fn router(service: AccessService) -> Router {
    router_shared(Arc::new(Mutex::new(service)))
}

pub fn router_shared(state: Shared) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route(
            "/plan",
            post(|State(s): State<Shared>, Json(r): Json<PlanRequest>| dispatch(s, ApiRequest::Plan(r))),
        )
        .route(
            "/entities",
            post(|State(s): State<Shared>, Json(r): Json<EntityRequest>| dispatch(s, ApiRequest::Entities(r))),
        )
        .route(
            "/rules",
            post(|State(s): State<Shared>, Json(r): Json<RuleRequest>| dispatch(s, ApiRequest::Rules(r))),
        )
        .route(
            "/verify",
            post(|State(s): State<Shared>, Json(r): Json<VerifyRequest>| dispatch(s, ApiRequest::Verify(r))),
        )
        .route(
            "/revoke",
            post(|State(s): State<Shared>, Json(r): Json<RevokeRequest>| dispatch(s, ApiRequest::Revoke(r))),
        )
        .route(
            "/clock",
            post(|State(s): State<Shared>, Json(r): Json<ClockRequest>| dispatch(s, ApiRequest::Clock(r))),
        )
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(service: AccessService, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(service)).await
}

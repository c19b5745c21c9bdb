use std::net::SocketAddr;

use axum::body::{Body, Bytes};
use axum::extract::State;
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::Response as HttpResponse;
use axum::Router;
use tower_http::cors::{Any, CorsLayer};

use crate::Service;

async fn dispatch(
    State(svc): State<Service>,
    method: Method,
    uri: Uri,
    body: Bytes,
) -> HttpResponse {
    let path = uri.path().to_string();
    let r = tokio::task::spawn_blocking(move || svc.handle(method.as_str(), &path, &body))
        .await
        .unwrap_or_else(|e| crate::Response::error(500, e.to_string()));
    let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let builder = HttpResponse::builder().status(status);
    match r.body {
        Some(v) => builder
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(v.to_string())),
        None => builder.body(Body::empty()),
    }
    .expect("static response parts")
}

/// Every route goes through [`Service::handle`]; CORS is open so a UI served
/// from another origin can call in.
pub fn router(svc: Service) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new().fallback(dispatch).with_state(svc).layer(cors)
}

pub async fn serve(addr: SocketAddr, svc: Service) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(svc)).await
}

//! Read-only HTTP query endpoints over an immutable graph snapshot.
//!
//! Each endpoint body is exactly the serialized result of the matching
//! in-process operation, so HTTP clients and library callers see the same
//! bytes. Errors come back as a JSON object with an `error` field.

use std::sync::Arc;

use anyhow::Result;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use regkg_core::graph::PropertyGraph;
use regkg_core::query::{
    compute_stats, intersect_documents, shortest_paths, table_of_contents, tag_usage,
    LemmaPredicate,
};
use regkg_core::taxonomy::TagType;
use regkg_core::Error;
use serde::Deserialize;
use serde::Serialize;

type SharedGraph = Arc<PropertyGraph>;

pub const DEFAULT_INTERSECT_LIMIT: usize = 25_000;
pub const DEFAULT_PATHS_LIMIT: usize = 250;

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_body(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

fn error_response(err: &Error) -> Response {
    let status = match err {
        Error::Format { .. }
        | Error::EmptyDocument
        | Error::Domain(_)
        | Error::Invalid(_)
        | Error::Ambiguous { .. } => StatusCode::BAD_REQUEST,
        Error::NotFound(_) | Error::MissingResource(_) => StatusCode::NOT_FOUND,
        Error::Integrity(_) | Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
    };
    json_response(status, error_body(&err.to_string()))
}

fn ok_body<T: Serialize>(value: &T) -> Response {
    match serde_json::to_string(value) {
        Ok(body) => json_response(StatusCode::OK, body),
        Err(e) => json_response(StatusCode::INTERNAL_SERVER_ERROR, error_body(&e.to_string())),
    }
}

fn respond<T: Serialize>(result: regkg_core::Result<T>) -> Response {
    match result {
        Ok(value) => ok_body(&value),
        Err(err) => error_response(&err),
    }
}

/// Parse a request body ourselves so malformed JSON also yields the
/// structured error object rather than a plain-text rejection.
#[allow(clippy::result_large_err)]
fn parse_body<T: for<'de> Deserialize<'de>>(body: &str) -> std::result::Result<T, Response> {
    serde_json::from_str(body).map_err(|e| {
        json_response(StatusCode::BAD_REQUEST, error_body(&format!("bad request body: {e}")))
    })
}

#[allow(clippy::result_large_err)]
fn parse_ttype(code: &str) -> std::result::Result<TagType, Response> {
    code.parse::<TagType>().map_err(|e| error_response(&e))
}

#[derive(Deserialize)]
struct IntersectRequest {
    ttype: String,
    left: String,
    right: String,
    #[serde(default = "intersect_limit")]
    limit: usize,
}

fn intersect_limit() -> usize {
    DEFAULT_INTERSECT_LIMIT
}

async fn intersect(State(graph): State<SharedGraph>, body: String) -> Response {
    let req: IntersectRequest = match parse_body(&body) {
        Ok(req) => req,
        Err(resp) => return resp,
    };
    let ttype = match parse_ttype(&req.ttype) {
        Ok(t) => t,
        Err(resp) => return resp,
    };
    respond(intersect_documents(&graph, ttype, &req.left, &req.right, req.limit))
}

#[derive(Deserialize)]
struct TocRequest {
    title: String,
    #[serde(default)]
    max_plevel: u64,
}

async fn toc(State(graph): State<SharedGraph>, body: String) -> Response {
    let req: TocRequest = match parse_body(&body) {
        Ok(req) => req,
        Err(resp) => return resp,
    };
    respond(table_of_contents(&graph, &req.title, req.max_plevel))
}

#[derive(Deserialize)]
struct UsageRequest {
    ttype: String,
    predicate: LemmaPredicate,
}

async fn usage(State(graph): State<SharedGraph>, body: String) -> Response {
    let req: UsageRequest = match parse_body(&body) {
        Ok(req) => req,
        Err(resp) => return resp,
    };
    let ttype = match parse_ttype(&req.ttype) {
        Ok(t) => t,
        Err(resp) => return resp,
    };
    ok_body(&tag_usage(&graph, ttype, &req.predicate))
}

#[derive(Deserialize)]
struct PathsRequest {
    src_contains: String,
    dst_contains: String,
    max_len: usize,
    #[serde(default = "paths_limit")]
    limit: usize,
}

fn paths_limit() -> usize {
    DEFAULT_PATHS_LIMIT
}

async fn paths(State(graph): State<SharedGraph>, body: String) -> Response {
    let req: PathsRequest = match parse_body(&body) {
        Ok(req) => req,
        Err(resp) => return resp,
    };
    respond(shortest_paths(&graph, &req.src_contains, &req.dst_contains, req.max_len, req.limit))
}

#[derive(Deserialize)]
struct StatsQuery {
    ttype: Option<String>,
}

async fn stats(State(graph): State<SharedGraph>, Query(params): Query<StatsQuery>) -> Response {
    let code = params.ttype.as_deref().unwrap_or("PROD");
    let ttype = match parse_ttype(code) {
        Ok(t) => t,
        Err(resp) => return resp,
    };
    ok_body(&compute_stats(&graph, ttype))
}

pub fn router(graph: SharedGraph) -> Router {
    Router::new()
        .route("/v1/intersect", post(intersect))
        .route("/v1/toc", post(toc))
        .route("/v1/usage", post(usage))
        .route("/v1/paths", post(paths))
        .route("/v1/stats", get(stats))
        .with_state(graph)
}

/// Bind, announce the bound address on stdout, and serve until ctrl-c.
/// Port 0 asks the OS for a free port; the announcement carries the real
/// one so callers can connect.
pub fn serve(graph: PropertyGraph, port: u16) -> Result<()> {
    let graph = Arc::new(graph);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
        let addr = listener.local_addr()?;
        println!("listening on http://{addr}");
        use std::io::Write;
        std::io::stdout().flush()?;
        axum::serve(listener, router(graph))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

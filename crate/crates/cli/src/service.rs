//! JSON-over-HTTP API for an interactive front end.
//!
//! [`Service::handle`] is a pure function of method, path and body, so the
//! routes can be tested without a socket; [`serve`] wraps it in an axum server.

use std::sync::Arc;

use axum::body::Bytes;
use axum::http::{Method, StatusCode, Uri};
use axum::response::IntoResponse;
use axum::Router;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;

use articopt::{evaluate, ingest, AgreementStore, CourseId, Error, ErrorClass, Plan, Result};

use crate::payload;

/// Status code and JSON body of one API response.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub status: u16,
    pub body: Value,
}

impl Response {
    fn ok(body: Value) -> Self {
        Response { status: 200, body }
    }

    fn error(status: u16, code: &str, detail: impl Into<String>) -> Self {
        Response {
            status,
            body: json!({"error": code, "detail": detail.into()}),
        }
    }

    fn from_error(err: &Error) -> Self {
        let status = match err.class() {
            ErrorClass::Validation => 400,
            ErrorClass::Unsolvable => 422,
        };
        Response {
            status,
            body: payload::error_body(err),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveRequest {
    agreement_ids: Vec<String>,
    #[serde(default)]
    pins: Vec<CourseId>,
    #[serde(default)]
    excludes: Vec<CourseId>,
    #[serde(default = "default_unit_cap")]
    unit_cap: f64,
}

fn default_unit_cap() -> f64 {
    evaluate::DEFAULT_UNIT_CAP.as_f64()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreRequest {
    agreement_ids: Vec<String>,
    plan: Vec<CourseId>,
}

/// Read-only API over one loaded agreement store. Safe to share across threads.
#[derive(Debug)]
pub struct Service {
    store: AgreementStore,
}

impl Service {
    pub fn new(store: AgreementStore) -> Self {
        Service { store }
    }

    pub fn store(&self) -> &AgreementStore {
        &self.store
    }

    pub fn handle(&self, method: &str, path: &str, body: &[u8]) -> Response {
        let path = path.split('?').next().unwrap_or_default().trim_end_matches('/');
        let allowed = match path {
            "/api/health" | "/api/catalog" | "/api/agreements" => "GET",
            "/api/solve" | "/api/score" => "POST",
            _ => return Response::error(404, "NOT_FOUND", format!("no route for {path}")),
        };
        if !method.eq_ignore_ascii_case(allowed) {
            return Response::error(405, "METHOD_NOT_ALLOWED", format!("{path} accepts {allowed} only"));
        }
        let result = match path {
            "/api/health" => Ok(json!({"status": "ok"})),
            "/api/catalog" => Ok(self.catalog()),
            "/api/agreements" => Ok(self.agreements()),
            "/api/solve" => match parse_body::<SolveRequest>(body) {
                Ok(request) => self.solve(request),
                Err(response) => return response,
            },
            _ => match parse_body::<ScoreRequest>(body) {
                Ok(request) => self.score(request),
                Err(response) => return response,
            },
        };
        result.map_or_else(|err| Response::from_error(&err), Response::ok)
    }

    fn catalog(&self) -> Value {
        serde_json::from_str(&ingest::catalog_to_json(self.store.catalog())).expect("catalog JSON is valid")
    }

    fn agreements(&self) -> Value {
        self.store
            .agreements()
            .iter()
            .map(|a| {
                json!({
                    "id": a.id(),
                    "institution": a.institution,
                    "major": a.major,
                    "year": a.year,
                    "kind": a.kind,
                })
            })
            .collect()
    }

    fn solve(&self, request: SolveRequest) -> Result<Value> {
        let selection = ingest::validate_selection(&request.agreement_ids, &self.store)?;
        let constraints = articopt::Constraints::new(
            request.pins.into_iter().collect(),
            request.excludes.into_iter().collect(),
        )?;
        let cap = payload::parse_units(request.unit_cap)?;
        let response = payload::solve_response(&selection, &constraints, cap, true)?;
        Ok(serde_json::to_value(&response).expect("responses serialize"))
    }

    fn score(&self, request: ScoreRequest) -> Result<Value> {
        let selection = ingest::validate_selection(&request.agreement_ids, &self.store)?;
        let plan: Plan = request.plan.into_iter().collect();
        let mistakes = evaluate::score_plan(&plan, &selection)?;
        Ok(serde_json::to_value(&mistakes).expect("reports serialize"))
    }
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> std::result::Result<T, Response> {
    serde_json::from_slice(body).map_err(|e| Response::error(400, "MALFORMED_REQUEST", e.to_string()))
}

/// Router that sends every request through [`Service::handle`].
pub fn router(service: Arc<Service>) -> Router {
    Router::new().fallback(move |method: Method, uri: Uri, body: Bytes| {
        let service = service.clone();
        async move {
            // Solving is CPU-bound; keep it off the async workers.
            let response = tokio::task::spawn_blocking(move || service.handle(method.as_str(), uri.path(), &body))
                .await
                .unwrap_or_else(|e| Response::error(500, "INTERNAL", e.to_string()));
            let status = StatusCode::from_u16(response.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            (status, axum::Json(response.body)).into_response()
        }
    })
}

pub async fn serve(listener: TcpListener, service: Arc<Service>) -> std::io::Result<()> {
    axum::serve(listener, router(service)).await
}

/// Binds `127.0.0.1:port` and serves until the process exits.
pub fn serve_blocking(port: u16, service: Arc<Service>) -> std::io::Result<()> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build()?.block_on(async {
        let listener = TcpListener::bind(("127.0.0.1", port)).await?;
        serve(listener, service).await
    })
}

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use pivotladder::adaptive::AdaptError;
use pivotladder::dsl::ParseError;
use pivotladder::graph::GraphError;
use pivotladder::pivot::PivotError;
use serde_json::json;
use thiserror::Error;

/// Errors returned by request handlers. Unknown ids map to 404, everything
/// else to 422 with a machine-readable code.
#[derive(Debug, Error)]
pub enum ApiError {
    #[error("no session with id `{0}`")]
    UnknownSession(String),
    #[error("no proposal with id {0}")]
    UnknownProposal(u32),
    #[error(transparent)]
    Pivot(#[from] PivotError),
    #[error(transparent)]
    Adapt(AdaptError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("invalid request body: {0}")]
    Body(String),
    #[error("usage log: {0}")]
    UsageLog(String),
}

impl From<AdaptError> for ApiError {
    fn from(e: AdaptError) -> Self {
        match e {
            AdaptError::UnknownProposal(id) => ApiError::UnknownProposal(id),
            other => ApiError::Adapt(other),
        }
    }
}

impl ApiError {
    pub fn code(&self) -> &'static str {
        match self {
            ApiError::UnknownSession(_) => "unknown_session",
            ApiError::UnknownProposal(_) => "unknown_proposal",
            ApiError::Pivot(e) => e.code(),
            ApiError::Adapt(e) => e.code(),
            ApiError::Graph(e) => e.code(),
            ApiError::Parse(_) => "parse_error",
            ApiError::Body(_) => "invalid_body",
            ApiError::UsageLog(_) => "usage_log",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::UnknownSession(_) | ApiError::UnknownProposal(_) => StatusCode::NOT_FOUND,
            ApiError::UsageLog(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code(), "message": self.to_string() } });
        (self.status(), Json(body)).into_response()
    }
}

/// Startup failures of [`serve`](crate::serve).
#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot read graph {path}: {message}")]
    GraphFile { path: String, message: String },
    #[error("cannot load graph {path}: {source}")]
    Graph { path: String, source: GraphError },
    #[error("cannot read usage log {path}: {message}")]
    UsageLog { path: String, message: String },
    #[error("cannot bind port {port}: {source}")]
    Bind { port: u16, source: std::io::Error },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crowdval_core::diff::IncompatibleAlignments;
use crowdval_core::revision::LogError;
use crowdval_core::ModelError;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("missing or unknown bearer token")]
    Unauthorized,
    #[error("{0}")]
    Forbidden(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    TaskClosed(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    IncompatibleAlignments(String),
    #[error("{0}")]
    Storage(String),
}

/// Wire shape of every error response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub detail: String,
}

impl ApiError {
    pub fn forbidden(detail: impl Into<String>) -> Self {
        ApiError::Forbidden(detail.into())
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        ApiError::NotFound(format!("{what} {id} not found"))
    }

    pub fn code(&self) -> &'static str {
        match self {
            ApiError::Unauthorized => "unauthorized",
            ApiError::Forbidden(_) => "forbidden",
            ApiError::NotFound(_) => "not_found",
            ApiError::Conflict(_) => "conflict",
            ApiError::TaskClosed(_) => "task_closed",
            ApiError::BadRequest(_) => "bad_request",
            ApiError::Parse(_) => "parse_error",
            ApiError::Validation(_) => "validation_error",
            ApiError::IncompatibleAlignments(_) => "incompatible_alignments",
            ApiError::Storage(_) => "storage_error",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::Unauthorized => StatusCode::UNAUTHORIZED,
            ApiError::Forbidden(_) => StatusCode::FORBIDDEN,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Conflict(_) | ApiError::TaskClosed(_) => StatusCode::CONFLICT,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Parse(_) | ApiError::Validation(_) | ApiError::IncompatibleAlignments(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ApiError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code().to_string(),
            detail: self.to_string(),
        };
        (self.status(), Json(body)).into_response()
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Parse { .. } | ModelError::Encoding(_) => ApiError::Parse(e.to_string()),
            ModelError::Validation(_) | ModelError::UnsupportedRelation { .. } => {
                ApiError::Validation(e.to_string())
            }
        }
    }
}

impl From<IncompatibleAlignments> for ApiError {
    fn from(e: IncompatibleAlignments) -> Self {
        ApiError::IncompatibleAlignments(e.to_string())
    }
}

impl From<LogError> for ApiError {
    fn from(e: LogError) -> Self {
        match e {
            LogError::NotFound(_) => ApiError::NotFound(e.to_string()),
            LogError::TaskClosed(_) => ApiError::TaskClosed(e.to_string()),
            LogError::NonMonotonicTimestamp { .. } => ApiError::Conflict(e.to_string()),
            LogError::Corrupt { .. } => ApiError::Storage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        ApiError::Storage(e.to_string())
    }
}

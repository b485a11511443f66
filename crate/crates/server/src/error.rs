use std::io;
use std::path::{Path, PathBuf};

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Data {
        path: PathBuf,
        source: presslens_core::Error,
    },

    #[error(transparent)]
    Core(#[from] presslens_core::Error),

    #[error("invalid bundle: {0}")]
    Invalid(String),
}

impl ServerError {
    pub(crate) fn at(path: &Path, source: presslens_core::Error) -> Self {
        ServerError::Data {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            ServerError::Io { .. } => true,
            ServerError::Data { source, .. } | ServerError::Core(source) => source.is_io(),
            ServerError::Invalid(_) => false,
        }
    }
}

/// Error returned by a handler, rendered as `{"error":{"code":..,"message":..}}`.
#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    BadRequest(String),
    Internal(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code, message) = match &self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, "not_found", m),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, "bad_request", m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", m),
        };
        let body = ErrorBody {
            error: ErrorDetail { code, message },
        };
        (status, Json(body)).into_response()
    }
}

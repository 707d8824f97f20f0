use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error(transparent)]
    Core(#[from] graphview_core::Error),
    #[error("unknown graph `{0}`")]
    UnknownGraph(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("invalid request: {0}")]
    BadRequest(String),
    #[error("storage failure: {0}")]
    Storage(String),
    #[error("internal failure: {0}")]
    Internal(String),
}

impl ApiError {
    pub fn code(&self) -> &'static str {
        match self {
            ApiError::Core(e) => e.code(),
            ApiError::UnknownGraph(_) => "unknown_graph",
            ApiError::UnknownSession(_) => "unknown_session",
            ApiError::BadRequest(_) => "bad_request",
            ApiError::Storage(_) => "storage_error",
            ApiError::Internal(_) => "internal_error",
        }
    }

    pub fn status(&self) -> StatusCode {
        use graphview_core::Error as E;
        match self {
            ApiError::Core(e) => match e {
                E::SelectionOutsideView(_) | E::Unconnectable { .. } | E::PreconditionViolation(_) => {
                    StatusCode::UNPROCESSABLE_ENTITY
                }
                E::IllegalStep { .. } => StatusCode::CONFLICT,
                E::TooLarge { .. } => StatusCode::PAYLOAD_TOO_LARGE,
                _ => StatusCode::BAD_REQUEST,
            },
            ApiError::UnknownGraph(_) | ApiError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Storage(_) | ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        let body = json!({ "error": { "code": self.code(), "message": self.to_string() } });
        (self.status(), Json(body)).into_response()
    }
}

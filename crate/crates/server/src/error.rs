use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use crate::session::MoveBody;

/// An error response: `{code, message, legal_moves?}` with an HTTP status.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub legal_moves: Option<Vec<MoveBody>>,
}

#[derive(Serialize)]
struct Body<'a> {
    code: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    legal_moves: Option<&'a [MoveBody]>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            code,
            message: message.into(),
            legal_moves: None,
        }
    }

    pub fn not_found(id: &str) -> ApiError {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("no game with id {id:?}"),
        )
    }

    pub fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn invalid(message: impl ToString) -> ApiError {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid_params",
            message.to_string(),
        )
    }

    pub fn over_limit() -> ApiError {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "over_solve_limit",
            "too large to solve exactly; use the strategy or random engine",
        )
    }

    pub fn illegal_move(message: impl Into<String>, legal: Vec<MoveBody>) -> ApiError {
        ApiError {
            legal_moves: Some(legal),
            ..ApiError::new(StatusCode::CONFLICT, "illegal_move", message)
        }
    }

    pub fn wrong_turn() -> ApiError {
        ApiError::new(
            StatusCode::CONFLICT,
            "wrong_turn",
            "it is the engine's turn",
        )
    }

    pub fn game_over() -> ApiError {
        ApiError::new(StatusCode::CONFLICT, "game_over", "the game is over")
    }

    pub fn internal(message: impl ToString) -> ApiError {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            message.to_string(),
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            code: self.code,
            message: &self.message,
            legal_moves: self.legal_moves.as_deref(),
        };
        (self.status, Json(body)).into_response()
    }
}

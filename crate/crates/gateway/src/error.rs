use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("authentication rejected (HTTP {status})")]
    Auth { status: u16 },

    #[error("credential variable `{0}` is not set")]
    MissingCredential(String),

    #[error("rate limited by provider")]
    RateLimited { retry_after: Option<Duration> },

    #[error("server error (HTTP {status}): {body}")]
    Server { status: u16, body: String },

    #[error("request rejected (HTTP {status}): {body}")]
    Rejected { status: u16, body: String },

    #[error("transport failure: {0}")]
    Transport(String),

    #[error("malformed provider response: {0}")]
    Malformed(String),

    #[error("gave up after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: Box<GatewayError> },

    #[error("response cache: {0}")]
    Cache(#[from] std::io::Error),
}

impl GatewayError {
    /// Whether a fresh attempt could plausibly succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(self, GatewayError::RateLimited { .. } | GatewayError::Server { .. } | GatewayError::Transport(_))
    }
}

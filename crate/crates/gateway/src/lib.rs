//! Chat-completion access for benchmark runs.
//!
//! [`Gateway`] adds response caching, a sliding-window rate limit, a cap on
//! concurrent requests and exponential-backoff retries around any
//! [`Provider`]. Two offline providers in [`mock`] answer benchmark prompts
//! without a network.

mod cache;
mod clock;
mod config;
mod error;
mod gateway;
mod http;
mod limiter;
pub mod mock;
mod provider;
mod request;
mod retry;

pub use cache::ResponseCache;
pub use clock::{Clock, FakeClock, SystemClock};
pub use config::GatewayConfig;
pub use error::GatewayError;
pub use gateway::{Gateway, GatewayStats};
pub use http::{ApiKey, ChatCompletionsProvider};
pub use limiter::{ConcurrencyLimit, RateLimiter};
pub use provider::Provider;
pub use request::ChatRequest;
pub use retry::RetryPolicy;

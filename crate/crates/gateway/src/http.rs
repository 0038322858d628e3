use std::fmt;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::error::GatewayError;
use crate::provider::Provider;
use crate::request::ChatRequest;

/// Secret token. Never printed or serialized.
#[derive(Clone)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(secret: impl Into<String>) -> Self {
        ApiKey(secret.into())
    }

    pub fn from_env(var: &str) -> Result<Self, GatewayError> {
        match std::env::var(var) {
            Ok(v) if !v.trim().is_empty() => Ok(ApiKey(v.trim().to_string())),
            _ => Err(GatewayError::MissingCredential(var.to_string())),
        }
    }

    fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(<redacted>)")
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: &'a [nestbench_core::prompt::ChatMessage],
    temperature: f64,
    max_tokens: u32,
}

/// Client for servers speaking the OpenAI chat-completions protocol.
pub struct ChatCompletionsProvider {
    base_url: String,
    key: ApiKey,
    agent: ureq::Agent,
}

impl fmt::Debug for ChatCompletionsProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChatCompletionsProvider").field("base_url", &self.base_url).field("key", &self.key).finish()
    }
}

impl ChatCompletionsProvider {
    pub fn new(base_url: impl Into<String>, key: ApiKey, timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build();
        ChatCompletionsProvider { base_url: base_url.into(), key, agent: config.into() }
    }
}

fn parse_retry_after(v: Option<&str>) -> Option<Duration> {
    v?.trim().parse::<f64>().ok().filter(|s| s.is_finite() && *s >= 0.0).map(Duration::from_secs_f64)
}

impl Provider for ChatCompletionsProvider {
    fn id(&self) -> String {
        format!("chat-completions@{}", self.base_url)
    }

    fn complete(&self, req: &ChatRequest) -> Result<String, GatewayError> {
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let wire = WireRequest {
            model: &req.model,
            messages: &req.messages,
            temperature: req.temperature,
            max_tokens: req.max_output_tokens,
        };
        let mut resp = self
            .agent
            .post(&url)
            .header("Authorization", &format!("Bearer {}", self.key.expose()))
            .send_json(&wire)
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = parse_retry_after(resp.headers().get("retry-after").and_then(|v| v.to_str().ok()));
        let body = resp.body_mut().read_to_string().map_err(|e| GatewayError::Transport(e.to_string()))?;
        match status {
            200..=299 => {
                let v: Value = serde_json::from_str(&body).map_err(|e| GatewayError::Malformed(e.to_string()))?;
                v.pointer("/choices/0/message/content")
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .ok_or_else(|| GatewayError::Malformed("missing choices[0].message.content".into()))
            }
            401 | 403 => Err(GatewayError::Auth { status }),
            429 => Err(GatewayError::RateLimited { retry_after }),
            500..=599 => Err(GatewayError::Server { status, body }),
            _ => Err(GatewayError::Rejected { status, body }),
        }
    }
}

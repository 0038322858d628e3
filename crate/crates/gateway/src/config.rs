use serde::{Deserialize, Serialize};

use crate::retry::RetryPolicy;

/// Connection and pacing settings, usually read from the run configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GatewayConfig {
    pub base_url: String,
    /// Environment variable holding the API key.
    pub api_key_env: String,
    pub requests_per_minute: Option<usize>,
    pub max_concurrency: usize,
    pub timeout_secs: u64,
    pub max_output_tokens: u32,
    pub retry: RetryPolicy,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        GatewayConfig {
            base_url: "https://api.openai.com/v1".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            requests_per_minute: Some(500),
            max_concurrency: 8,
            timeout_secs: 120,
            max_output_tokens: 1024,
            retry: RetryPolicy::default(),
        }
    }
}

use nestbench_core::prompt::ChatMessage;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Everything that determines a completion. Two requests with equal fields
/// share a cache entry; `sample_index` keeps repeated samples apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub sample_index: u32,
    pub max_output_tokens: u32,
}

impl ChatRequest {
    /// Hex SHA-256 of the request's JSON encoding.
    pub fn cache_key(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("request serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn last_user_message(&self) -> Option<&str> {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == nestbench_core::prompt::Role::User)
            .map(|m| m.content.as_str())
    }
}

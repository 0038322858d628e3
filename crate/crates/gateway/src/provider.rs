use crate::error::GatewayError;
use crate::request::ChatRequest;

/// Something that turns a chat request into completion text.
pub trait Provider: Send + Sync {
    /// Stable identifier; used to namespace cached responses.
    fn id(&self) -> String;
    fn complete(&self, req: &ChatRequest) -> Result<String, GatewayError>;
}

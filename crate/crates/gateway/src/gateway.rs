use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use nestbench_core::prompt::{ChatMessage, PromptBundle};

use crate::cache::ResponseCache;
use crate::clock::Clock;
use crate::config::GatewayConfig;
use crate::error::GatewayError;
use crate::limiter::{ConcurrencyLimit, RateLimiter};
use crate::provider::Provider;
use crate::request::ChatRequest;
use crate::retry::RetryPolicy;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct GatewayStats {
    pub provider_calls: u64,
    pub cache_hits: u64,
    pub retries: u64,
}

/// Wraps a provider with caching, rate limiting, a concurrency cap and retries.
pub struct Gateway {
    provider: Arc<dyn Provider>,
    provider_id: String,
    cache: Option<ResponseCache>,
    limiter: Option<RateLimiter>,
    concurrency: ConcurrencyLimit,
    retry: RetryPolicy,
    clock: Arc<dyn Clock>,
    calls: AtomicU64,
    hits: AtomicU64,
    retries: AtomicU64,
}

impl Gateway {
    pub fn new(provider: Arc<dyn Provider>, config: &GatewayConfig, clock: Arc<dyn Clock>, cache: Option<ResponseCache>) -> Self {
        Gateway {
            provider_id: provider.id(),
            provider,
            cache,
            limiter: config.requests_per_minute.map(|n| RateLimiter::new(n, clock.clone())),
            concurrency: ConcurrencyLimit::new(config.max_concurrency),
            retry: config.retry,
            clock,
            calls: AtomicU64::new(0),
            hits: AtomicU64::new(0),
            retries: AtomicU64::new(0),
        }
    }

    pub fn provider_id(&self) -> &str {
        &self.provider_id
    }

    pub fn stats(&self) -> GatewayStats {
        GatewayStats {
            provider_calls: self.calls.load(Ordering::Relaxed),
            cache_hits: self.hits.load(Ordering::Relaxed),
            retries: self.retries.load(Ordering::Relaxed),
        }
    }

    pub fn complete(&self, req: &ChatRequest) -> Result<String, GatewayError> {
        if let Some(text) = self.cache.as_ref().and_then(|c| c.get(&self.provider_id, req)) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(text);
        }
        let max_attempts = self.retry.max_attempts.max(1);
        let mut attempt = 0;
        let text = loop {
            let result = {
                let _permit = self.concurrency.acquire();
                if let Some(l) = &self.limiter {
                    l.acquire();
                }
                self.calls.fetch_add(1, Ordering::Relaxed);
                self.provider.complete(req)
            };
            match result {
                Ok(text) => break text,
                Err(e) if e.is_retryable() && attempt + 1 < max_attempts => {
                    let hint = match &e {
                        GatewayError::RateLimited { retry_after } => *retry_after,
                        _ => None,
                    };
                    let delay = self.retry.delay(attempt, hint);
                    log::warn!("attempt {} failed ({e}); retrying in {delay:?}", attempt + 1);
                    self.retries.fetch_add(1, Ordering::Relaxed);
                    self.clock.sleep(delay);
                    attempt += 1;
                }
                Err(e) if e.is_retryable() => {
                    return Err(GatewayError::RetriesExhausted { attempts: attempt + 1, last: Box::new(e) })
                }
                Err(e) => return Err(e),
            }
        };
        if let Some(c) = &self.cache {
            c.put(&self.provider_id, req, &text)?;
        }
        Ok(text)
    }

    /// Runs every sample of a prompt. Two-stage prompts send the followup
    /// after the first reply and keep only the second reply.
    pub fn run_bundle(&self, model: &str, bundle: &PromptBundle, max_output_tokens: u32) -> Result<Vec<String>, GatewayError> {
        (0..bundle.samples_required.max(1))
            .map(|sample_index| {
                let mut req = ChatRequest {
                    model: model.to_string(),
                    messages: bundle.messages.clone(),
                    temperature: bundle.temperature,
                    sample_index,
                    max_output_tokens,
                };
                let first = self.complete(&req)?;
                match &bundle.followup {
                    None => Ok(first),
                    Some(followup) => {
                        req.messages.push(ChatMessage::assistant(first));
                        req.messages.push(ChatMessage::user(followup.clone()));
                        self.complete(&req)
                    }
                }
            })
            .collect()
    }
}

//! Chat-completion transport with retries, transcripts and offline backends.

mod http;
mod transcript;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompt::PromptBundle;
pub use http::HttpBackend;
pub use transcript::{
    AttemptRecord, ReplayBackend, SeedLineage, TranscriptIndex, TranscriptRecord, TranscriptStore,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelEndpoint {
    pub base_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub request_timeout_secs: f64,
}

impl Default for ModelEndpoint {
    fn default() -> Self {
        ModelEndpoint {
            base_url: "https://api.openai.com/v1".into(),
            model_name: "gpt-4".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            temperature: RULE_TEMPERATURE,
            max_tokens: 4096,
            request_timeout_secs: 120.0,
        }
    }
}

/// Default sampling temperature for rule tasks.
pub const RULE_TEMPERATURE: f64 = 0.8;
/// Default sampling temperature for distribution and property tasks.
pub const DISTRIBUTION_TEMPERATURE: f64 = 0.5;

impl ModelEndpoint {
    pub fn check(&self) -> Result<(), ClientError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(ClientError::InvalidEndpoint(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if !(self.request_timeout_secs > 0.0) {
            return Err(ClientError::InvalidEndpoint("timeout must be positive".into()));
        }
        if self.max_tokens == 0 {
            return Err(ClientError::InvalidEndpoint("max_tokens must be positive".into()));
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.request_timeout_secs)
    }

    pub fn describe(&self) -> String {
        format!("{} @ {} (t={})", self.model_name, self.base_url, self.temperature)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error("authentication failed: {0}")]
    AuthError(String),
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: usize },
    #[error("request timed out")]
    Timeout,
    #[error("server error: HTTP {0}")]
    Server(u16),
    #[error("unexpected HTTP status {0}")]
    Status(u16),
    #[error("malformed endpoint reply: {0}")]
    MalformedEndpointReply(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("no transcript for request '{0}'")]
    NotFound(String),
    #[error("recorded prompt for '{0}' differs from the rebuilt prompt")]
    PromptMismatch(String),
    #[error("invalid endpoint: {0}")]
    InvalidEndpoint(String),
    #[error("transcript store: {0}")]
    Store(String),
}

impl ClientError {
    fn is_transient(&self) -> bool {
        matches!(
            self,
            ClientError::Timeout | ClientError::RateLimited { .. } | ClientError::Server(_)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub text: String,
    pub usage: Option<Usage>,
}

/// Everything a backend needs for one request.
#[derive(Debug, Clone, Copy)]
pub struct CompletionRequest<'a> {
    pub request_id: &'a str,
    pub bundle: &'a PromptBundle,
    pub endpoint: &'a ModelEndpoint,
}

pub trait Backend: Send + Sync {
    fn send(&self, request: &CompletionRequest<'_>) -> Result<Reply, ClientError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: usize,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay_ms: 1000,
            max_delay_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    /// Exponential delay before retry number `attempt` (1-based), scaled by
    /// a random factor in `[0.5, 1)`.
    pub fn delay(&self, attempt: usize) -> Duration {
        let exp = self
            .base_delay_ms
            .saturating_mul(1u64 << (attempt - 1).min(20))
            .min(self.max_delay_ms);
        let jitter = 0.5 + rand::random::<f64>() * 0.5;
        Duration::from_millis((exp as f64 * jitter) as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    pub usage: Option<Usage>,
    pub attempts: Vec<AttemptRecord>,
}

/// Shareable client: a backend plus retry policy and an optional transcript
/// store that receives one record per completed request.
pub struct LlmClient {
    backend: Box<dyn Backend>,
    endpoint: ModelEndpoint,
    retry: RetryPolicy,
    store: Option<Arc<TranscriptStore>>,
    in_flight: AtomicUsize,
    peak_in_flight: AtomicUsize,
    log: Mutex<Vec<String>>,
}

impl LlmClient {
    pub fn new(backend: Box<dyn Backend>, endpoint: ModelEndpoint) -> Self {
        LlmClient {
            backend,
            endpoint,
            retry: RetryPolicy::default(),
            store: None,
            in_flight: AtomicUsize::new(0),
            peak_in_flight: AtomicUsize::new(0),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_store(mut self, store: Arc<TranscriptStore>) -> Self {
        self.store = Some(store);
        self
    }

    pub fn endpoint(&self) -> &ModelEndpoint {
        &self.endpoint
    }

    /// Highest number of concurrent `complete` calls seen so far.
    pub fn peak_in_flight(&self) -> usize {
        self.peak_in_flight.load(Ordering::SeqCst)
    }

    /// Request ids in completion order.
    pub fn completed_ids(&self) -> Vec<String> {
        self.log.lock().expect("log lock").clone()
    }

    pub fn complete(
        &self,
        request_id: &str,
        bundle: &PromptBundle,
        lineage: SeedLineage,
    ) -> Result<Completion, ClientError> {
        self.complete_at(request_id, bundle, &self.endpoint, lineage)
    }

    /// Like [`complete`](Self::complete) against another endpoint, e.g. a
    /// different model or temperature.
    pub fn complete_at(
        &self,
        request_id: &str,
        bundle: &PromptBundle,
        endpoint: &ModelEndpoint,
        lineage: SeedLineage,
    ) -> Result<Completion, ClientError> {
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak_in_flight.fetch_max(now, Ordering::SeqCst);
        let result = self.complete_inner(request_id, bundle, endpoint, lineage);
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        self.log.lock().expect("log lock").push(request_id.to_string());
        result
    }

    fn complete_inner(
        &self,
        request_id: &str,
        bundle: &PromptBundle,
        endpoint: &ModelEndpoint,
        lineage: SeedLineage,
    ) -> Result<Completion, ClientError> {
        let request = CompletionRequest {
            request_id,
            bundle,
            endpoint,
        };
        let started = Instant::now();
        let mut attempts = Vec::new();
        let max = self.retry.max_attempts.max(1);
        let outcome = loop {
            let attempt = attempts.len() + 1;
            let t0 = Instant::now();
            let result = self.backend.send(&request);
            attempts.push(AttemptRecord {
                attempt,
                outcome: match &result {
                    Ok(_) => "ok".into(),
                    Err(e) => e.to_string(),
                },
                elapsed_ms: t0.elapsed().as_millis() as u64,
            });
            match result {
                Err(e) if e.is_transient() && attempt < max => {
                    tracing::warn!(request_id, attempt, error = %e, "retrying");
                    std::thread::sleep(self.retry.delay(attempt));
                }
                Err(ClientError::RateLimited { .. }) => {
                    break Err(ClientError::RateLimited { attempts: attempt })
                }
                other => break other,
            }
        };
        if let Some(store) = &self.store {
            let record = TranscriptRecord::new(
                request_id,
                bundle,
                endpoint,
                &outcome,
                attempts.clone(),
                started.elapsed(),
                lineage,
            );
            store.append(&record)?;
        }
        outcome.map(|reply| Completion {
            text: reply.text,
            usage: reply.usage,
            attempts,
        })
    }
}

type Script = dyn Fn(&CompletionRequest<'_>, usize) -> Result<String, ClientError> + Send + Sync;

/// Offline backend driven by a closure of `(request, call index)`.
pub struct MockBackend {
    script: Box<Script>,
    calls: AtomicUsize,
    delay: Duration,
}

impl MockBackend {
    pub fn new(
        script: impl Fn(&CompletionRequest<'_>, usize) -> Result<String, ClientError> + Send + Sync + 'static,
    ) -> Self {
        MockBackend {
            script: Box::new(script),
            calls: AtomicUsize::new(0),
            delay: Duration::ZERO,
        }
    }

    /// Always answers `text`.
    pub fn constant(text: impl Into<String>) -> Self {
        let text = text.into();
        Self::new(move |_, _| Ok(text.clone()))
    }

    /// Answers the scripted results in order, then repeats the last one.
    pub fn sequence(results: Vec<Result<String, ClientError>>) -> Self {
        assert!(!results.is_empty(), "empty script");
        Self::new(move |_, i| results[i.min(results.len() - 1)].clone())
    }

    /// Sleeps before answering; used to exercise concurrency limits.
    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Backend for MockBackend {
    fn send(&self, request: &CompletionRequest<'_>) -> Result<Reply, ClientError> {
        let i = self.calls.fetch_add(1, Ordering::SeqCst);
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        (self.script)(request, i).map(|text| Reply { text, usage: None })
    }
}

impl<B: Backend + ?Sized> Backend for Arc<B> {
    fn send(&self, request: &CompletionRequest<'_>) -> Result<Reply, ClientError> {
        (**self).send(request)
    }
}

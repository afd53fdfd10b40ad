//! Chat-completions client for vision models, with offline replay.

use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::PromptBundle;
use crate::error::{Error, Result};
use crate::pool::map_ordered;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClientConfig {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub max_tokens: u32,
    pub temperature: f64,
    /// Maximum requests in flight.
    pub concurrency: usize,
    /// Total attempts per request, first try included.
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
    pub timeout_secs: u64,
    pub system_message: Option<String>,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4o".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            max_tokens: 1024,
            temperature: 0.2,
            concurrency: 4,
            max_attempts: 5,
            initial_backoff_ms: 1000,
            max_backoff_ms: 30_000,
            timeout_secs: 120,
            system_message: None,
        }
    }
}

impl ClientConfig {
    /// Delay before retry number `attempt` (1-based): doubling from the
    /// initial backoff, capped.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let factor = 1u64.checked_shl(attempt.saturating_sub(1)).unwrap_or(u64::MAX);
        Duration::from_millis(
            self.initial_backoff_ms
                .saturating_mul(factor)
                .min(self.max_backoff_ms),
        )
    }

    /// The JSON body sent to the endpoint.
    pub fn request_body(&self, bundle: &PromptBundle) -> Value {
        let user = |text: &str, url: String| {
            json!({
                "role": "user",
                "content": [
                    {"type": "text", "text": text},
                    {"type": "image_url", "image_url": {"url": url}},
                ],
            })
        };
        let mut messages = vec![json!({"role": "system", "content": bundle.system_message})];
        for ex in &bundle.exemplars {
            messages.push(user(&ex.user_text, ex.image.data_url()));
            messages.push(json!({"role": "assistant", "content": ex.response}));
        }
        messages.push(user(&bundle.user_text, bundle.image.data_url()));
        json!({
            "model": self.model,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "messages": messages,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportFault {
    Timeout,
    Network(String),
}

impl std::fmt::Display for TransportFault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TransportFault::Timeout => f.write_str("timed out"),
            TransportFault::Network(m) => write!(f, "network: {m}"),
        }
    }
}

/// One HTTP POST of a JSON body.
pub trait Transport: Send + Sync {
    fn post_json(&self, body: &Value) -> std::result::Result<HttpReply, TransportFault>;
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn post_json(&self, body: &Value) -> std::result::Result<HttpReply, TransportFault> {
        (**self).post_json(body)
    }
}

pub struct HttpTransport {
    agent: ureq::Agent,
    endpoint: String,
    api_key: String,
}

impl HttpTransport {
    /// Reads the API key from the configured environment variable.
    pub fn from_config(config: &ClientConfig) -> Result<Self> {
        let api_key = std::env::var(&config.api_key_env).map_err(|_| {
            Error::Config(format!(
                "environment variable {} is not set",
                config.api_key_env
            ))
        })?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(HttpTransport {
            agent,
            endpoint: config.endpoint.clone(),
            api_key,
        })
    }
}

impl Transport for HttpTransport {
    fn post_json(&self, body: &Value) -> std::result::Result<HttpReply, TransportFault> {
        let result = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(body);
        match result {
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                let body = resp
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| TransportFault::Network(e.to_string()))?;
                Ok(HttpReply { status, body })
            }
            Err(ureq::Error::Timeout(_)) => Err(TransportFault::Timeout),
            Err(e) => Err(TransportFault::Network(e.to_string())),
        }
    }
}

pub enum Backend {
    Live(Box<dyn Transport>),
    /// Directory of `<bundle hash>.txt` response files.
    Replay(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub attempts: u32,
}

pub struct VlmClient {
    config: ClientConfig,
    backend: Backend,
}

fn is_transient(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

/// Pulls `choices[0].message.content` out of a chat-completions response.
/// Content may be a string or a list of text parts.
pub fn parse_envelope(body: &str) -> Result<String> {
    let v: Value = serde_json::from_str(body)
        .map_err(|e| Error::Protocol(format!("response is not JSON: {e}")))?;
    let content = v
        .pointer("/choices/0/message/content")
        .ok_or_else(|| Error::Protocol("response has no choices[0].message.content".into()))?;
    match content {
        Value::String(s) => Ok(s.clone()),
        Value::Array(parts) => {
            let texts: Vec<&str> = parts
                .iter()
                .filter_map(|p| p.get("text").and_then(Value::as_str))
                .collect();
            if texts.is_empty() {
                return Err(Error::Protocol("content parts carry no text".into()));
            }
            Ok(texts.concat())
        }
        other => Err(Error::Protocol(format!("unexpected content {other}"))),
    }
}

impl VlmClient {
    pub fn new(config: ClientConfig, backend: Backend) -> Self {
        VlmClient { config, backend }
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    pub fn submit(&self, bundle: &PromptBundle) -> Result<Completion> {
        match &self.backend {
            Backend::Replay(dir) => {
                let hash = bundle.hash();
                let path = dir.join(format!("{hash}.txt"));
                match std::fs::read_to_string(&path) {
                    Ok(text) => Ok(Completion { text, attempts: 1 }),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                        Err(Error::ReplayMiss { hash })
                    }
                    Err(e) => Err(Error::io(path, e)),
                }
            }
            Backend::Live(transport) => self.submit_live(transport.as_ref(), bundle),
        }
    }

    fn submit_live(&self, transport: &dyn Transport, bundle: &PromptBundle) -> Result<Completion> {
        let body = self.config.request_body(bundle);
        let max_attempts = self.config.max_attempts.max(1);
        let mut last = String::new();
        for attempt in 1..=max_attempts {
            match transport.post_json(&body) {
                Ok(reply) if (200..300).contains(&reply.status) => {
                    let text = parse_envelope(&reply.body)?;
                    return Ok(Completion {
                        text,
                        attempts: attempt,
                    });
                }
                Ok(reply) if is_transient(reply.status) => {
                    last = format!("HTTP {}", reply.status);
                }
                Ok(reply) => {
                    return Err(Error::Transport {
                        attempts: attempt,
                        message: format!("HTTP {}: {}", reply.status, reply.body),
                    });
                }
                Err(fault) => last = fault.to_string(),
            }
            log::warn!("request {} attempt {attempt}/{max_attempts} failed: {last}", &bundle.hash()[..12]);
            if attempt < max_attempts {
                std::thread::sleep(self.config.backoff(attempt));
            }
        }
        Err(Error::Transport {
            attempts: max_attempts,
            message: last,
        })
    }

    /// Submits all bundles with at most `concurrency` in flight; results
    /// follow input order.
    pub fn submit_all(&self, bundles: &[PromptBundle]) -> Vec<Result<Completion>> {
        map_ordered(bundles, self.config.concurrency, |b| self.submit(b))
    }
}

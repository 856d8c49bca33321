use serde_json::{json, Value};

use super::{Backend, ClientError, CompletionRequest, Reply, Usage};

/// Live backend speaking the chat-completions JSON schema over HTTP(S).
/// Each request uses the URL, model, timeout and key variable of the
/// endpoint it carries.
pub struct HttpBackend {
    agent: ureq::Agent,
    api_key: Option<String>,
}

impl Default for HttpBackend {
    fn default() -> Self {
        Self::new()
    }
}

impl HttpBackend {
    /// Keys are read from the endpoint's environment variable at request
    /// time; a missing key surfaces as `AuthError`.
    pub fn new() -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .build()
            .into();
        HttpBackend { agent, api_key: None }
    }

    /// Uses `api_key` for every request instead of the environment.
    pub fn with_key(api_key: impl Into<String>) -> Self {
        HttpBackend { api_key: Some(api_key.into()), ..Self::new() }
    }

    fn key(&self, endpoint: &super::ModelEndpoint) -> Result<String, ClientError> {
        if let Some(k) = &self.api_key {
            return Ok(k.clone());
        }
        std::env::var(&endpoint.api_key_env)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| {
                ClientError::AuthError(format!("environment variable {} is not set", endpoint.api_key_env))
            })
    }
}

fn url(base: &str) -> String {
    let base = base.trim_end_matches('/');
    if base.ends_with("/chat/completions") {
        base.to_string()
    } else {
        format!("{base}/chat/completions")
    }
}

impl Backend for HttpBackend {
    fn send(&self, request: &CompletionRequest<'_>) -> Result<Reply, ClientError> {
        let endpoint = request.endpoint;
        let key = self.key(endpoint)?;
        let body = json!({
            "model": endpoint.model_name,
            "messages": [
                {"role": "system", "content": request.bundle.system_text},
                {"role": "user", "content": request.bundle.user_text},
            ],
            "temperature": endpoint.temperature,
            "max_tokens": endpoint.max_tokens,
        });
        let mut response = self
            .agent
            .post(url(&endpoint.base_url))
            .config()
            .timeout_global(Some(endpoint.timeout()))
            .build()
            .header("Authorization", &format!("Bearer {key}"))
            .send_json(&body)
            .map_err(transport_error)?;
        let status = response.status().as_u16();
        match status {
            200..=299 => {}
            401 | 403 => return Err(ClientError::AuthError(format!("HTTP {status}"))),
            429 => return Err(ClientError::RateLimited { attempts: 1 }),
            500..=599 => return Err(ClientError::Server(status)),
            _ => return Err(ClientError::Status(status)),
        }
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(transport_error)?;
        parse_reply(&text)
    }
}

fn transport_error(e: ureq::Error) -> ClientError {
    match e {
        ureq::Error::Timeout(_) => ClientError::Timeout,
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => ClientError::Timeout,
        other => ClientError::Transport(other.to_string()),
    }
}

pub(crate) fn parse_reply(body: &str) -> Result<Reply, ClientError> {
    let bad = |m: &str| ClientError::MalformedEndpointReply(m.to_string());
    let v: Value = serde_json::from_str(body).map_err(|e| bad(&e.to_string()))?;
    let text = v
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing choices[0].message.content"))?;
    let usage = v.get("usage").map(|u| Usage {
        prompt_tokens: u.get("prompt_tokens").and_then(Value::as_u64).unwrap_or(0),
        completion_tokens: u.get("completion_tokens").and_then(Value::as_u64).unwrap_or(0),
    });
    Ok(Reply {
        text: text.to_string(),
        usage,
    })
}

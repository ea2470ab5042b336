//! Chat-completion transport.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use url::Url;

use super::config::LlmRequestConfig;
use super::LlmError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
    pub top_p: f64,
    pub frequency_penalty: f64,
    pub presence_penalty: f64,
}

impl ChatRequest {
    pub fn new(config: &LlmRequestConfig, prompt: &str) -> Self {
        Self {
            model: config.model.clone(),
            messages: vec![ChatMessage {
                role: "user".into(),
                content: prompt.into(),
            }],
            temperature: config.temperature,
            max_tokens: config.max_tokens,
            top_p: config.top_p,
            frequency_penalty: config.frequency_penalty,
            presence_penalty: config.presence_penalty,
        }
    }
}

/// Returns the assistant text for a request.
pub trait ChatClient: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError>;
}

/// OpenAI-style `POST {endpoint}` with bearer auth, retried with exponential
/// backoff on transport errors, 429 and 5xx.
#[derive(Debug, Clone)]
pub struct HttpChatClient {
    endpoint: Url,
    api_key: String,
    agent: ureq::Agent,
    max_retries: u32,
    pub backoff_base: Duration,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChatMessage,
}

enum Attempt {
    Retry(String),
    Fatal(String),
}

impl HttpChatClient {
    pub fn new(endpoint: Url, api_key: impl Into<String>, config: &LlmRequestConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            endpoint,
            api_key: api_key.into(),
            agent,
            max_retries: config.max_retries,
            backoff_base: Duration::from_millis(500),
        }
    }

    /// Endpoint from the config, key from `SIGNPIPE_LLM_API_KEY`.
    pub fn from_config(config: &LlmRequestConfig) -> Result<Self, LlmError> {
        let endpoint = config.endpoint.clone().ok_or(LlmError::MissingEndpoint)?;
        let key = std::env::var(super::config::ENV_API_KEY)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or(LlmError::MissingCredential)?;
        Ok(Self::new(endpoint, key, config))
    }

    fn attempt(&self, request: &ChatRequest) -> Result<String, Attempt> {
        let resp = self
            .agent
            .post(self.endpoint.as_str())
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(request);
        let mut resp = match resp {
            Ok(r) => r,
            Err(e) => return Err(Attempt::Retry(e.to_string())),
        };
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Attempt::Retry(e.to_string()))?;
        if status == 429 || status >= 500 {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if status >= 400 {
            return Err(Attempt::Fatal(format!("HTTP {status}: {body}")));
        }
        let parsed: ChatResponse =
            serde_json::from_str(&body).map_err(|e| Attempt::Fatal(format!("unexpected response body: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| Attempt::Fatal("response has no choices".into()))
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let mut delay = self.backoff_base;
        let mut last = String::new();
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                std::thread::sleep(delay);
                delay *= 2;
            }
            match self.attempt(request) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(msg)) => {
                    return Err(LlmError::NetworkFailure {
                        attempts: attempt + 1,
                        message: msg,
                    })
                }
                Err(Attempt::Retry(msg)) => {
                    tracing::warn!(attempt, error = %msg, "chat request failed");
                    last = msg;
                }
            }
        }
        Err(LlmError::NetworkFailure {
            attempts: self.max_retries + 1,
            message: last,
        })
    }
}

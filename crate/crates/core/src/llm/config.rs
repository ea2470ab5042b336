use std::time::Duration;

use serde::{Deserialize, Serialize};
use url::Url;

use super::LlmError;

pub const ENV_ENDPOINT: &str = "SIGNPIPE_LLM_ENDPOINT";
pub const ENV_API_KEY: &str = "SIGNPIPE_LLM_API_KEY";
pub const ENV_MODEL: &str = "SIGNPIPE_LLM_MODEL";

/// Sampling and transport settings for chat completions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmRequestConfig {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub top_p: f64,
    pub frequency_penalty: f64,
    pub presence_penalty: f64,
    pub endpoint: Option<Url>,
    #[serde(with = "secs")]
    pub timeout: Duration,
    pub max_retries: u32,
    /// Concurrent requests allowed across tasks.
    pub max_in_flight: usize,
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

impl Default for LlmRequestConfig {
    fn default() -> Self {
        Self {
            model: "gpt-3.5-turbo".into(),
            temperature: 1.0,
            max_tokens: 1000,
            top_p: 1.0,
            frequency_penalty: 0.0,
            presence_penalty: 0.0,
            endpoint: None,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            max_in_flight: 4,
        }
    }
}

impl LlmRequestConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        let bad = |message: &str| Err(LlmError::InvalidConfig(message.into()));
        if !(self.temperature >= 0.0) {
            return bad("temperature must be >= 0");
        }
        if self.max_tokens < 1 {
            return bad("max_tokens must be >= 1");
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return bad("top_p must be in (0, 1]");
        }
        if self.model.trim().is_empty() {
            return bad("model must be set");
        }
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be >= 1");
        }
        Ok(())
    }

    /// Overrides endpoint and model from the environment when set.
    pub fn with_env(mut self) -> Result<Self, LlmError> {
        if let Ok(ep) = std::env::var(ENV_ENDPOINT) {
            self.endpoint = Some(
                Url::parse(&ep).map_err(|e| LlmError::InvalidConfig(format!("{ENV_ENDPOINT}: {e}")))?,
            );
        }
        if let Ok(model) = std::env::var(ENV_MODEL) {
            self.model = model;
        }
        Ok(self)
    }
}

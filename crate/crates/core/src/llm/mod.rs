//! LLM text-to-gloss translation with a persistent response cache.
//!
//! All steps of a task go out in one prompt. A cache hit never touches the
//! network; in offline mode a miss is an error.

mod cache;
mod client;
mod config;
mod parse;
mod prompt;
mod replay;

use std::sync::{Arc, Condvar, Mutex};

use chrono::Utc;
use thiserror::Error;

pub use cache::{cache_key, TranslationCache, TranslationCacheEntry};
pub use client::{ChatClient, ChatMessage, ChatRequest, HttpChatClient};
pub use config::{LlmRequestConfig, ENV_API_KEY, ENV_ENDPOINT, ENV_MODEL};
pub use parse::{parse_llm_response, ParseError};
pub use prompt::{build_prompt, PROMPT_VERSION};
pub use replay::ReplayClient;

use crate::gloss::{GlossSequence, Provenance};
use crate::task::TaskSpec;
use crate::translate::{GlossTranslator, StepResult, TranslateError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LlmError {
    #[error("network failure after {attempts} attempt(s): {message}")]
    NetworkFailure { attempts: u32, message: String },
    #[error("task {task_id}: malformed response {detail}")]
    MalformedResponse { task_id: String, detail: ParseError },
    #[error("no API credential: set {}", config::ENV_API_KEY)]
    MissingCredential,
    #[error("no endpoint configured: set {} or llm.endpoint", config::ENV_ENDPOINT)]
    MissingEndpoint,
    #[error("task {task_id}: not in the cache and running offline")]
    OfflineCacheMiss { task_id: String },
    #[error("invalid LLM configuration: {0}")]
    InvalidConfig(String),
    #[error("cache: {0}")]
    Cache(String),
}

/// Counting semaphore for in-flight requests.
#[derive(Debug)]
struct Slots {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Slots {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n),
            cv: Condvar::new(),
        }
    }

    fn run<T>(&self, f: impl FnOnce() -> T) -> T {
        {
            let mut free = self.free.lock().expect("slots lock");
            while *free == 0 {
                free = self.cv.wait(free).expect("slots lock");
            }
            *free -= 1;
        }
        let out = f();
        *self.free.lock().expect("slots lock") += 1;
        self.cv.notify_one();
        out
    }
}

pub struct LlmTranslator {
    pub config: LlmRequestConfig,
    cache: Arc<TranslationCache>,
    client: Option<Arc<dyn ChatClient>>,
    offline: bool,
    slots: Slots,
}

impl LlmTranslator {
    /// `client` may be `None` when only cached translations are wanted; a miss
    /// then reports the missing credential or endpoint.
    pub fn new(
        config: LlmRequestConfig,
        cache: Arc<TranslationCache>,
        client: Option<Arc<dyn ChatClient>>,
    ) -> Result<Self, LlmError> {
        config.validate()?;
        let slots = Slots::new(config.max_in_flight);
        Ok(Self {
            config,
            cache,
            client,
            offline: false,
            slots,
        })
    }

    pub fn offline(mut self, offline: bool) -> Self {
        self.offline = offline;
        self
    }

    pub fn cache(&self) -> &TranslationCache {
        &self.cache
    }

    /// Raw per-step gloss strings for `task`, from cache or endpoint.
    pub fn fetch(&self, task: &TaskSpec) -> Result<Vec<String>, LlmError> {
        let prompt = build_prompt(task);
        let key = cache_key(&self.config, &prompt);
        if let Some(hit) = self.cache.get(&key) {
            tracing::debug!(task = %task.task_id, %key, "cache hit");
            return Ok(hit.parsed);
        }
        if self.offline {
            return Err(LlmError::OfflineCacheMiss {
                task_id: task.task_id.clone(),
            });
        }
        let client = match &self.client {
            Some(c) => c,
            None if self.config.endpoint.is_none() => return Err(LlmError::MissingEndpoint),
            None => return Err(LlmError::MissingCredential),
        };
        let request = ChatRequest::new(&self.config, &prompt);
        let raw = self.slots.run(|| client.complete(&request))?;
        match parse_llm_response(&raw, task.steps.len()) {
            Ok(parsed) => {
                self.cache.insert(TranslationCacheEntry {
                    key,
                    task_id: task.task_id.clone(),
                    model: self.config.model.clone(),
                    response_text: raw,
                    parsed: parsed.clone(),
                    created_at: Utc::now(),
                })?;
                Ok(parsed)
            }
            Err(detail) => {
                let path = self.cache.quarantine(&key, &task.task_id, &raw, &detail.to_string())?;
                tracing::warn!(task = %task.task_id, path = %path.display(), "quarantined malformed response");
                Err(LlmError::MalformedResponse {
                    task_id: task.task_id.clone(),
                    detail,
                })
            }
        }
    }
}

/// Gloss sequences for every step of `task`, provenance `Llm`.
pub fn llm_translate(task: &TaskSpec, translator: &LlmTranslator) -> Result<Vec<StepResult>, TranslateError> {
    let raw = translator.fetch(task)?;
    Ok(raw
        .iter()
        .zip(&task.steps)
        .map(|(s, step)| GlossSequence::from_raw(step.index, s, Provenance::Llm).map_err(Into::into))
        .collect())
}

impl GlossTranslator for LlmTranslator {
    fn name(&self) -> &'static str {
        "llm"
    }

    fn translate_task(&self, task: &TaskSpec) -> Result<Vec<StepResult>, TranslateError> {
        llm_translate(task, self)
    }
}

//! A [`ChatClient`] that answers from recorded responses instead of the
//! network. Used to prime caches from fixtures and in tests.

use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use super::client::{ChatClient, ChatRequest};
use super::prompt::build_prompt;
use super::LlmError;
use crate::task::TaskSpec;

#[derive(Debug, Default)]
pub struct ReplayClient {
    by_prompt: HashMap<String, String>,
    calls: AtomicUsize,
}

impl ReplayClient {
    pub fn new(by_prompt: HashMap<String, String>) -> Self {
        Self {
            by_prompt,
            calls: AtomicUsize::new(0),
        }
    }

    /// Pairs each task's prompt with `dir/<task_id>.json`, taken verbatim as
    /// the response text. Tasks without a file are left out.
    pub fn from_dir(tasks: &[TaskSpec], dir: &Path) -> Result<Self, LlmError> {
        let mut by_prompt = HashMap::new();
        for t in tasks {
            let path = dir.join(format!("{}.json", t.task_id));
            match std::fs::read_to_string(&path) {
                Ok(text) => {
                    by_prompt.insert(build_prompt(t), text);
                }
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(LlmError::Cache(format!("{}: {e}", path.display()))),
            }
        }
        Ok(Self::new(by_prompt))
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn len(&self) -> usize {
        self.by_prompt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_prompt.is_empty()
    }
}

impl ChatClient for ReplayClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let prompt = request.messages.last().map(|m| m.content.as_str()).unwrap_or_default();
        self.by_prompt.get(prompt).cloned().ok_or_else(|| LlmError::NetworkFailure {
            attempts: 1,
            message: "no recorded response for this prompt".into(),
        })
    }
}

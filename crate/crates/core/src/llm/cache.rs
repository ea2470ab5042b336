//! Append-only translation cache: one `<key>.json` file per entry, plus a
//! `quarantine/` directory for responses that failed to parse.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::LlmRequestConfig;
use super::LlmError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationCacheEntry {
    pub key: String,
    pub task_id: String,
    pub model: String,
    pub response_text: String,
    pub parsed: Vec<String>,
    pub created_at: DateTime<Utc>,
}

/// Hex sha256 over the model, prompt and sampling parameters. Transport
/// settings (endpoint, timeout, retries) do not affect the key.
pub fn cache_key(config: &LlmRequestConfig, prompt: &str) -> String {
    let canonical = json!({
        "model": config.model,
        "prompt": prompt,
        "temperature": config.temperature,
        "max_tokens": config.max_tokens,
        "top_p": config.top_p,
        "frequency_penalty": config.frequency_penalty,
        "presence_penalty": config.presence_penalty,
    });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

/// Entries present at open time are read without locking; entries written
/// during this process go through a lock. Writes are serialized.
#[derive(Debug)]
pub struct TranslationCache {
    dir: PathBuf,
    snapshot: HashMap<String, TranslationCacheEntry>,
    fresh: RwLock<HashMap<String, TranslationCacheEntry>>,
    writer: Mutex<()>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> LlmError {
    LlmError::Cache(format!("{}: {e}", path.display()))
}

fn write_atomic(dir: &Path, name: &str, body: &str) -> Result<(), LlmError> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(body.as_bytes()).map_err(|e| io_err(dir, e))?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| io_err(&target, e))?;
    Ok(())
}

impl TranslationCache {
    /// Opens (creating if needed) a cache directory and loads every entry.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, LlmError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let mut snapshot = HashMap::new();
        for item in std::fs::read_dir(&dir).map_err(|e| io_err(&dir, e))? {
            let path = item.map_err(|e| io_err(&dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") || !path.is_file() {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
            let entry: TranslationCacheEntry = serde_json::from_str(&text).map_err(|e| io_err(&path, e))?;
            if path.file_stem().and_then(|s| s.to_str()) != Some(entry.key.as_str()) {
                return Err(io_err(&path, "file name does not match entry key"));
            }
            snapshot.insert(entry.key.clone(), entry);
        }
        Ok(Self {
            dir,
            snapshot,
            fresh: RwLock::new(HashMap::new()),
            writer: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn get(&self, key: &str) -> Option<TranslationCacheEntry> {
        self.snapshot
            .get(key)
            .cloned()
            .or_else(|| self.fresh.read().expect("cache lock").get(key).cloned())
    }

    pub fn len(&self) -> usize {
        self.snapshot.len() + self.fresh.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stores a new entry. An existing entry under the same key is kept as is.
    pub fn insert(&self, entry: TranslationCacheEntry) -> Result<(), LlmError> {
        let _guard = self.writer.lock().expect("cache writer lock");
        if self.get(&entry.key).is_some() {
            return Ok(());
        }
        let body = serde_json::to_string_pretty(&entry).expect("cache entry serializes") + "\n";
        write_atomic(&self.dir, &format!("{}.json", entry.key), &body)?;
        self.fresh
            .write()
            .expect("cache lock")
            .insert(entry.key.clone(), entry);
        Ok(())
    }

    /// Keeps a rejected raw response for inspection. Never served.
    pub fn quarantine(&self, key: &str, task_id: &str, raw: &str, reason: &str) -> Result<PathBuf, LlmError> {
        let _guard = self.writer.lock().expect("cache writer lock");
        let qdir = self.dir.join("quarantine");
        std::fs::create_dir_all(&qdir).map_err(|e| io_err(&qdir, e))?;
        let name = format!("{key}-{}.json", uuid::Uuid::new_v4());
        let body = serde_json::to_string_pretty(&json!({
            "key": key,
            "task_id": task_id,
            "reason": reason,
            "response_text": raw,
            "created_at": Utc::now(),
        }))
        .expect("quarantine record serializes");
        write_atomic(&qdir, &name, &body)?;
        Ok(qdir.join(name))
    }
}

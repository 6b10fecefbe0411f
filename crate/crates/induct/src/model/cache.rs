//! Persistent completion cache.
//!
//! Append-only JSONL: one `{key, request, text, timestamp}` entry per line
//! with an in-memory index, so a cache file survives process restarts and
//! rebuilding a run against it issues zero backend calls.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::CompletionRequest;

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    request: CompletionRequest,
    text: String,
    timestamp: u64,
}

/// Digest identifying a (backend, request) pair. Equal requests map to
/// equal keys; any field change produces a different key.
pub fn cache_key(backend_id: &str, req: &CompletionRequest) -> String {
    let canonical = serde_json::json!([
        backend_id,
        req.model_name,
        req.prompt,
        req.max_tokens,
        req.temperature,
        req.stop,
    ]);
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

pub struct Cache {
    path: PathBuf,
    index: Mutex<HashMap<String, String>>,
}

impl Cache {
    /// Open (or create) a cache file, loading any existing entries.
    pub fn open(path: &Path) -> Result<Cache> {
        let mut index = HashMap::new();
        match std::fs::read_to_string(path) {
            Ok(text) => {
                for (idx, line) in text.lines().enumerate() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let entry: CacheEntry = serde_json::from_str(line)
                        .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
                    index.insert(entry.key, entry.text);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(Error::io(path, e)),
        }
        Ok(Cache {
            path: path.to_path_buf(),
            index: Mutex::new(index),
        })
    }

    pub fn len(&self) -> usize {
        self.index.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.index.lock().unwrap().get(key).cloned()
    }

    /// Store a completion. The lock covers both the index insert and the
    /// file append, so concurrent writers cannot interleave half-lines.
    pub fn put(&self, key: &str, req: &CompletionRequest, text: &str) -> Result<()> {
        let mut index = self.index.lock().unwrap();
        if index.contains_key(key) {
            return Ok(());
        }
        let entry = CacheEntry {
            key: key.to_string(),
            request: req.clone(),
            text: text.to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .unwrap_or_default()
                .as_secs(),
        };
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| Error::io(&self.path, e))?;
        writeln!(file, "{}", serde_json::to_string(&entry).unwrap())
            .map_err(|e| Error::io(&self.path, e))?;
        index.insert(key.to_string(), text.to_string());
        Ok(())
    }
}

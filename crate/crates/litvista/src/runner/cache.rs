//! Content-addressed response cache.
//!
//! Keys digest the model name and the full prompt text, so any change to
//! either produces a fresh entry. Writes go through a temp file and an
//! atomic rename; concurrent writers of the same key are idempotent
//! because both write identical bytes.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

/// Digest of `(model name, prompt)`; identical key means identical reply.
pub fn cache_key(model: &str, prompt: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(model.as_bytes());
    hasher.update([0u8]);
    hasher.update(prompt.as_bytes());
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn open(dir: &Path) -> std::io::Result<ResponseCache> {
        fs::create_dir_all(dir)?;
        Ok(ResponseCache {
            dir: dir.to_owned(),
        })
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.txt"))
    }

    pub fn load(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.entry_path(key)).ok()
    }

    pub fn store(&self, key: &str, response: &str) -> std::io::Result<()> {
        let nonce = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0);
        let tmp = self
            .dir
            .join(format!(".{key}.{}.{nonce}.tmp", std::process::id()));
        fs::write(&tmp, response)?;
        fs::rename(&tmp, self.entry_path(key))
    }
}

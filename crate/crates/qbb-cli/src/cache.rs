//! Content-addressed store for command outputs.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = concat!("qbb-cache-", env!("CARGO_PKG_VERSION"), "-1");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub version: String,
    pub key: String,
    pub payload: serde_json::Value,
}

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    /// Hex SHA-256 of the canonical JSON of `parts`.
    pub fn key(parts: &serde_json::Value) -> String {
        let mut h = Sha256::new();
        h.update(VERSION.as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(parts).expect("json"));
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(&key[..2]).join(format!("{key}.json")))
    }

    pub fn get(&self, key: &str) -> Option<serde_json::Value> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        let e: CacheEntry = serde_json::from_str(&text).ok()?;
        (e.version == VERSION && e.key == key).then_some(e.payload)
    }

    /// Writes to a temporary file in the same directory, then renames.
    /// Failures are ignored: the cache is an optimization only.
    pub fn put(&self, key: &str, payload: &serde_json::Value) {
        let Some(path) = self.path(key) else { return };
        let Some(parent) = path.parent() else { return };
        if fs::create_dir_all(parent).is_err() {
            return;
        }
        let entry = CacheEntry { version: VERSION.into(), key: key.into(), payload: payload.clone() };
        let tmp = parent.join(format!(".{key}.{}.tmp", std::process::id()));
        let ok = fs::File::create(&tmp)
            .and_then(|mut f| {
                f.write_all(serde_json::to_string(&entry).expect("json").as_bytes())?;
                f.sync_all()
            })
            .is_ok();
        if !ok || fs::rename(&tmp, &path).is_err() {
            let _ = fs::remove_file(&tmp);
        }
    }
}

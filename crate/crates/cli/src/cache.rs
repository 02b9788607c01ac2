//! Content-addressed file cache for generated relation sets.
//!
//! Each entry is `{key, digest, payload}` where `digest` is the SHA-256 of the
//! serialized payload. Entries are written through a temporary file and
//! renamed into place, so readers never see partial writes. Unreadable or
//! mismatching entries are reported and recomputed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "MZF_CACHE_DIR";

pub struct Cache {
    dir: Option<PathBuf>,
}

fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

impl Cache {
    /// `MZF_CACHE_DIR` if set, else `flag`; caching is off when neither is
    /// given or the directory cannot be created.
    pub fn open(flag: Option<PathBuf>) -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or(flag);
        let dir = dir.and_then(|d| match fs::create_dir_all(&d) {
            Ok(()) => Some(d),
            Err(e) => {
                eprintln!("warning: cache directory {} unusable ({e}); caching disabled", d.display());
                None
            }
        });
        Cache { dir }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        Some(dir.join(format!("relations-{}.json", sha256_hex(key.as_bytes()))))
    }

    /// Returns the cached payload for `key`, or `None` on a miss. Corrupt
    /// entries are reported on stderr and treated as misses.
    pub fn get(&self, key: &str) -> Option<Value> {
        let path = self.path(key)?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                warn_corrupt(&path, &e.to_string());
                return None;
            }
        };
        match check_entry(&text, key) {
            Ok(v) => Some(v),
            Err(why) => {
                warn_corrupt(&path, &why);
                None
            }
        }
    }

    pub fn put(&self, key: &str, payload: &Value) {
        let Some(path) = self.path(key) else { return };
        let body = serde_json::to_string(payload).expect("JSON values serialize");
        let entry = json!({
            "key": key,
            "digest": sha256_hex(body.as_bytes()),
            "payload": payload,
        });
        if let Err(e) = write_atomic(&path, entry.to_string().as_bytes()) {
            eprintln!("warning: could not write cache entry {}: {e}", path.display());
        }
    }
}

fn warn_corrupt(path: &Path, why: &str) {
    eprintln!("warning: ignoring corrupt cache entry {} ({why}); recomputing", path.display());
}

fn check_entry(text: &str, key: &str) -> Result<Value, String> {
    let mut entry: Value = serde_json::from_str(text).map_err(|e| format!("not JSON: {e}"))?;
    if entry["key"].as_str() != Some(key) {
        return Err("key mismatch".into());
    }
    let digest = entry["digest"].as_str().ok_or("missing digest")?.to_string();
    let payload = entry.get_mut("payload").ok_or("missing payload")?.take();
    let body = serde_json::to_string(&payload).map_err(|e| e.to_string())?;
    if sha256_hex(body.as_bytes()) != digest {
        return Err("digest mismatch".into());
    }
    Ok(payload)
}

/// Writes `data` to a temporary file in the target directory, then renames it.
pub fn write_atomic(path: &Path, data: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(data)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

//! On-disk JSON cache for completed rule sets and dimension distributions.
//!
//! Each entry is one file `<kind>-<key>.json` holding
//! `{format_version, kind, key, content_digest, payload}` where the digest is
//! the SHA-256 of the serialized payload. Writes go to a temporary file that is
//! renamed into place. Entries that fail to parse or whose digest does not
//! match are reported with a warning and treated as missing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const FORMAT_VERSION: u32 = 1;
pub const ENV_VAR: &str = "UQRS_CACHE";
pub const DEFAULT_DIR: &str = ".uqrs-cache";

#[derive(Serialize, Deserialize)]
struct Envelope {
    format_version: u32,
    kind: String,
    key: String,
    content_digest: String,
    payload: serde_json::Value,
}

/// A cache directory.
#[derive(Clone, Debug)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Store { dir: dir.into() }
    }

    /// `$UQRS_CACHE` if set, otherwise `.uqrs-cache` in the working directory.
    pub fn from_env() -> Self {
        match std::env::var_os(ENV_VAR) {
            Some(d) if !d.is_empty() => Store::new(d),
            _ => Store::new(DEFAULT_DIR),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, kind: &str, key: &str) -> PathBuf {
        self.dir.join(format!("{kind}-{key}.json"))
    }

    pub fn load<T: DeserializeOwned>(&self, kind: &str, key: &str) -> Option<T> {
        let path = self.path_for(kind, key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(_) => return None,
        };
        match decode(&text, kind, key) {
            Ok(v) => Some(v),
            Err(msg) => {
                log::warn!("ignoring cache entry {}: {msg}", path.display());
                None
            }
        }
    }

    pub fn save<T: Serialize>(&self, kind: &str, key: &str, payload: &T) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let payload = serde_json::to_value(payload)?;
        let env = Envelope {
            format_version: FORMAT_VERSION,
            kind: kind.to_string(),
            key: key.to_string(),
            content_digest: digest(&payload)?,
            payload,
        };
        let path = self.path_for(kind, key);
        let tmp = self
            .dir
            .join(format!(".{kind}-{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(serde_json::to_string_pretty(&env)?.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

fn digest(payload: &serde_json::Value) -> Result<String> {
    let bytes = serde_json::to_vec(payload)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn decode<T: DeserializeOwned>(text: &str, kind: &str, key: &str) -> std::result::Result<T, String> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if env.format_version != FORMAT_VERSION {
        return Err(format!("format version {}", env.format_version));
    }
    if env.kind != kind || env.key != key {
        return Err("kind/key mismatch".into());
    }
    let d = digest(&env.payload).map_err(|e| e.to_string())?;
    if d != env.content_digest {
        return Err("content digest mismatch".into());
    }
    serde_json::from_value(env.payload).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::new(dir.path());
        store.save("dist", "k1", &vec![(1u64, 2u64), (3, 4)]).unwrap();
        let back: Vec<(u64, u64)> = store.load("dist", "k1").unwrap();
        assert_eq!(back, vec![(1, 2), (3, 4)]);
        assert!(store.load::<Vec<(u64, u64)>>("dist", "k2").is_none());
    }

    #[test]
    fn corrupt_entry_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::new(dir.path());
        store.save("dist", "k", &vec![1u64, 2, 3]).unwrap();
        let path = store.path_for("dist", "k");
        let text = fs::read_to_string(&path).unwrap().replace('2', "5");
        fs::write(&path, text).unwrap();
        assert!(store.load::<Vec<u64>>("dist", "k").is_none());
        fs::write(&path, "not json").unwrap();
        assert!(store.load::<Vec<u64>>("dist", "k").is_none());
    }
}

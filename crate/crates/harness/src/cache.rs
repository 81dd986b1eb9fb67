//! Content-addressed on-disk cache. Each record is one file named by the
//! SHA-256 of its key (which includes the toolkit version), holding the
//! payload and its checksum. Writes go to a temp file that is renamed into
//! place, so readers see either the old or the new complete record.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache I/O at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt cache record {path}: {reason}")]
    CacheCorrupt { path: PathBuf, reason: String },
    #[error("cache payload encoding: {0}")]
    Encoding(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub kind: String,
    pub modulus: u64,
    pub index: Option<u64>,
    /// Canonical text of the evaluation point (an `s` value or grid digest).
    pub point: String,
    pub version: String,
}

impl CacheKey {
    pub fn new(kind: &str, modulus: u64, index: Option<u64>, point: impl Into<String>) -> Self {
        CacheKey {
            kind: kind.into(),
            modulus,
            index,
            point: point.into(),
            version: crate::VERSION.into(),
        }
    }

    pub fn with_version(mut self, version: &str) -> Self {
        self.version = version.into();
        self
    }

    fn canonical(&self) -> String {
        serde_json::to_string(self).expect("keys serialize")
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[derive(Serialize, Deserialize)]
struct Record {
    key: CacheKey,
    checksum: String,
    payload: String,
}

fn checksum(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

#[derive(Debug, Default)]
pub struct CacheStats {
    pub hits: AtomicU64,
    pub misses: AtomicU64,
    pub recomputed: AtomicU64,
}

#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    pub stats: CacheStats,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CacheError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|source| CacheError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Cache {
            dir,
            stats: CacheStats::default(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_of(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    /// Raw payload, `None` when absent.
    pub fn get(&self, key: &CacheKey) -> Result<Option<String>, CacheError> {
        let path = self.path_of(key);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        let corrupt = |reason: String| CacheError::CacheCorrupt {
            path: path.clone(),
            reason,
        };
        let rec: Record = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
        if rec.key != *key {
            return Err(corrupt("key mismatch".into()));
        }
        if checksum(&rec.payload) != rec.checksum {
            return Err(corrupt("checksum mismatch".into()));
        }
        Ok(Some(rec.payload))
    }

    /// Atomically replaces the record for `key`.
    pub fn put(&self, key: &CacheKey, payload: &str) -> Result<(), CacheError> {
        let rec = Record {
            key: key.clone(),
            checksum: checksum(payload),
            payload: payload.to_string(),
        };
        let text = serde_json::to_string(&rec).map_err(|e| CacheError::Encoding(e.to_string()))?;
        let io = |source: std::io::Error| CacheError::Io {
            path: self.dir.clone(),
            source,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        tmp.write_all(text.as_bytes()).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(self.path_of(key)).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// Cached value, or `compute` stored for next time. A corrupt record is
    /// recomputed and overwritten; other cache failures fall back to computing.
    pub fn get_or_compute<T, E>(&self, key: &CacheKey, compute: impl FnOnce() -> Result<T, E>) -> Result<T, E>
    where
        T: Serialize + DeserializeOwned,
    {
        match self.get(key) {
            Ok(Some(payload)) => {
                if let Ok(v) = serde_json::from_str(&payload) {
                    self.stats.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(v);
                }
                self.stats.recomputed.fetch_add(1, Ordering::Relaxed);
            }
            Ok(None) => {
                self.stats.misses.fetch_add(1, Ordering::Relaxed);
            }
            Err(CacheError::CacheCorrupt { .. }) => {
                self.stats.recomputed.fetch_add(1, Ordering::Relaxed);
            }
            Err(_) => {
                self.stats.misses.fetch_add(1, Ordering::Relaxed);
            }
        }
        let value = compute()?;
        if let Ok(payload) = serde_json::to_string(&value) {
            // A failed write only costs a recomputation later.
            let _ = self.put(key, &payload);
        }
        Ok(value)
    }
}

//! Append-only JSON-lines log of search results.
//!
//! Records are keyed by `(n, u, group, options hash)`, where the hash
//! covers everything in [`SearchConfig`] that can change an answer or its
//! provenance (backend, budget, encoding options).

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::groups::{GroupKind, GroupSpec};
use crate::search::{max_k, SearchConfig, SearchError, SearchResult};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StoreKey {
    pub n: u32,
    pub u: u32,
    pub group: GroupKind,
    pub options_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreRecord {
    pub key: StoreKey,
    pub config: SearchConfig,
    pub result: SearchResult,
}

/// Hex SHA-256 of the canonical JSON form of `config`, shortened to 16 digits.
pub fn options_hash(config: &SearchConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    hex::encode(&digest[..8])
}

#[derive(Debug)]
pub struct ResultStore {
    path: PathBuf,
    append_lock: Mutex<()>,
}

impl ResultStore {
    /// Uses `path` as the log, creating it on first append.
    pub fn new(path: impl Into<PathBuf>) -> Self {
        ResultStore {
            path: path.into(),
            append_lock: Mutex::new(()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn io(&self, source: std::io::Error) -> StoreError {
        StoreError::Io {
            path: self.path.clone(),
            source,
        }
    }

    /// All records in file order. A missing file is an empty store.
    pub fn records(&self) -> Result<Vec<StoreRecord>, StoreError> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(self.io(e)),
        };
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| self.io(e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                path: self.path.clone(),
                line: i + 1,
                message: e.to_string(),
            })?;
            out.push(rec);
        }
        Ok(out)
    }

    /// The most recent record for `key`.
    pub fn lookup(&self, key: &StoreKey) -> Result<Option<StoreRecord>, StoreError> {
        Ok(self.records()?.into_iter().rev().find(|r| &r.key == key))
    }

    pub fn append(&self, record: &StoreRecord) -> Result<(), StoreError> {
        let line = serde_json::to_string(record).expect("record serializes");
        let _guard = self.append_lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| self.io(e))?;
        writeln!(f, "{line}").map_err(|e| self.io(e))
    }

    /// Runs [`max_k`] unless an identical query is already stored and
    /// `force` is false. Returns the result and whether it was reused.
    pub fn max_k_cached(
        &self,
        n: u32,
        u: u32,
        group: &GroupSpec,
        config: &SearchConfig,
        force: bool,
    ) -> Result<(SearchResult, bool), StoreError> {
        let key = StoreKey {
            n,
            u,
            group: group.kind,
            options_hash: options_hash(config),
        };
        if !force {
            if let Some(rec) = self.lookup(&key)? {
                return Ok((rec.result, true));
            }
        }
        let result = max_k(n, u, group, config)?;
        self.append(&StoreRecord {
            key,
            config: config.clone(),
            result: result.clone(),
        })?;
        Ok((result, false))
    }
}

//! Append-only JSON-lines persistence for [`UserRecord`]s.
//!
//! Each line is one record with the fields `user_id`, `pattern`,
//! `fingerprint`, `fp_params` and `created_at`. A record counts as committed
//! once its line, newline included, has been written and synced. On open, an
//! unterminated final line (a write cut short by a crash) is discarded; any
//! other unreadable line is an error naming its line number.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::auth::{FingerprintParams, GraphicalPattern, UserRecord, VoiceFingerprint};
use crate::bitkit::BitVec;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store I/O: {0}")]
    Io(#[from] io::Error),
    #[error("a user with this pattern already exists")]
    Conflict,
    #[error("{path}: line {line}: {reason}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoreOptions {
    /// Persist raw patterns next to their digests. When false only the
    /// digest (the user id) is written.
    pub keep_raw_pattern: bool,
}

impl Default for StoreOptions {
    fn default() -> Self {
        StoreOptions {
            keep_raw_pattern: true,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Line {
    user_id: String,
    pattern: Option<GraphicalPatternText>,
    fingerprint: BitVec,
    fp_params: FingerprintParams,
    created_at: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct GraphicalPatternText(BitVec);

impl Line {
    fn from_record(r: &UserRecord) -> Self {
        Line {
            user_id: r.user_id.clone(),
            pattern: r
                .pattern
                .as_ref()
                .map(|p| GraphicalPatternText(p.bits().clone())),
            fingerprint: r.fingerprint.bits().clone(),
            fp_params: *r.fingerprint.params(),
            created_at: r.created_at,
        }
    }

    fn into_record(self) -> Result<UserRecord, String> {
        let pattern = self
            .pattern
            .map(|p| GraphicalPattern::try_from(p.0))
            .transpose()
            .map_err(|e| e.to_string())?;
        if let Some(p) = &pattern {
            if p.digest() != self.user_id {
                return Err("user_id does not match pattern digest".into());
            }
        }
        let fingerprint = VoiceFingerprint::from_parts(self.fingerprint, self.fp_params)
            .map_err(|e| e.to_string())?;
        Ok(UserRecord {
            user_id: self.user_id,
            pattern,
            fingerprint,
            created_at: self.created_at,
        })
    }
}

/// File-backed user records indexed by pattern digest.
///
/// One writer at a time: callers sharing a store across threads wrap it in
/// a mutex.
#[derive(Debug)]
pub struct UserStore {
    path: PathBuf,
    options: StoreOptions,
    records: Vec<UserRecord>,
    index: HashMap<String, usize>,
}

impl UserStore {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        Self::open_with(path, StoreOptions::default())
    }

    pub fn open_with(path: impl AsRef<Path>, options: StoreOptions) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(&path)?;
        let mut text = String::new();
        file.read_to_string(&mut text)?;

        let committed = text.rfind('\n').map_or(0, |i| i + 1);
        if committed < text.len() {
            file.set_len(committed as u64)?;
            file.sync_all()?;
        }

        let mut store = UserStore {
            path,
            options,
            records: Vec::new(),
            index: HashMap::new(),
        };
        for (n, line) in text[..committed].lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |reason: String| StoreError::Corrupt {
                path: store.path.clone(),
                line: n + 1,
                reason,
            };
            let record = serde_json::from_str::<Line>(line)
                .map_err(|e| corrupt(e.to_string()))?
                .into_record()
                .map_err(corrupt)?;
            if store.index.contains_key(&record.user_id) {
                return Err(corrupt("duplicate user_id".into()));
            }
            store
                .index
                .insert(record.user_id.clone(), store.records.len());
            store.records.push(record);
        }
        Ok(store)
    }

    /// Appends `record` and syncs it to disk before returning.
    pub fn insert(&mut self, record: UserRecord) -> Result<(), StoreError> {
        if self.index.contains_key(&record.user_id) {
            return Err(StoreError::Conflict);
        }
        let record = if self.options.keep_raw_pattern {
            record
        } else {
            record.redacted()
        };
        let mut line =
            serde_json::to_string(&Line::from_record(&record)).expect("record serializes");
        line.push('\n');
        let mut file = OpenOptions::new().append(true).open(&self.path)?;
        file.write_all(line.as_bytes())?;
        file.sync_data()?;

        self.index
            .insert(record.user_id.clone(), self.records.len());
        self.records.push(record);
        Ok(())
    }

    pub fn find_by_pattern(&self, pattern: &GraphicalPattern) -> Option<&UserRecord> {
        self.find_by_id(&pattern.digest())
    }

    pub fn find_by_id(&self, user_id: &str) -> Option<&UserRecord> {
        self.index.get(user_id).map(|&i| &self.records[i])
    }

    /// All records in insertion order.
    pub fn list(&self) -> &[UserRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Rewrites the file with one line per live record, via a temporary
    /// file and an atomic rename.
    pub fn compact(&mut self) -> Result<(), StoreError> {
        let tmp = self.path.with_extension("compact.tmp");
        {
            let mut f = File::create(&tmp)?;
            for r in &self.records {
                let mut line =
                    serde_json::to_string(&Line::from_record(r)).expect("record serializes");
                line.push('\n');
                f.write_all(line.as_bytes())?;
            }
            f.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}

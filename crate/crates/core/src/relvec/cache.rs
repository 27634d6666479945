//! Persistent query-count cache.
//!
//! The file is append-only UTF-8, one entry per line:
//! `sha256(provider identity) \t query \t count`. When a key repeats, the
//! last line wins. A final line without its newline (an interrupted write) is
//! dropped when the cache is opened.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cache {path} line {line}: malformed entry")]
    Corrupt { path: PathBuf, line: usize },
    #[error("query cannot be cached (contains tab or newline): {0:?}")]
    BadQuery(String),
}

type Key = (String, String);

pub struct CountCache {
    entries: RwLock<HashMap<Key, u64>>,
    file: Option<(PathBuf, Mutex<BufWriter<File>>)>,
}

fn provider_key(identity: &str) -> String {
    hex::encode(Sha256::digest(identity.as_bytes()))
}

impl CountCache {
    /// A cache that forgets everything when dropped.
    pub fn in_memory() -> Self {
        CountCache {
            entries: RwLock::new(HashMap::new()),
            file: None,
        }
    }

    /// Loads `path` if it exists and appends new entries to it.
    pub fn open(path: &Path) -> Result<Self, CacheError> {
        let io = |source| CacheError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut entries = HashMap::new();
        let mut keep_len = None;
        match std::fs::read_to_string(path) {
            Ok(text) => {
                let complete = text.ends_with('\n');
                let lines: Vec<&str> = text.lines().collect();
                for (i, line) in lines.iter().enumerate() {
                    let torn = !complete && i + 1 == lines.len();
                    match parse_line(line) {
                        Some((key, count)) => {
                            entries.insert(key, count);
                        }
                        None if torn || line.is_empty() => {}
                        None => {
                            return Err(CacheError::Corrupt {
                                path: path.to_path_buf(),
                                line: i + 1,
                            })
                        }
                    }
                }
                if !complete && !text.is_empty() {
                    keep_len = Some(text.rfind('\n').map_or(0, |i| i + 1) as u64);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(io(e)),
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        if let Some(len) = keep_len {
            file.set_len(len).map_err(io)?;
        }
        let writer = BufWriter::new(file);
        Ok(CountCache {
            entries: RwLock::new(entries),
            file: Some((path.to_path_buf(), Mutex::new(writer))),
        })
    }

    pub fn get(&self, provider: &str, query: &str) -> Option<u64> {
        let key = (provider_key(provider), query.to_string());
        self.entries
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key)
            .copied()
    }

    pub fn insert(&self, provider: &str, query: &str, count: u64) -> Result<(), CacheError> {
        if query.contains(['\t', '\n', '\r']) {
            return Err(CacheError::BadQuery(query.to_string()));
        }
        let key = provider_key(provider);
        if let Some((path, writer)) = &self.file {
            let mut writer = writer.lock().unwrap_or_else(|e| e.into_inner());
            writeln!(writer, "{key}\t{query}\t{count}")
                .and_then(|_| writer.flush())
                .map_err(|source| CacheError::Io {
                    path: path.clone(),
                    source,
                })?;
        }
        self.entries
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert((key, query.to_string()), count);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_line(line: &str) -> Option<(Key, u64)> {
    let mut fields = line.split('\t');
    let (key, query, count) = (fields.next()?, fields.next()?, fields.next()?);
    if fields.next().is_some() || key.len() != 64 || !key.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    Some(((key.to_string(), query.to_string()), count.parse().ok()?))
}

//! Local document corpus standing in for a web search engine.
//!
//! Documents are tokenized, indexed with positional postings, and queried
//! with wildcard phrase patterns. A query's count is its document
//! frequency: the number of documents containing at least one match.

mod index;
mod ingest;
mod pattern;
mod storage;
mod tokenizer;

use std::path::PathBuf;

pub use index::{CorpusIndex, Fingerprint, Posting};
pub use ingest::{ingest, DocMode, Document};
pub use pattern::{PatternError, PatternToken, PhrasePattern, PREFIX_MAX_EXTRA, PREFIX_MIN_ALPHA};
pub use tokenizer::{tokenize, TOKENIZER_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    Encoding { path: PathBuf, offset: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("document ids must be dense: expected {expected}, found {found}")]
    NonDenseIds { expected: u32, found: u32 },
    #[error("document {doc} token {position} is not a valid token: {token:?}")]
    BadToken { doc: u32, position: usize, token: String },
    #[error("corpus too large for 32-bit postings")]
    TooLarge,
    #[error("index file: {0}")]
    Format(String),
    #[error("index file tokenizer version {found}, this build uses {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("index i/o: {0}")]
    Io(#[from] std::io::Error),
}

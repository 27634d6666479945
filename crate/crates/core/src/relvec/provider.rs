use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::patterns::parse_pattern;
use crate::textcorpus::{CorpusIndex, TOKENIZER_VERSION};

#[derive(Debug, Clone, thiserror::Error)]
#[error("count for {query:?} failed: {message}")]
pub struct ProviderError {
    pub query: String,
    pub message: String,
}

impl ProviderError {
    pub fn new(query: impl Into<String>, message: impl Into<String>) -> Self {
        ProviderError {
            query: query.into(),
            message: message.into(),
        }
    }
}

/// Something that answers "how many documents match this query text".
///
/// Answers must be deterministic for a fixed corpus snapshot; the identity
/// string keys cached answers, so it must change whenever the snapshot does.
pub trait CountProvider: Send + Sync {
    fn identity(&self) -> String;

    fn count(&self, query: &str) -> Result<u64, ProviderError>;

    /// Pause between consecutive queries.
    fn courtesy_delay(&self) -> Duration {
        Duration::ZERO
    }

    /// Maximum concurrent queries, `None` for unlimited.
    fn max_in_flight(&self) -> Option<usize> {
        None
    }
}

/// Counts against a local [`CorpusIndex`].
pub struct IndexProvider<'a> {
    index: &'a CorpusIndex,
}

impl<'a> IndexProvider<'a> {
    pub fn new(index: &'a CorpusIndex) -> Self {
        IndexProvider { index }
    }
}

impl CountProvider for IndexProvider<'_> {
    fn identity(&self) -> String {
        format!(
            "local-index:{}:tokenizer-v{}",
            self.index.fingerprint(),
            TOKENIZER_VERSION
        )
    }

    fn count(&self, query: &str) -> Result<u64, ProviderError> {
        let pattern = parse_pattern(query).map_err(|e| ProviderError::new(query, e.to_string()))?;
        Ok(self.index.count_documents(&pattern))
    }
}

/// Canned answers, zero for anything not listed. Records how often it was
/// asked.
pub struct FixedCounts {
    identity: String,
    counts: HashMap<String, u64>,
    calls: AtomicUsize,
}

impl FixedCounts {
    pub fn new(identity: impl Into<String>) -> Self {
        FixedCounts {
            identity: identity.into(),
            counts: HashMap::new(),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn with(mut self, query: impl Into<String>, count: u64) -> Self {
        self.counts.insert(query.into(), count);
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl CountProvider for FixedCounts {
    fn identity(&self) -> String {
        self.identity.clone()
    }

    fn count(&self, query: &str) -> Result<u64, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(self.counts.get(query).copied().unwrap_or(0))
    }
}

/// Query pacing for providers backed by a shared remote service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateLimit {
    pub delay: Duration,
    pub max_in_flight: usize,
}

impl RateLimit {
    /// One query at a time, five seconds apart.
    pub const REMOTE: RateLimit = RateLimit {
        delay: Duration::from_secs(5),
        max_in_flight: 1,
    };
}

/// Serializes queries to `inner` and spaces them at least `delay` apart.
pub struct RateLimited<P> {
    inner: P,
    limit: RateLimit,
    last: Mutex<Option<Instant>>,
}

impl<P: CountProvider> RateLimited<P> {
    pub fn new(inner: P, limit: RateLimit) -> Self {
        RateLimited {
            inner,
            limit,
            last: Mutex::new(None),
        }
    }
}

impl<P: CountProvider> CountProvider for RateLimited<P> {
    fn identity(&self) -> String {
        self.inner.identity()
    }

    fn count(&self, query: &str) -> Result<u64, ProviderError> {
        let mut last = self.last.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(previous) = *last {
            let ready = previous + self.limit.delay;
            let now = Instant::now();
            if ready > now {
                std::thread::sleep(ready - now);
            }
        }
        let result = self.inner.count(query);
        *last = Some(Instant::now());
        result
    }

    fn courtesy_delay(&self) -> Duration {
        self.limit.delay
    }

    fn max_in_flight(&self) -> Option<usize> {
        Some(self.limit.max_in_flight)
    }
}

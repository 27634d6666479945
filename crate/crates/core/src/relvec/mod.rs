//! Relation vectors: 128 log-transformed phrase counts per word pair.

mod cache;
mod provider;
mod store;

use std::sync::Arc;

pub use cache::{CacheError, CountCache};
pub use provider::{CountProvider, FixedCounts, IndexProvider, ProviderError, RateLimit, RateLimited};
pub use store::{parse_pair_list, VectorStore, VECTOR_MAGIC};

use crate::pair::WordPair;
use crate::patterns::{generate_queries, JoiningTermTable, PatternsError};

#[derive(Debug, thiserror::Error)]
pub enum VectorError {
    #[error(transparent)]
    Patterns(#[from] PatternsError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("joining-term table mismatch: expected {expected}, found {found}")]
    TableMismatch { expected: String, found: String },
    #[error("vector for {pair} has {found} components, expected {expected}")]
    Dimension {
        pair: WordPair,
        expected: usize,
        found: usize,
    },
    #[error("no vector for pair {0}")]
    Missing(WordPair),
    #[error("vector file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("vector file i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Raw phrase counts for a pair and their `ln(count + 1)` transform.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationVector {
    pair: WordPair,
    raw_counts: Vec<u64>,
    components: Vec<f64>,
    zero: bool,
    terms_hash: Arc<str>,
}

impl RelationVector {
    pub fn from_counts(pair: WordPair, raw_counts: Vec<u64>, terms_hash: Arc<str>) -> Self {
        let components = raw_counts.iter().map(|&c| (c as f64).ln_1p()).collect();
        let zero = raw_counts.iter().all(|&c| c == 0);
        RelationVector {
            pair,
            raw_counts,
            components,
            zero,
            terms_hash,
        }
    }

    pub fn pair(&self) -> &WordPair {
        &self.pair
    }

    pub fn raw_counts(&self) -> &[u64] {
        &self.raw_counts
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// True when every count is zero.
    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Hash of the joining-term table the counts were collected with.
    pub fn terms_hash(&self) -> &str {
        &self.terms_hash
    }
}

/// Cosine of the angle between two component vectors; 0 when either has
/// zero norm.
pub fn cosine_components(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut dot = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return 0.0;
    }
    (dot / (aa.sqrt() * bb.sqrt())).clamp(0.0, 1.0)
}

/// Cosine similarity of two relation vectors, in `[0, 1]`.
pub fn cosine(a: &RelationVector, b: &RelationVector) -> f64 {
    cosine_components(&a.components, &b.components)
}

/// Collects the counts for every query of `pair`, consulting `cache` first
/// and recording fresh provider answers in it.
pub fn build_vector(
    pair: &WordPair,
    table: &JoiningTermTable,
    provider: &dyn CountProvider,
    cache: &CountCache,
) -> Result<RelationVector, VectorError> {
    let queries = generate_queries(pair, table)?;
    let identity = provider.identity();
    let mut counts = Vec::with_capacity(queries.queries().len());
    for query in queries.queries() {
        let count = match cache.get(&identity, query) {
            Some(count) => count,
            None => {
                let count = provider.count(query)?;
                cache.insert(&identity, query, count)?;
                count
            }
        };
        counts.push(count);
    }
    Ok(RelationVector::from_counts(
        pair.clone(),
        counts,
        Arc::from(table.hash_hex()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textcorpus::{CorpusIndex, Document};

    fn hash() -> Arc<str> {
        Arc::from("t")
    }

    #[test]
    fn log_transform() {
        let mut counts = vec![0u64; 128];
        counts[1] = 9;
        let v = RelationVector::from_counts(WordPair::new("a", "b"), counts, hash());
        assert_eq!(v.components()[0], 0.0);
        assert!((v.components()[1] - 10f64.ln()).abs() < 1e-12);
        assert!((v.components()[1] - std::f64::consts::LN_10).abs() < 1e-12);
        assert!(!v.is_zero());
    }

    #[test]
    fn all_zero_counts() {
        let v = RelationVector::from_counts(WordPair::new("a", "b"), vec![0; 128], hash());
        assert!(v.is_zero());
        assert!(v.components().iter().all(|&c| c == 0.0));
        assert_eq!(cosine(&v, &v), 0.0);
    }

    #[test]
    fn cosine_examples() {
        let mut a = vec![0.0; 128];
        let mut b = vec![0.0; 128];
        a[0] = 1.0;
        a[1] = 1.0;
        b[0] = 1.0;
        let c = cosine_components(&a, &b);
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((cosine_components(&a, &a) - 1.0).abs() < 1e-12);
        assert_eq!(cosine_components(&a, &[0.0; 128]), 0.0);
    }

    #[test]
    fn toy_corpus_vector() {
        let raw = [
            "water in the riverbed",
            "traffic in the street",
            "the street with traffic",
            "a riverbed",
        ];
        let docs: Vec<Document> = raw
            .iter()
            .enumerate()
            .map(|(i, s)| Document::new(i as u32, crate::textcorpus::tokenize(s)))
            .collect();
        let index = CorpusIndex::build(&docs).unwrap();
        let provider = IndexProvider::new(&index);
        let cache = CountCache::in_memory();
        let table = JoiningTermTable::standard();
        let v = build_vector(&WordPair::new("water", "riverbed"), &table, &provider, &cache).unwrap();
        let queries = generate_queries(&WordPair::new("water", "riverbed"), &table).unwrap();
        // "in the" is term 24.
        assert_eq!(queries.forward(23), "water* in the riverbed*");
        assert_eq!(v.raw_counts()[46], 1);
        assert!((v.components()[46] - 2f64.ln()).abs() < 1e-12);
        assert_eq!(v.raw_counts().iter().sum::<u64>(), 1);
        assert_eq!(v.terms_hash(), table.hash_hex());
    }

    #[test]
    fn cache_makes_rebuild_free() {
        let provider = FixedCounts::new("stub").with("cat* of dog*", 4);
        let cache = CountCache::in_memory();
        let table = JoiningTermTable::standard();
        let pair = WordPair::new("cat", "dog");
        let first = build_vector(&pair, &table, &provider, &cache).unwrap();
        assert_eq!(provider.calls(), 128);
        let second = build_vector(&pair, &table, &provider, &cache).unwrap();
        assert_eq!(provider.calls(), 128);
        assert_eq!(first, second);
        assert_eq!(first.raw_counts()[74], 4);
    }

    #[test]
    fn provider_failure_names_query() {
        struct Broken;
        impl CountProvider for Broken {
            fn identity(&self) -> String {
                "broken".into()
            }
            fn count(&self, query: &str) -> Result<u64, ProviderError> {
                Err(ProviderError::new(query, "offline"))
            }
        }
        let err = build_vector(
            &WordPair::new("cat", "dog"),
            &JoiningTermTable::standard(),
            &Broken,
            &CountCache::in_memory(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("cat* dog*"), "{err}");
    }
}

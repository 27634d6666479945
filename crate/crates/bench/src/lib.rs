//! Synthetic fixtures for the benchmarks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relsim_core::{Document, RelationVector, WordPair};

const WORDS: &[&str] = &[
    "the",
    "of",
    "in",
    "and",
    "a",
    "to",
    "is",
    "with",
    "for",
    "on",
    "water",
    "waters",
    "watershed",
    "river",
    "riverbed",
    "riverbank",
    "traffic",
    "street",
    "streets",
    "car",
    "cars",
    "garage",
    "limit",
    "limits",
    "limited",
    "restrained",
    "restraint",
    "very",
    "not",
    "'s",
    "stone",
    "mason",
    "masonry",
    "wood",
    "carpenter",
];

/// `docs` documents of 20-80 tokens drawn from a small Zipf-ish vocabulary.
pub fn corpus(docs: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..docs)
        .map(|id| {
            let len = rng.gen_range(20..=80);
            let tokens = (0..len)
                .map(|_| {
                    let r: f64 = rng.gen();
                    WORDS[((r * r) * WORDS.len() as f64) as usize].to_string()
                })
                .collect();
            Document::new(id as u32, tokens)
        })
        .collect()
}

/// `n` sparse random relation vectors.
pub fn vectors(n: usize, seed: u64) -> Vec<RelationVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hash: Arc<str> = Arc::from("bench");
    (0..n)
        .map(|i| {
            let counts = (0..128)
                .map(|_| if rng.gen_bool(0.3) { rng.gen_range(0..10_000) } else { 0 })
                .collect();
            RelationVector::from_counts(WordPair::new(format!("w{i}"), "x"), counts, Arc::clone(&hash))
        })
        .collect()
}

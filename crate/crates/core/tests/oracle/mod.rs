//! Brute-force reference implementations and random generators shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use relsim_core::{Document, PatternToken, PhrasePattern};

/// Small vocabulary with heavy prefix overlap so wildcard tokens hit often.
pub const VOCAB: &[&str] = &[
    "cat",
    "cats",
    "catalog",
    "category",
    "catalogues",
    "dog",
    "dogs",
    "doghouse",
    "the",
    "of",
    "in",
    "a",
    "to",
    "is",
    "'s",
    "water",
    "waters",
    "watering",
    "watershed",
    "river",
    "riverbed",
    "riverbeds",
    "limit",
    "limits",
    "limitless",
    "limitlessness",
    "run",
    "runs",
    "runner",
    "x",
    "42",
    "2003",
];

pub fn random_corpus<R: Rng>(rng: &mut R, max_docs: usize, max_len: usize) -> Vec<Document> {
    let docs = rng.gen_range(1..=max_docs);
    (0..docs)
        .map(|id| {
            let len = rng.gen_range(0..=max_len);
            let tokens = (0..len).map(|_| VOCAB.choose(rng).unwrap().to_string()).collect();
            Document::new(id as u32, tokens)
        })
        .collect()
}

fn random_token<R: Rng>(rng: &mut R, edge: bool) -> PatternToken {
    loop {
        match rng.gen_range(0..10) {
            0..=2 if !edge => return PatternToken::AnyWord,
            3..=5 => {
                let word = VOCAB.choose(rng).unwrap();
                let alpha = word.chars().take_while(|c| c.is_ascii_lowercase()).count();
                if alpha >= 3 {
                    let cut = rng.gen_range(3..=word.len());
                    if let Ok(t) = PatternToken::prefix(&word[..cut]) {
                        return t;
                    }
                }
            }
            _ => return PatternToken::Literal(VOCAB.choose(rng).unwrap().to_string()),
        }
    }
}

pub fn random_pattern<R: Rng>(rng: &mut R) -> PhrasePattern {
    let len = rng.gen_range(1..=5);
    let tokens = (0..len).map(|i| random_token(rng, i == 0 || i + 1 == len)).collect();
    PhrasePattern::new(tokens).expect("generator only builds valid patterns")
}

fn token_matches(token: &PatternToken, word: &str) -> bool {
    match token {
        PatternToken::Literal(text) => word == text,
        PatternToken::AnyWord => true,
        PatternToken::Prefix { stem, max_extra } => {
            word.len() >= stem.len()
                && word.is_char_boundary(stem.len())
                && word[..stem.len()] == stem[..]
                && word[stem.len()..].chars().count() <= *max_extra
        }
    }
}

/// Documents containing at least one contiguous match, by scanning every
/// start position of every document.
pub fn naive_count(docs: &[Document], pattern: &PhrasePattern) -> u64 {
    let tokens = pattern.tokens();
    docs.iter()
        .filter(|d| {
            d.tokens.len() >= tokens.len()
                && (0..=d.tokens.len() - tokens.len())
                    .any(|s| tokens.iter().zip(&d.tokens[s..]).all(|(t, w)| token_matches(t, w)))
        })
        .count() as u64
}

/// Cosine from first principles, with the zero-norm convention.
pub fn naive_cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

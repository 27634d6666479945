//! Stemming, joining terms, query generation and query parsing.

use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::pair::WordPair;
use crate::textcorpus::{tokenize, PatternError, PatternToken, PhrasePattern};

/// Number of joining terms in a table.
pub const JOINING_TERM_COUNT: usize = 64;
/// Queries (and vector components) per word pair.
pub const QUERIES_PER_PAIR: usize = 2 * JOINING_TERM_COUNT;

const DEFAULT_TERMS: &str = include_str!("../data/joining_terms.txt");

#[derive(Debug, thiserror::Error)]
pub enum PatternsError {
    #[error("cannot stem an empty word")]
    EmptyWord,
    #[error("word contains whitespace: {0:?}")]
    Whitespace(String),
    #[error("joining-term table must have {JOINING_TERM_COUNT} terms, found {0}")]
    TermCount(usize),
    #[error("cannot read joining terms from {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A word and its wildcard stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemmedWord {
    pub original: String,
    pub stemmed: String,
}

impl StemmedWord {
    /// The stem without its trailing asterisk, if it has one.
    pub fn prefix(&self) -> Option<&str> {
        self.stemmed.strip_suffix('*')
    }
}

/// Length-based wildcard stemming:
///
/// | length        | rule                          |
/// |---------------|-------------------------------|
/// | > 10          | last 4 characters become `*`  |
/// | 9..=10        | last 3 characters become `*`  |
/// | 3..=8         | `*` is appended               |
/// | <= 2          | unchanged                     |
pub fn stem(word: &str) -> Result<StemmedWord, PatternsError> {
    if word.is_empty() {
        return Err(PatternsError::EmptyWord);
    }
    if word.chars().any(char::is_whitespace) {
        return Err(PatternsError::Whitespace(word.to_string()));
    }
    let chars: Vec<char> = word.chars().collect();
    let len = chars.len();
    let keep = match len {
        0..=2 => len,
        3..=8 => len,
        9..=10 => len - 3,
        _ => len - 4,
    };
    let mut stemmed: String = chars[..keep].iter().collect();
    if len > 2 {
        stemmed.push('*');
    }
    Ok(StemmedWord {
        original: word.to_string(),
        stemmed,
    })
}

/// The ordered joining terms. Term order fixes vector component order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoiningTermTable {
    terms: Vec<String>,
}

impl JoiningTermTable {
    /// The built-in table of 64 terms.
    pub fn standard() -> Self {
        Self::from_config(DEFAULT_TERMS).expect("built-in joining terms are valid")
    }

    pub fn new(terms: Vec<String>) -> Result<Self, PatternsError> {
        if terms.len() != JOINING_TERM_COUNT {
            return Err(PatternsError::TermCount(terms.len()));
        }
        let terms = terms
            .iter()
            .map(|t| t.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
            .collect();
        Ok(JoiningTermTable { terms })
    }

    /// Parses the config format: one term per line, `#` starts a comment
    /// line, an empty line is the empty term.
    pub fn from_config(text: &str) -> Result<Self, PatternsError> {
        let terms = text
            .lines()
            .filter(|line| !line.trim_start().starts_with('#'))
            .map(|line| line.trim().to_string())
            .collect();
        Self::new(terms)
    }

    pub fn load(path: &Path) -> Result<Self, PatternsError> {
        let text = std::fs::read_to_string(path).map_err(|source| PatternsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_config(&text)
    }

    pub fn to_config(&self) -> String {
        let mut out = String::new();
        for term in &self.terms {
            out.push_str(term);
            out.push('\n');
        }
        out
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Hex SHA-256 identifying the table; vectors built from different tables
    /// must not be compared.
    pub fn hash_hex(&self) -> String {
        let mut hasher = Sha256::new();
        for term in &self.terms {
            hasher.update((term.len() as u64).to_le_bytes());
            hasher.update(term.as_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

impl Default for JoiningTermTable {
    fn default() -> Self {
        Self::standard()
    }
}

/// The 128 query texts for a pair. Entry `2i` is `X term_i Y`, entry `2i+1`
/// is `Y term_i X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPair {
    pub pair: WordPair,
    queries: Vec<String>,
}

impl QueryPair {
    pub fn queries(&self) -> &[String] {
        &self.queries
    }

    pub fn forward(&self, term: usize) -> &str {
        &self.queries[2 * term]
    }

    pub fn reversed(&self, term: usize) -> &str {
        &self.queries[2 * term + 1]
    }
}

/// The form a pair word takes inside a query: its stem, or the plain word
/// when the stem would not be a valid wildcard prefix.
fn query_word(word: &str) -> Result<String, PatternsError> {
    let lower = word.to_lowercase();
    let stemmed = stem(&lower)?;
    match stemmed.prefix() {
        Some(prefix) if PatternToken::prefix(prefix).is_err() => Ok(lower),
        _ => Ok(stemmed.stemmed),
    }
}

fn join(parts: [&str; 3]) -> String {
    parts
        .iter()
        .filter(|p| !p.is_empty())
        .copied()
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn generate_queries(pair: &WordPair, table: &JoiningTermTable) -> Result<QueryPair, PatternsError> {
    let x = query_word(&pair.first)?;
    let y = query_word(&pair.second)?;
    let mut queries = Vec::with_capacity(2 * table.len());
    for term in table.terms() {
        queries.push(join([&x, term, &y]));
        queries.push(join([&y, term, &x]));
    }
    Ok(QueryPair {
        pair: pair.clone(),
        queries,
    })
}

/// Parses query text into a phrase pattern.
///
/// A standalone `*` is any word; a trailing `*` after at least three letters
/// is a prefix; anything else is literal text, split by the corpus tokenizer
/// (so `'s` and hyphenated words line up with indexed tokens).
pub fn parse_pattern(query: &str) -> Result<PhrasePattern, PatternError> {
    let mut tokens = Vec::new();
    for word in query.split_whitespace() {
        if word == "*" {
            tokens.push(PatternToken::AnyWord);
            continue;
        }
        let (body, is_prefix) = match word.strip_suffix('*') {
            Some(body) => (body, true),
            None => (word, false),
        };
        if body.contains('*') {
            return Err(PatternError::EmbeddedAsterisk(word.to_string()));
        }
        let body = body.to_lowercase();
        if is_prefix {
            tokens.push(PatternToken::prefix(body).map_err(|_| PatternError::ShortPrefix(word.to_string()))?);
        } else if matches!(body.as_str(), "'s" | "\u{2019}s") {
            tokens.push(PatternToken::Literal("'s".into()));
        } else {
            let parts = tokenize(&body);
            if parts.is_empty() {
                return Err(PatternError::BadLiteral(word.to_string()));
            }
            tokens.extend(parts.into_iter().map(PatternToken::Literal));
        }
    }
    PhrasePattern::new(tokens)
}

impl fmt::Display for JoiningTermTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            writeln!(f, "{:>2} {:?}", i + 1, term)?;
        }
        Ok(())
    }
}

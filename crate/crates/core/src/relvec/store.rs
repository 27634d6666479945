//! Vector store file.
//!
//! ```text
//! RSVEC1 \t <joining-term table hash>
//! first \t second \t count_1 \t ... \t count_128
//! ```
//!
//! Raw counts are stored rather than components, so the transform can change
//! without re-querying.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use super::{build_vector, CountCache, CountProvider, RelationVector, VectorError};
use crate::pair::WordPair;
use crate::patterns::{JoiningTermTable, QUERIES_PER_PAIR};

pub const VECTOR_MAGIC: &str = "RSVEC1";

/// Relation vectors keyed by pair, all built from one joining-term table.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorStore {
    terms_hash: Arc<str>,
    vectors: Vec<RelationVector>,
    by_pair: HashMap<WordPair, usize>,
}

impl VectorStore {
    pub fn new(terms_hash: &str) -> Self {
        VectorStore {
            terms_hash: Arc::from(terms_hash),
            vectors: Vec::new(),
            by_pair: HashMap::new(),
        }
    }

    /// Builds vectors for the distinct pairs of `pairs`, in first-seen order.
    /// Pairs are processed in parallel unless the provider limits in-flight
    /// queries.
    pub fn build(
        pairs: &[WordPair],
        table: &JoiningTermTable,
        provider: &dyn CountProvider,
        cache: &CountCache,
    ) -> Result<Self, VectorError> {
        let mut seen = std::collections::HashSet::new();
        let distinct: Vec<&WordPair> = pairs.iter().filter(|p| seen.insert(*p)).collect();
        let built: Vec<RelationVector> = if provider.max_in_flight().is_some() {
            distinct
                .iter()
                .map(|p| build_vector(p, table, provider, cache))
                .collect::<Result<_, _>>()?
        } else {
            distinct
                .par_iter()
                .map(|p| build_vector(p, table, provider, cache))
                .collect::<Result<_, _>>()?
        };
        let mut store = VectorStore::new(&table.hash_hex());
        for vector in built {
            store.insert(vector)?;
        }
        Ok(store)
    }

    pub fn terms_hash(&self) -> &str {
        &self.terms_hash
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[RelationVector] {
        &self.vectors
    }

    /// Adds or replaces the vector for its pair.
    pub fn insert(&mut self, vector: RelationVector) -> Result<(), VectorError> {
        if vector.terms_hash() != &*self.terms_hash {
            return Err(VectorError::TableMismatch {
                expected: self.terms_hash.to_string(),
                found: vector.terms_hash().to_string(),
            });
        }
        if vector.raw_counts().len() != QUERIES_PER_PAIR {
            return Err(VectorError::Dimension {
                pair: vector.pair().clone(),
                expected: QUERIES_PER_PAIR,
                found: vector.raw_counts().len(),
            });
        }
        let vector = RelationVector {
            terms_hash: Arc::clone(&self.terms_hash),
            ..vector
        };
        match self.by_pair.get(vector.pair()) {
            Some(&i) => self.vectors[i] = vector,
            None => {
                self.by_pair.insert(vector.pair().clone(), self.vectors.len());
                self.vectors.push(vector);
            }
        }
        Ok(())
    }

    pub fn get(&self, pair: &WordPair) -> Option<&RelationVector> {
        self.by_pair.get(pair).map(|&i| &self.vectors[i])
    }

    pub fn require(&self, pair: &WordPair) -> Result<&RelationVector, VectorError> {
        self.get(pair).ok_or_else(|| VectorError::Missing(pair.clone()))
    }

    /// Fails unless the store was built with `table`.
    pub fn check_table(&self, table: &JoiningTermTable) -> Result<(), VectorError> {
        let expected = table.hash_hex();
        if expected != *self.terms_hash {
            return Err(VectorError::TableMismatch {
                expected,
                found: self.terms_hash.to_string(),
            });
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<(), VectorError> {
        writeln!(w, "{VECTOR_MAGIC}\t{}", self.terms_hash)?;
        for v in &self.vectors {
            let pair = v.pair();
            for word in [&pair.first, &pair.second] {
                if word.is_empty() || word.contains(['\t', '\n', '\r']) {
                    return Err(VectorError::Format {
                        line: 0,
                        message: format!("word {word:?} cannot be stored"),
                    });
                }
            }
            write!(w, "{}\t{}", pair.first, pair.second)?;
            for c in v.raw_counts() {
                write!(w, "\t{c}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self, VectorError> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        let terms_hash = match header.split_once('\t') {
            Some((VECTOR_MAGIC, hash)) if !hash.is_empty() && !hash.contains('\t') => hash,
            _ => {
                return Err(VectorError::Format {
                    line: 1,
                    message: format!("expected header {VECTOR_MAGIC}<TAB><terms hash>"),
                })
            }
        };
        let mut store = VectorStore::new(terms_hash);
        for (i, line) in lines.enumerate() {
            let line = line?;
            let line_no = i + 2;
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| VectorError::Format { line: line_no, message };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 2 + QUERIES_PER_PAIR {
                return Err(bad(format!(
                    "expected {} fields, found {}",
                    2 + QUERIES_PER_PAIR,
                    fields.len()
                )));
            }
            let counts = fields[2..]
                .iter()
                .map(|f| f.parse::<u64>().map_err(|_| bad(format!("bad count {f:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let pair = WordPair::new(fields[0], fields[1]);
            if store.get(&pair).is_some() {
                return Err(bad(format!("duplicate pair {pair}")));
            }
            let vector = RelationVector::from_counts(pair, counts, Arc::clone(&store.terms_hash));
            store.insert(vector)?;
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<(), VectorError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, VectorError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

/// Parses a pair list: `first \t second` per line; blank and `#` lines are
/// skipped.
pub fn parse_pair_list(text: &str) -> Result<Vec<WordPair>, VectorError> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        match line.split('\t').map(str::trim).collect::<Vec<_>>()[..] {
            [first, second] if !first.is_empty() && !second.is_empty() => pairs.push(WordPair::new(first, second)),
            _ => {
                return Err(VectorError::Format {
                    line: i + 1,
                    message: "expected first<TAB>second".into(),
                })
            }
        }
    }
    Ok(pairs)
}

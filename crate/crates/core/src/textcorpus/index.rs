use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::pattern::{PatternToken, PhrasePattern};
use super::tokenizer::{is_token, TOKENIZER_VERSION};
use super::{CorpusError, Document};

/// Documents per build shard. Fixed so the merged result never depends on
/// the number of worker threads.
const SHARD_DOCS: usize = 512;

/// One occurrence of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Posting {
    pub doc: u32,
    pub pos: u32,
}

/// SHA-256 over the tokenizer version and the full token stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub [u8; 32]);

impl Fingerprint {
    pub(crate) fn of_documents<'a, I, T>(docs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = &'a str>,
        T::IntoIter: ExactSizeIterator,
    {
        let mut hasher = Sha256::new();
        hasher.update(b"relsim-corpus");
        hasher.update(TOKENIZER_VERSION.to_le_bytes());
        for doc in docs {
            let tokens = doc.into_iter();
            hasher.update((tokens.len() as u64).to_le_bytes());
            for token in tokens {
                hasher.update((token.len() as u64).to_le_bytes());
                hasher.update(token.as_bytes());
            }
        }
        Fingerprint(hasher.finalize().into())
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Immutable positional inverted index over a tokenized corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusIndex {
    pub(super) terms: Vec<String>,
    pub(super) postings: Vec<Vec<Posting>>,
    pub(super) doc_lengths: Vec<u32>,
    pub(super) fingerprint: Fingerprint,
}

impl CorpusIndex {
    /// Builds the index. Shards are indexed in parallel on the current rayon
    /// pool and merged in document order.
    pub fn build(docs: &[Document]) -> Result<Self, CorpusError> {
        for (i, doc) in docs.iter().enumerate() {
            let expected = u32::try_from(i).map_err(|_| CorpusError::TooLarge)?;
            if doc.id != expected {
                return Err(CorpusError::NonDenseIds {
                    expected,
                    found: doc.id,
                });
            }
            if u32::try_from(doc.tokens.len()).is_err() {
                return Err(CorpusError::TooLarge);
            }
            if let Some((position, token)) = doc.tokens.iter().enumerate().find(|(_, t)| !is_token(t)) {
                return Err(CorpusError::BadToken {
                    doc: doc.id,
                    position,
                    token: token.clone(),
                });
            }
        }

        let shards: Vec<HashMap<&str, Vec<Posting>>> = docs
            .par_chunks(SHARD_DOCS)
            .map(|chunk| {
                let mut local: HashMap<&str, Vec<Posting>> = HashMap::new();
                for doc in chunk {
                    for (pos, token) in doc.tokens.iter().enumerate() {
                        local.entry(token.as_str()).or_default().push(Posting {
                            doc: doc.id,
                            pos: pos as u32,
                        });
                    }
                }
                local
            })
            .collect();

        let mut merged: BTreeMap<&str, Vec<Posting>> = BTreeMap::new();
        for shard in shards {
            for (term, list) in shard {
                merged.entry(term).or_default().extend(list);
            }
        }
        // Shards cover increasing doc ranges, so appending keeps lists sorted.
        let (terms, postings) = merged.into_iter().map(|(term, list)| (term.to_string(), list)).unzip();

        Ok(CorpusIndex {
            terms,
            postings,
            doc_lengths: docs.iter().map(|d| d.tokens.len() as u32).collect(),
            fingerprint: Fingerprint::of_documents(docs.iter().map(|d| d.tokens.iter().map(String::as_str))),
        })
    }

    pub fn doc_count(&self) -> usize {
        self.doc_lengths.len()
    }

    pub fn doc_lengths(&self) -> &[u32] {
        &self.doc_lengths
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    /// The sorted token dictionary.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        match self.terms.binary_search_by(|t| t.as_str().cmp(term)) {
            Ok(i) => &self.postings[i],
            Err(_) => &[],
        }
    }

    /// Dictionary indices of all terms starting with `stem`.
    fn prefix_range(&self, stem: &str) -> std::ops::Range<usize> {
        let start = self.terms.partition_point(|t| t.as_str() < stem);
        let len = self.terms[start..].iter().take_while(|t| t.starts_with(stem)).count();
        start..start + len
    }

    /// Dictionary terms matched by a prefix token.
    pub fn prefix_terms(&self, stem: &str, max_extra: usize) -> Vec<&str> {
        let token = PatternToken::Prefix {
            stem: stem.to_string(),
            max_extra,
        };
        self.terms[self.prefix_range(stem)]
            .iter()
            .filter(|t| token.matches(t))
            .map(String::as_str)
            .collect()
    }

    fn occurrences(&self, token: &PatternToken) -> Cow<'_, [Posting]> {
        match token {
            PatternToken::Literal(text) => Cow::Borrowed(self.postings(text)),
            PatternToken::Prefix { stem, .. } => {
                let range = self.prefix_range(stem);
                let mut lists = range
                    .filter(|&i| token.matches(&self.terms[i]))
                    .map(|i| self.postings[i].as_slice());
                match (lists.next(), lists.next()) {
                    (None, _) => Cow::Borrowed(&[]),
                    (Some(only), None) => Cow::Borrowed(only),
                    (Some(a), Some(b)) => {
                        let mut all: Vec<Posting> = a.iter().chain(b).copied().collect();
                        for list in lists {
                            all.extend_from_slice(list);
                        }
                        all.sort_unstable();
                        Cow::Owned(all)
                    }
                }
            }
            PatternToken::AnyWord => unreachable!("any-word tokens have no postings"),
        }
    }

    /// Number of distinct documents with at least one contiguous match of
    /// `pattern`.
    pub fn count_documents(&self, pattern: &PhrasePattern) -> u64 {
        let width = pattern.len() as u32;
        let mut constrained: Vec<(u32, Cow<'_, [Posting]>)> = pattern
            .tokens()
            .iter()
            .enumerate()
            .filter(|(_, t)| **t != PatternToken::AnyWord)
            .map(|(offset, t)| (offset as u32, self.occurrences(t)))
            .collect();
        if constrained.iter().any(|(_, list)| list.is_empty()) {
            return 0;
        }
        constrained.sort_by_key(|(_, list)| list.len());

        let mut lists = constrained.into_iter();
        let Some((offset, first)) = lists.next() else {
            return 0;
        };
        // Candidate match starts.
        let mut starts: Vec<Posting> = shifted(&first, offset).collect();
        for (offset, list) in lists {
            starts = intersect(&starts, &list, offset);
            if starts.is_empty() {
                return 0;
            }
        }

        let mut count = 0;
        let mut last_doc = None;
        for start in starts {
            if start.pos + width > self.doc_lengths[start.doc as usize] {
                continue;
            }
            if last_doc != Some(start.doc) {
                count += 1;
                last_doc = Some(start.doc);
            }
        }
        count
    }
}

fn shifted(list: &[Posting], offset: u32) -> impl Iterator<Item = Posting> + '_ {
    list.iter().filter(move |p| p.pos >= offset).map(move |p| Posting {
        doc: p.doc,
        pos: p.pos - offset,
    })
}

/// Keeps the candidate starts `s` for which `s + offset` occurs in `list`.
fn intersect(starts: &[Posting], list: &[Posting], offset: u32) -> Vec<Posting> {
    let mut out = Vec::with_capacity(starts.len().min(list.len()));
    if starts.len() * 16 < list.len() {
        for &s in starts {
            let target = Posting {
                doc: s.doc,
                pos: s.pos + offset,
            };
            if list.binary_search(&target).is_ok() {
                out.push(s);
            }
        }
        return out;
    }
    let mut other = shifted(list, offset).peekable();
    for &s in starts {
        while other.next_if(|o| *o < s).is_some() {}
        match other.peek() {
            Some(o) if *o == s => out.push(s),
            Some(_) => {}
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(raw: &[&[&str]]) -> Vec<Document> {
        raw.iter()
            .enumerate()
            .map(|(i, toks)| Document::new(i as u32, toks.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    fn lit(s: &str) -> PatternToken {
        PatternToken::literal(s).unwrap()
    }

    fn pattern(tokens: Vec<PatternToken>) -> PhrasePattern {
        PhrasePattern::new(tokens).unwrap()
    }

    #[test]
    fn dictionary_and_postings() {
        let index = CorpusIndex::build(&docs(&[&["a", "b"], &["b", "c"]])).unwrap();
        assert_eq!(index.terms(), ["a", "b", "c"]);
        assert_eq!(
            index.postings("b"),
            [Posting { doc: 0, pos: 1 }, Posting { doc: 1, pos: 0 }]
        );
        assert!(index.postings("z").is_empty());
    }

    #[test]
    fn single_empty_document() {
        let index = CorpusIndex::build(&docs(&[&[]])).unwrap();
        assert!(index.terms().is_empty());
        assert_eq!(index.doc_count(), 1);
        assert_eq!(index.count_documents(&pattern(vec![lit("a")])), 0);
    }

    #[test]
    fn exact_phrase() {
        let index = CorpusIndex::build(&docs(&[&["water", "in", "the", "riverbed"]])).unwrap();
        let p = pattern(vec![lit("water"), lit("in"), lit("the"), lit("riverbed")]);
        assert_eq!(index.count_documents(&p), 1);
    }

    #[test]
    fn order_matters() {
        let index = CorpusIndex::build(&docs(&[&["street", "on", "traffic"], &["street", "on", "traffic"]])).unwrap();
        let p = pattern(vec![lit("traffic"), PatternToken::AnyWord, lit("street")]);
        assert_eq!(index.count_documents(&p), 0);
        let q = pattern(vec![lit("street"), PatternToken::AnyWord, lit("traffic")]);
        assert_eq!(index.count_documents(&q), 2);
    }

    #[test]
    fn repeated_matches_count_once() {
        let index = CorpusIndex::build(&docs(&[&["a", "b", "a", "b", "a", "b"], &["b", "a"]])).unwrap();
        assert_eq!(index.count_documents(&pattern(vec![lit("a"), lit("b")])), 1);
        assert_eq!(index.count_documents(&pattern(vec![lit("b")])), 2);
    }

    #[test]
    fn prefix_matches_across_terms() {
        let index = CorpusIndex::build(&docs(&[
            &["limits", "are", "good"],
            &["limiting", "is", "bad"],
            &["limitlessness", "is", "rare"],
            &["limit"],
        ]))
        .unwrap();
        let p = pattern(vec![PatternToken::prefix("limit").unwrap()]);
        assert_eq!(index.count_documents(&p), 3);
        assert_eq!(index.prefix_terms("limit", 5), ["limit", "limiting", "limits"]);
        let q = pattern(vec![
            PatternToken::prefix("limit").unwrap(),
            PatternToken::AnyWord,
            PatternToken::prefix("goo").unwrap(),
        ]);
        assert_eq!(index.count_documents(&q), 1);
    }

    #[test]
    fn rejects_sparse_ids_and_bad_tokens() {
        let sparse = vec![Document::new(1, vec!["a".into()])];
        assert!(matches!(
            CorpusIndex::build(&sparse),
            Err(CorpusError::NonDenseIds { .. })
        ));
        let bad = vec![Document::new(0, vec!["Upper".into()])];
        assert!(matches!(CorpusIndex::build(&bad), Err(CorpusError::BadToken { .. })));
    }

    #[test]
    fn build_is_deterministic_across_pools() {
        let many: Vec<Document> = (0..3000u32)
            .map(|i| Document::new(i, (0..(i % 7)).map(|j| format!("w{}", (i * 31 + j) % 97)).collect()))
            .collect();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let eight = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a = one.install(|| CorpusIndex::build(&many)).unwrap();
        let b = eight.install(|| CorpusIndex::build(&many)).unwrap();
        assert_eq!(a, b);
    }
}

//! Relational similarity from corpus phrase counts.
//!
//! A word pair `X:Y` is characterised by a *relation vector*: the document
//! frequencies of 128 short phrases that join `X` and `Y` with one of 64
//! joining terms (in both orders), log-transformed. Pairs whose vectors
//! point in similar directions are taken to stand in similar relations.
//!
//! The crate is split along the pipeline:
//!
//! - [`textcorpus`]: tokenizer, document ingestion, positional inverted index
//!   and wildcard phrase counting.
//! - [`patterns`]: stemming, joining-term tables, query generation and query
//!   parsing.
//! - [`relvec`]: count providers, the persistent count cache, relation
//!   vectors and cosine similarity.
//! - [`analogy`]: multiple-choice analogy solving with margin-based
//!   skip/double-guess decisions, and candidate ranking.
//! - [`nounmod`]: noun-modifier relation classification by leave-one-out
//!   nearest neighbour.
//! - [`metrics`]: precision, recall, F, macroaveraging and threshold sweeps.

pub mod analogy;
pub mod metrics;
pub mod nounmod;
pub mod patterns;
pub mod relvec;
pub mod seeding;
pub mod textcorpus;

mod pair;

pub use analogy::{AnalogyQuestion, Decision, DecisionKind};
pub use metrics::{Prediction, PrfRecord, SweepRow};
pub use nounmod::{Class30, Class5, ClassificationOutput, LabeledPair};
pub use pair::WordPair;
pub use patterns::{JoiningTermTable, QueryPair, StemmedWord};
pub use relvec::{cosine, CountCache, CountProvider, RelationVector, VectorStore};
pub use textcorpus::{CorpusIndex, DocMode, Document, PatternToken, PhrasePattern};

//! Multiple-choice analogy questions answered by relational similarity.
//!
//! Each choice is scored by the cosine between its relation vector and the
//! stem's. The margin (best minus second-best cosine) gates the answer: a
//! positive threshold skips questions with a smaller margin, a negative one
//! adds the runner-up as a second guess.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::metrics::{prf, PrfRecord, SweepRow, ThresholdTask};
use crate::pair::WordPair;
use crate::relvec::{cosine, RelationVector, VectorError, VectorStore};
use crate::seeding::item_rng;

pub const CHOICES: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum AnalogyError {
    #[error("question file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("duplicate question id {0:?}")]
    DuplicateId(String),
    #[error("rank table needs k >= 1")]
    BadTopK,
    #[error("ranks start at 1, found 0")]
    ZeroRank,
    #[error("candidate pool is empty")]
    EmptyPool,
    #[error(transparent)]
    Vector(#[from] VectorError),
    #[error("cannot read questions: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyQuestion {
    pub id: String,
    pub stem: WordPair,
    pub choices: [WordPair; CHOICES],
    /// Index of the correct choice, 0-based.
    pub gold: usize,
}

impl AnalogyQuestion {
    /// The stem followed by the five choices.
    pub fn pairs(&self) -> impl Iterator<Item = &WordPair> {
        std::iter::once(&self.stem).chain(self.choices.iter())
    }

    pub fn gold_pair(&self) -> &WordPair {
        &self.choices[self.gold]
    }
}

/// Parses the question TSV: `id, stemA, stemB, c1A, c1B, ..., c5A, c5B,
/// gold` with `gold` in 0..=4. Blank lines and `#` lines are skipped.
pub fn parse_questions(text: &str) -> Result<Vec<AnalogyQuestion>, AnalogyError> {
    let mut questions: Vec<AnalogyQuestion> = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let bad = |message: String| AnalogyError::Format { line: i + 1, message };
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 2 * CHOICES + 4 {
            return Err(bad(format!(
                "expected {} fields, found {}",
                2 * CHOICES + 4,
                fields.len()
            )));
        }
        if let Some(empty) = fields.iter().position(|f| f.is_empty()) {
            return Err(bad(format!("field {} is empty", empty + 1)));
        }
        let gold: usize = fields[13]
            .parse()
            .ok()
            .filter(|g| *g < CHOICES)
            .ok_or_else(|| bad(format!("gold index must be 0-4, found {:?}", fields[13])))?;
        let pair = |k: usize| WordPair::new(fields[k], fields[k + 1]);
        let question = AnalogyQuestion {
            id: fields[0].to_string(),
            stem: pair(1),
            choices: [pair(3), pair(5), pair(7), pair(9), pair(11)],
            gold,
        };
        if !ids.insert(question.id.clone()) {
            return Err(AnalogyError::DuplicateId(question.id));
        }
        questions.push(question);
    }
    Ok(questions)
}

pub fn read_questions(path: &std::path::Path) -> Result<Vec<AnalogyQuestion>, AnalogyError> {
    parse_questions(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionKind {
    Skip,
    Guess(usize),
    DoubleGuess(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub kind: DecisionKind,
    /// Best minus second-best cosine; `None` when the stem vector is all
    /// zeros.
    pub margin: Option<f64>,
}

impl Decision {
    pub fn guesses(&self) -> u64 {
        match self.kind {
            DecisionKind::Skip => 0,
            DecisionKind::Guess(_) => 1,
            DecisionKind::DoubleGuess(..) => 2,
        }
    }

    pub fn is_correct(&self, gold: usize) -> bool {
        match self.kind {
            DecisionKind::Skip => false,
            DecisionKind::Guess(a) => a == gold,
            DecisionKind::DoubleGuess(a, b) => a == gold || b == gold,
        }
    }
}

/// Cosines of each choice against the stem, in choice order.
pub fn score_choices(stem: &RelationVector, choices: &[&RelationVector]) -> Result<Vec<f64>, VectorError> {
    for choice in choices {
        if choice.terms_hash() != stem.terms_hash() {
            return Err(VectorError::TableMismatch {
                expected: stem.terms_hash().to_string(),
                found: choice.terms_hash().to_string(),
            });
        }
    }
    Ok(choices.iter().map(|c| cosine(stem, c)).collect())
}

/// Indices by descending cosine; equal cosines are put in random order.
pub fn order_by_cosine<R: Rng + ?Sized>(cosines: &[f64], rng: &mut R) -> Vec<usize> {
    let keys: Vec<u64> = cosines.iter().map(|_| rng.gen()).collect();
    let mut order: Vec<usize> = (0..cosines.len()).collect();
    order.sort_by(|&a, &b| {
        cosines[b]
            .total_cmp(&cosines[a])
            .then(keys[a].cmp(&keys[b]))
            .then(a.cmp(&b))
    });
    order
}

/// Applies the margin rule to one question's choice cosines.
///
/// `threshold > 0`: skip when the margin is below it. `threshold < 0`: guess
/// both the best and second-best when the margin is below `|threshold|`.
/// An all-zero stem is always skipped.
pub fn decide<R: Rng + ?Sized>(cosines: &[f64], stem_zero: bool, threshold: f64, rng: &mut R) -> Decision {
    if stem_zero || cosines.is_empty() {
        return Decision {
            kind: DecisionKind::Skip,
            margin: None,
        };
    }
    let order = order_by_cosine(cosines, rng);
    let best = order[0];
    let second = order.get(1).copied();
    let margin = cosines[best] - second.map_or(0.0, |s| cosines[s]);
    let kind = match second {
        _ if threshold > 0.0 && margin < threshold => DecisionKind::Skip,
        Some(second) if threshold < 0.0 && margin < -threshold => DecisionKind::DoubleGuess(best, second),
        _ => DecisionKind::Guess(best),
    };
    Decision {
        kind,
        margin: Some(margin),
    }
}

/// Pool indices by descending cosine, ties in pool order.
pub fn rank_by_cosine(cosines: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cosines.len()).collect();
    order.sort_by(|&a, &b| cosines[b].total_cmp(&cosines[a]).then(a.cmp(&b)));
    order
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedCandidate {
    pub index: usize,
    pub cosine: f64,
}

pub fn rank_candidates(stem: &RelationVector, pool: &[&RelationVector]) -> Result<Vec<RankedCandidate>, AnalogyError> {
    if pool.is_empty() {
        return Err(AnalogyError::EmptyPool);
    }
    let cosines = score_choices(stem, pool)?;
    Ok(rank_by_cosine(&cosines)
        .into_iter()
        .map(|index| RankedCandidate {
            index,
            cosine: cosines[index],
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankRow {
    pub rank: usize,
    pub matches: usize,
    pub matches_percent: f64,
    pub cumulative: usize,
    pub cumulative_percent: f64,
}

/// Histogram of gold ranks 1..=k with running totals. Percentages are of all
/// ranks given, including those beyond `k`.
pub fn cumulative_rank_table(gold_ranks: &[usize], k: usize) -> Result<Vec<RankRow>, AnalogyError> {
    if k < 1 {
        return Err(AnalogyError::BadTopK);
    }
    if gold_ranks.contains(&0) {
        return Err(AnalogyError::ZeroRank);
    }
    let total = gold_ranks.len();
    let pct = |n: usize| {
        if total == 0 {
            0.0
        } else {
            100.0 * n as f64 / total as f64
        }
    };
    let mut cumulative = 0;
    Ok((1..=k)
        .map(|rank| {
            let matches = gold_ranks.iter().filter(|&&r| r == rank).count();
            cumulative += matches;
            RankRow {
                rank,
                matches,
                matches_percent: pct(matches),
                cumulative,
                cumulative_percent: pct(cumulative),
            }
        })
        .collect())
}

pub fn write_rank_table_csv<W: Write>(rows: &[RankRow], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "rank,matches,matches_percent,cumulative,cumulative_percent")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.rank, r.matches, r.matches_percent, r.cumulative, r.cumulative_percent
        )?;
    }
    Ok(())
}

/// Choice cosines for one question, ready to be decided at any threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredQuestion {
    pub id: String,
    pub gold: usize,
    pub stem_zero: bool,
    pub cosines: Vec<f64>,
}

pub fn score_questions(
    questions: &[AnalogyQuestion],
    store: &VectorStore,
) -> Result<Vec<ScoredQuestion>, AnalogyError> {
    questions
        .par_iter()
        .map(|q| {
            let stem = store.require(&q.stem)?;
            let choices = q
                .choices
                .iter()
                .map(|c| store.require(c))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ScoredQuestion {
                id: q.id.clone(),
                gold: q.gold,
                stem_zero: stem.is_zero(),
                cosines: score_choices(stem, &choices)?,
            })
        })
        .collect()
}

/// A batch of scored questions and the seed for tie-breaking. Each question
/// draws from its own generator keyed by `(seed, id)`.
#[derive(Debug, Clone)]
pub struct AnalogyRun {
    pub questions: Vec<ScoredQuestion>,
    pub seed: u64,
}

impl AnalogyRun {
    pub fn new(questions: Vec<ScoredQuestion>, seed: u64) -> Self {
        AnalogyRun { questions, seed }
    }

    pub fn decisions(&self, threshold: f64) -> Vec<Decision> {
        self.questions
            .iter()
            .map(|q| {
                let mut rng = item_rng(self.seed, &q.id);
                decide(&q.cosines, q.stem_zero, threshold, &mut rng)
            })
            .collect()
    }

    /// Precision and recall over all questions, skipped ones included in the
    /// recall denominator.
    pub fn summary(&self, threshold: f64) -> PrfRecord {
        self.summarize(&self.decisions(threshold))
    }

    pub fn summarize(&self, decisions: &[Decision]) -> PrfRecord {
        let mut correct = 0;
        let mut guesses = 0;
        for (q, d) in self.questions.iter().zip(decisions) {
            guesses += d.guesses();
            correct += u64::from(d.is_correct(q.gold));
        }
        prf(correct, guesses, self.questions.len() as u64).expect("tallies are consistent")
    }

    pub fn write_csv<W: Write>(&self, decisions: &[Decision], w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "id,gold,decision,first,second,margin,correct,cos_a,cos_b,cos_c,cos_d,cos_e"
        )?;
        for (q, d) in self.questions.iter().zip(decisions) {
            let (kind, first, second) = match d.kind {
                DecisionKind::Skip => ("skip", String::new(), String::new()),
                DecisionKind::Guess(a) => ("guess", letter(a), String::new()),
                DecisionKind::DoubleGuess(a, b) => ("double", letter(a), letter(b)),
            };
            let margin = d.margin.map(|m| m.to_string()).unwrap_or_default();
            write!(
                w,
                "{},{},{kind},{first},{second},{margin},{}",
                csv_field(&q.id),
                letter(q.gold),
                u8::from(d.is_correct(q.gold))
            )?;
            for c in &q.cosines {
                write!(w, ",{c}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

impl ThresholdTask for AnalogyRun {
    fn evaluate(&self, threshold: f64) -> SweepRow {
        let r = self.summary(threshold);
        SweepRow {
            threshold,
            precision: r.precision,
            recall: r.recall,
            f: r.f,
        }
    }
}

/// Choice letter for a 0-based index.
pub fn letter(index: usize) -> String {
    char::from(b'a' + index as u8).to_string()
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Where one stem's gold pair landed among all gold pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedStem {
    pub id: String,
    pub stem: WordPair,
    pub gold_rank: usize,
    pub top: Vec<RankedCandidate>,
}

/// The large-pool experiment: questions with all-zero stems are dropped, the
/// remaining questions' gold pairs form one shared pool, and every stem ranks
/// the whole pool.
#[derive(Debug, Clone, PartialEq)]
pub struct RankExperiment {
    /// `(question id, gold pair)` per pool entry.
    pub pool: Vec<(String, WordPair)>,
    pub stems: Vec<RankedStem>,
    pub dropped: Vec<String>,
}

impl RankExperiment {
    pub fn run(questions: &[AnalogyQuestion], store: &VectorStore, top_k: usize) -> Result<Self, AnalogyError> {
        if top_k < 1 {
            return Err(AnalogyError::BadTopK);
        }
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for q in questions {
            if store.require(&q.stem)?.is_zero() {
                dropped.push(q.id.clone());
            } else {
                kept.push(q);
            }
        }
        let pool_vectors = kept
            .iter()
            .map(|q| store.require(q.gold_pair()))
            .collect::<Result<Vec<_>, _>>()?;
        let stems = kept
            .par_iter()
            .enumerate()
            .map(|(own, q)| {
                let ranked = rank_candidates(store.require(&q.stem)?, &pool_vectors)?;
                let gold_rank = 1 + ranked
                    .iter()
                    .position(|c| c.index == own)
                    .expect("own gold pair is in the pool");
                Ok(RankedStem {
                    id: q.id.clone(),
                    stem: q.stem.clone(),
                    gold_rank,
                    top: ranked.into_iter().take(top_k).collect(),
                })
            })
            .collect::<Result<Vec<_>, AnalogyError>>()?;
        Ok(RankExperiment {
            pool: kept.iter().map(|q| (q.id.clone(), q.gold_pair().clone())).collect(),
            stems,
            dropped,
        })
    }

    pub fn gold_ranks(&self) -> Vec<usize> {
        self.stems.iter().map(|s| s.gold_rank).collect()
    }

    pub fn write_csv<W: Write>(&self, top_k: usize, w: &mut W) -> std::io::Result<()> {
        write!(w, "id,stem,gold_pair,gold_rank")?;
        for i in 1..=top_k {
            write!(w, ",top{i}_pair,top{i}_question,top{i}_cosine")?;
        }
        writeln!(w)?;
        for (own, s) in self.stems.iter().enumerate() {
            write!(
                w,
                "{},{},{},{}",
                csv_field(&s.id),
                csv_field(&s.stem.to_string()),
                csv_field(&self.pool[own].1.to_string()),
                s.gold_rank
            )?;
            for i in 0..top_k {
                match s.top.get(i) {
                    Some(c) => {
                        let (qid, pair) = &self.pool[c.index];
                        write!(w, ",{},{},{}", csv_field(&pair.to_string()), csv_field(qid), c.cosine)?;
                    }
                    None => write!(w, ",,,")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

//! Noun-modifier relation classification by single nearest neighbour with
//! leave-one-out cross-validation.
//!
//! Each pair is classified against all the others. If the two nearest
//! neighbours agree, their class is the answer. Otherwise, with margin `m`
//! (first minus second neighbour cosine) and threshold `t`:
//! `|t| <= m` answers the first neighbour's class, `t > m` abstains and
//! `t < -m` answers both neighbours' classes.

use std::fmt;
use std::hash::Hash;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::analogy::csv_field;
use crate::metrics::{accuracy, per_class_prf, PerClassReport, Prediction, SweepRow, ThresholdTask};
use crate::pair::WordPair;
use crate::relvec::{cosine, RelationVector, VectorError, VectorStore};
use crate::seeding::item_rng;

#[derive(Debug, thiserror::Error)]
pub enum NounModError {
    #[error("dataset line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("unknown relation class {0:?}")]
    UnknownClass(String),
    #[error("need at least {needed} items, found {found}")]
    TooSmall { needed: usize, found: usize },
    #[error(transparent)]
    Vector(#[from] VectorError),
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
}

/// A closed label set.
pub trait ClassLabel:
    Copy + Eq + Ord + Hash + fmt::Display + FromStr<Err = NounModError> + Send + Sync + 'static
{
    /// Every label, in report order.
    const ALL: &'static [Self];
}

macro_rules! labels {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl ClassLabel for $name {
            const ALL: &'static [Self] = &[$($name::$variant),+];
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = NounModError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(NounModError::UnknownClass(other.to_string())),
                }
            }
        }
    };
}

labels! {
    /// The 30 fine-grained semantic relations.
    Class30 {
        Agent => "ag",
        Beneficiary => "ben",
        Container => "cntr",
        Content => "cont",
        Cause => "cs",
        Detraction => "detr",
        Direction => "dir",
        Effect => "eff",
        Equative => "eq",
        Frequency => "freq",
        Instrument => "inst",
        LocationAt => "lat",
        LocationFrom => "lfr",
        Location => "loc",
        Material => "mat",
        Measure => "meas",
        Object => "obj",
        ObjectProperty => "obj_prop",
        Part => "part",
        Possessor => "posr",
        Product => "prod",
        Property => "prop",
        Purpose => "prp",
        Source => "src",
        Stative => "st",
        TimeAt => "tat",
        Topic => "top",
        TimeThrough => "tthr",
        Type => "type",
        Whole => "whl",
    }
}

labels! {
    /// The five relation groups.
    Class5 {
        Causality => "causality",
        Participant => "participant",
        Quality => "quality",
        Spatial => "spatial",
        Temporality => "temporality",
    }
}

impl Class30 {
    pub fn collapse(self) -> Class5 {
        use Class30::*;
        match self {
            Cause | Effect | Purpose | Detraction => Class5::Causality,
            Frequency | TimeAt | TimeThrough => Class5::Temporality,
            Direction | Location | LocationAt | LocationFrom => Class5::Spatial,
            Agent | Beneficiary | Instrument | Object | ObjectProperty | Part | Possessor | Property | Product
            | Source | Stative | Whole => Class5::Participant,
            Container | Content | Equative | Material | Measure | Topic | Type => Class5::Quality,
        }
    }
}

/// Collapses a 30-way label given as text.
pub fn collapse_class(label: &str) -> Result<Class5, NounModError> {
    Ok(label.parse::<Class30>()?.collapse())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPair {
    pub modifier: String,
    pub head: String,
    pub class30: Class30,
}

impl LabeledPair {
    pub fn class5(&self) -> Class5 {
        self.class30.collapse()
    }

    /// The pair as `modifier:head`, the order used for its relation vector.
    pub fn pair(&self) -> WordPair {
        WordPair::new(self.modifier.clone(), self.head.clone())
    }
}

/// Parses `modifier \t head \t class30` lines; `#` lines and blank lines are
/// skipped.
pub fn parse_dataset(text: &str) -> Result<Vec<LabeledPair>, NounModError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let bad = |message: String| NounModError::Format { line: i + 1, message };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
            return Err(bad("expected modifier<TAB>head<TAB>class".into()));
        }
        let class30 = fields[2].parse().map_err(|e: NounModError| bad(e.to_string()))?;
        out.push(LabeledPair {
            modifier: fields[0].to_string(),
            head: fields[1].to_string(),
            class30,
        });
    }
    Ok(out)
}

pub fn read_dataset(path: &std::path::Path) -> Result<Vec<LabeledPair>, NounModError> {
    parse_dataset(&std::fs::read_to_string(path)?)
}

/// The two most similar training items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbours {
    pub first: usize,
    pub second: usize,
    pub first_cosine: f64,
    pub second_cosine: f64,
    pub margin: f64,
}

/// Best two of `(index, cosine)` candidates; equal cosines are ordered by a
/// random key drawn per candidate in iteration order.
fn top_two<R, I>(candidates: I, rng: &mut R) -> Option<Neighbours>
where
    R: Rng + ?Sized,
    I: Iterator<Item = (usize, f64)>,
{
    let mut best: Option<(usize, f64, u64)> = None;
    let mut second: Option<(usize, f64, u64)> = None;
    let beats = |a: (usize, f64, u64), b: Option<(usize, f64, u64)>| match b {
        None => true,
        Some(b) => a.1.total_cmp(&b.1).then(b.2.cmp(&a.2)).then(b.0.cmp(&a.0)).is_gt(),
    };
    for (index, cos) in candidates {
        let cand = (index, cos, rng.gen::<u64>());
        if beats(cand, best) {
            second = best;
            best = Some(cand);
        } else if beats(cand, second) {
            second = Some(cand);
        }
    }
    let (first, second) = (best?, second?);
    Some(Neighbours {
        first: first.0,
        second: second.0,
        first_cosine: first.1,
        second_cosine: second.1,
        margin: first.1 - second.1,
    })
}

pub fn nearest_two<R: Rng + ?Sized>(
    query: &RelationVector,
    training: &[&RelationVector],
    rng: &mut R,
) -> Result<Neighbours, NounModError> {
    top_two(training.iter().map(|t| cosine(query, t)).enumerate(), rng).ok_or(NounModError::TooSmall {
        needed: 2,
        found: training.len(),
    })
}

/// Nearest two neighbours of every item among all the other items. Indices
/// refer to `vectors`. Fold `i` draws ties from the generator keyed by
/// `(seed, i)`.
pub fn loocv_neighbours(vectors: &[&RelationVector], seed: u64) -> Result<Vec<Neighbours>, NounModError> {
    if vectors.len() < 3 {
        return Err(NounModError::TooSmall {
            needed: 3,
            found: vectors.len(),
        });
    }
    Ok((0..vectors.len())
        .into_par_iter()
        .map(|i| {
            let mut rng = item_rng(seed, &format!("fold-{i}"));
            let others = (0..vectors.len())
                .filter(|&j| j != i)
                .map(|j| (j, cosine(vectors[i], vectors[j])));
            top_two(others, &mut rng).expect("at least two other items")
        })
        .collect())
}

/// The margin rule for one item.
pub fn classify<L: Copy + PartialEq>(neighbours: &Neighbours, labels: &[L], threshold: f64) -> Prediction<L> {
    let first = labels[neighbours.first];
    let second = labels[neighbours.second];
    let m = neighbours.margin;
    if first == second || threshold.abs() <= m {
        Prediction::Single(first)
    } else if threshold > m {
        Prediction::Abstain
    } else {
        Prediction::Double(first, second)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationOutput<L> {
    pub index: usize,
    pub prediction: Prediction<L>,
    pub neighbours: Neighbours,
}

impl<L> ClassificationOutput<L> {
    pub fn margin(&self) -> f64 {
        self.neighbours.margin
    }
}

/// Leave-one-out neighbours for a labelled dataset, scorable at any
/// threshold without recomputing similarities.
#[derive(Debug, Clone)]
pub struct NounModRun<L> {
    pub labels: Vec<L>,
    pub neighbours: Vec<Neighbours>,
}

impl<L: ClassLabel> NounModRun<L> {
    pub fn new(labels: Vec<L>, vectors: &[&RelationVector], seed: u64) -> Result<Self, NounModError> {
        if labels.len() != vectors.len() {
            return Err(NounModError::TooSmall {
                needed: labels.len(),
                found: vectors.len(),
            });
        }
        let neighbours = loocv_neighbours(vectors, seed)?;
        Ok(NounModRun { labels, neighbours })
    }

    /// Same neighbours, different labels.
    pub fn relabel<M: ClassLabel>(&self, f: impl Fn(L) -> M) -> NounModRun<M> {
        NounModRun {
            labels: self.labels.iter().map(|&l| f(l)).collect(),
            neighbours: self.neighbours.clone(),
        }
    }

    pub fn outputs(&self, threshold: f64) -> Vec<ClassificationOutput<L>> {
        self.neighbours
            .iter()
            .enumerate()
            .map(|(index, n)| ClassificationOutput {
                index,
                prediction: classify(n, &self.labels, threshold),
                neighbours: *n,
            })
            .collect()
    }

    pub fn predictions(&self, threshold: f64) -> Vec<Prediction<L>> {
        self.outputs(threshold).into_iter().map(|o| o.prediction).collect()
    }

    pub fn report(&self, threshold: f64) -> PerClassReport<L> {
        per_class_prf(&self.predictions(threshold), &self.labels, L::ALL)
            .expect("labels come from the closed vocabulary")
    }

    pub fn accuracy(&self, threshold: f64) -> f64 {
        accuracy(&self.predictions(threshold), &self.labels)
    }

    pub fn write_csv<W: Write>(
        &self,
        pairs: &[WordPair],
        outputs: &[ClassificationOutput<L>],
        w: &mut W,
    ) -> std::io::Result<()> {
        writeln!(
            w,
            "index,modifier,head,gold,decision,label1,label2,margin,neighbour1,neighbour2,correct"
        )?;
        for o in outputs {
            let pair = &pairs[o.index];
            let (kind, l1, l2) = match o.prediction {
                Prediction::Abstain => ("abstain", String::new(), String::new()),
                Prediction::Single(a) => ("single", a.to_string(), String::new()),
                Prediction::Double(a, b) => ("double", a.to_string(), b.to_string()),
            };
            let gold = self.labels[o.index];
            writeln!(
                w,
                "{},{},{},{gold},{kind},{l1},{l2},{},{},{},{}",
                o.index,
                csv_field(&pair.first),
                csv_field(&pair.second),
                o.margin(),
                csv_field(&pairs[o.neighbours.first].to_string()),
                csv_field(&pairs[o.neighbours.second].to_string()),
                u8::from(o.prediction == Prediction::Single(gold)),
            )?;
        }
        Ok(())
    }
}

impl<L: ClassLabel> ThresholdTask for NounModRun<L> {
    fn evaluate(&self, threshold: f64) -> SweepRow {
        let r = self.report(threshold);
        SweepRow {
            threshold,
            precision: r.macro_precision,
            recall: r.macro_recall,
            f: r.macro_f,
        }
    }
}

/// Leave-one-out classification of every item at one threshold.
pub fn loocv_classify<L: ClassLabel>(
    labels: &[L],
    vectors: &[&RelationVector],
    threshold: f64,
    seed: u64,
) -> Result<Vec<ClassificationOutput<L>>, NounModError> {
    Ok(NounModRun::new(labels.to_vec(), vectors, seed)?.outputs(threshold))
}

/// Looks up each pair's vector in `store`.
pub fn dataset_vectors<'a>(
    dataset: &[LabeledPair],
    store: &'a VectorStore,
) -> Result<Vec<&'a RelationVector>, NounModError> {
    dataset
        .iter()
        .map(|p| store.require(&p.pair()).map_err(NounModError::from))
        .collect()
}

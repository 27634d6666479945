//! Precision, recall and F; per-class tables with macroaveraging; threshold
//! sweeps.
//!
//! precision = correct / guesses, recall = correct / possible, and F is their
//! harmonic mean. Any ratio with a zero denominator is zero.

use std::collections::HashMap;
use std::fmt::Display;
use std::hash::Hash;
use std::io::Write;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("correct ({correct}) exceeds guesses ({guesses})")]
    MoreCorrectThanGuesses { correct: u64, guesses: u64 },
    #[error("correct ({correct}) exceeds possible ({possible})")]
    MoreCorrectThanPossible { correct: u64, possible: u64 },
    #[error("label {0} is not in the vocabulary")]
    UnknownLabel(String),
    #[error("{predictions} predictions but {gold} gold labels")]
    Misaligned { predictions: usize, gold: usize },
    #[error("threshold list is empty")]
    NoThresholds,
    #[error("invalid threshold {0}")]
    BadThreshold(f64),
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    ratio(2.0 * precision * recall, precision + recall)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrfRecord {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub correct: u64,
    pub guesses: u64,
    pub possible: u64,
}

pub fn prf(correct: u64, guesses: u64, possible: u64) -> Result<PrfRecord, MetricsError> {
    if correct > guesses {
        return Err(MetricsError::MoreCorrectThanGuesses { correct, guesses });
    }
    if correct > possible {
        return Err(MetricsError::MoreCorrectThanPossible { correct, possible });
    }
    let precision = ratio(correct as f64, guesses as f64);
    let recall = ratio(correct as f64, possible as f64);
    Ok(PrfRecord {
        precision,
        recall,
        f: f_measure(precision, recall),
        correct,
        guesses,
        possible,
    })
}

/// A classifier's answer for one item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prediction<L> {
    Abstain,
    Single(L),
    Double(L, L),
}

impl<L: Copy + PartialEq> Prediction<L> {
    pub fn labels(&self) -> Vec<L> {
        match *self {
            Prediction::Abstain => vec![],
            Prediction::Single(a) => vec![a],
            Prediction::Double(a, b) => vec![a, b],
        }
    }

    pub fn contains(&self, label: L) -> bool {
        self.labels().contains(&label)
    }

    pub fn map<M>(self, f: impl Fn(L) -> M) -> Prediction<M> {
        match self {
            Prediction::Abstain => Prediction::Abstain,
            Prediction::Single(a) => Prediction::Single(f(a)),
            Prediction::Double(a, b) => Prediction::Double(f(a), f(b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassRow<L> {
    pub label: L,
    pub size: u64,
    pub record: PrfRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerClassReport<L> {
    pub rows: Vec<ClassRow<L>>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f: f64,
    pub mean_size: f64,
}

/// Per-class precision, recall and F plus their unweighted means.
///
/// A class's guesses are the predictions that name it; its correct guesses
/// are those whose gold label is that class. Rows follow vocabulary order and
/// cover every class that occurs in the gold labels or the predictions.
pub fn per_class_prf<L>(
    predictions: &[Prediction<L>],
    gold: &[L],
    vocabulary: &[L],
) -> Result<PerClassReport<L>, MetricsError>
where
    L: Copy + Eq + Hash + Display,
{
    if predictions.len() != gold.len() {
        return Err(MetricsError::Misaligned {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    let known = |label: L| {
        if vocabulary.contains(&label) {
            Ok(label)
        } else {
            Err(MetricsError::UnknownLabel(label.to_string()))
        }
    };
    #[derive(Default)]
    struct Tally {
        size: u64,
        guesses: u64,
        correct: u64,
    }
    let mut tallies: HashMap<L, Tally> = HashMap::new();
    for (prediction, &truth) in predictions.iter().zip(gold) {
        tallies.entry(known(truth)?).or_default().size += 1;
        for label in prediction.labels() {
            let tally = tallies.entry(known(label)?).or_default();
            tally.guesses += 1;
            if label == truth {
                tally.correct += 1;
            }
        }
    }
    let mut rows = Vec::new();
    for &label in vocabulary {
        if let Some(t) = tallies.get(&label) {
            rows.push(ClassRow {
                label,
                size: t.size,
                record: prf(t.correct, t.guesses, t.size)?,
            });
        }
    }
    let mean = |f: &dyn Fn(&ClassRow<L>) -> f64| ratio(rows.iter().map(f).sum(), rows.len() as f64);
    Ok(PerClassReport {
        macro_precision: mean(&|r| r.record.precision),
        macro_recall: mean(&|r| r.record.recall),
        macro_f: mean(&|r| r.record.f),
        mean_size: mean(&|r| r.size as f64),
        rows,
    })
}

/// Pools all guesses before computing precision and recall.
pub fn micro_prf<L: Copy + PartialEq>(predictions: &[Prediction<L>], gold: &[L]) -> Result<PrfRecord, MetricsError> {
    if predictions.len() != gold.len() {
        return Err(MetricsError::Misaligned {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    let mut guesses = 0;
    let mut correct = 0;
    for (p, &g) in predictions.iter().zip(gold) {
        let labels = p.labels();
        guesses += labels.len() as u64;
        correct += u64::from(labels.contains(&g));
    }
    prf(correct, guesses, gold.len() as u64)
}

/// Fraction of items whose prediction is a single correct label.
pub fn accuracy<L: Copy + PartialEq>(predictions: &[Prediction<L>], gold: &[L]) -> f64 {
    let correct = predictions
        .iter()
        .zip(gold)
        .filter(|(p, g)| matches!(p, Prediction::Single(l) if l == *g))
        .count();
    ratio(correct as f64, gold.len() as f64)
}

/// Expected per-class precision, recall and F when guessing each class with
/// probability proportional to its size: all three equal the class share.
pub fn proportional_baseline(sizes: &[u64]) -> Vec<f64> {
    let total: u64 = sizes.iter().sum();
    sizes.iter().map(|&s| ratio(s as f64, total as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// A decision procedure that can be re-scored at any margin threshold from
/// cached similarities.
pub trait ThresholdTask {
    fn evaluate(&self, threshold: f64) -> SweepRow;
}

/// Evaluates `task` at each distinct threshold, ascending.
pub fn sweep<T: ThresholdTask + ?Sized>(task: &T, thresholds: &[f64]) -> Result<Vec<SweepRow>, MetricsError> {
    if thresholds.is_empty() {
        return Err(MetricsError::NoThresholds);
    }
    if let Some(&bad) = thresholds.iter().find(|t| !t.is_finite()) {
        return Err(MetricsError::BadThreshold(bad));
    }
    let mut ts = thresholds.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    Ok(ts.into_iter().map(|t| task.evaluate(t)).collect())
}

/// `from, from + step, ..., to`, with values rounded to 12 decimals so that
/// e.g. `0.1 * 3` prints as `0.3`.
pub fn threshold_range(from: f64, to: f64, step: f64) -> Result<Vec<f64>, MetricsError> {
    for v in [from, to, step] {
        if !v.is_finite() {
            return Err(MetricsError::BadThreshold(v));
        }
    }
    if step <= 0.0 || to < from {
        return Err(MetricsError::BadThreshold(step));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let t = ((from + i as f64 * step) * 1e12).round() / 1e12;
            if t == 0.0 {
                0.0
            } else {
                t
            }
        })
        .collect())
}

/// Human-readable percentage with one decimal.
pub fn percent(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "threshold,precision,recall,f")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.threshold, r.precision, r.recall, r.f)?;
    }
    Ok(())
}

pub fn write_per_class_csv<L: Display, W: Write>(report: &PerClassReport<L>, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "class,size,precision,recall,f")?;
    for row in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            row.label, row.size, row.record.precision, row.record.recall, row.record.f
        )?;
    }
    writeln!(
        w,
        "AVERAGE,{},{},{},{}",
        report.mean_size, report.macro_precision, report.macro_recall, report.macro_f
    )
}

//! `relsim`: build indexes and relation vectors, solve analogy questions,
//! classify noun-modifier pairs and sweep margin thresholds.

mod output;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use relsim_core::analogy::{
    cumulative_rank_table, read_questions, score_questions, write_rank_table_csv, AnalogyError, AnalogyRun,
    RankExperiment,
};
use relsim_core::metrics::{percent, sweep, threshold_range, write_per_class_csv, write_sweep_csv, ThresholdTask};
use relsim_core::nounmod::{dataset_vectors, read_dataset, ClassLabel, NounModError, NounModRun};
use relsim_core::relvec::{parse_pair_list, CacheError, IndexProvider, ProviderError, VectorError};
use relsim_core::textcorpus::ingest;
use relsim_core::{Class30, CorpusIndex, CountCache, DocMode, JoiningTermTable, VectorStore, WordPair};

use output::{sibling, write_atomic, RunManifest};

const FORMATS: &str = "\
File formats (UTF-8; '#' lines and blank lines are ignored in TSV inputs):

  corpus          plain text; --doc-mode file makes each file one document,
                  --doc-mode blankline splits files at blank lines
  pairs TSV       first<TAB>second
  questions TSV   id<TAB>stemA<TAB>stemB<TAB>c1A<TAB>c1B<TAB>...<TAB>c5A<TAB>c5B<TAB>gold
                  (gold is the 0-based index of the correct choice, 0-4)
  noun-modifier   modifier<TAB>head<TAB>class
    TSV           (class is one of: ag ben cntr cont cs detr dir eff eq freq inst
                  lat lfr loc mat meas obj obj_prop part posr prod prop prp src
                  st tat top tthr type whl)
  terms file      64 joining terms, one per line, in vector component order;
                  an empty line is the empty term
  vector file     RSVEC1<TAB><terms hash>, then first<TAB>second<TAB>128 counts
  count cache     sha256(provider)<TAB>query<TAB>count, append-only

Outputs (CSV, comma separated, one header line):

  analogy solve   id,gold,decision,first,second,margin,correct,cos_a,...,cos_e
                  (decision: guess|double|skip; choices as letters a-e)
  analogy rank    id,stem,gold_pair,gold_rank,top1_pair,top1_question,top1_cosine,...
     --table      rank,matches,matches_percent,cumulative,cumulative_percent
  nounmod         index,modifier,head,gold,decision,label1,label2,margin,
    classify      neighbour1,neighbour2,correct (decision: single|double|abstain)
     --report     class,size,precision,recall,f (last row AVERAGE)
  eval sweep      threshold,precision,recall,f

Every output is accompanied by <out>.manifest.json.

Exit status: 0 success, 1 usage error, 2 data or format error,
3 count provider or cache error.";

#[derive(Debug, Parser)]
#[command(name = "relsim", version, about = "Relational similarity experiments over a local corpus", after_long_help = FORMATS)]
struct Cli {
    /// Worker threads (default: one per core). Outputs do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Corpus index commands.
    #[command(subcommand)]
    Index(IndexCommand),
    /// Relation vector commands.
    #[command(subcommand)]
    Vectors(VectorsCommand),
    /// Analogy question commands.
    #[command(subcommand)]
    Analogy(AnalogyCommand),
    /// Noun-modifier classification commands.
    #[command(subcommand)]
    Nounmod(NounmodCommand),
    /// Evaluation commands.
    #[command(subcommand)]
    Eval(EvalCommand),
}

#[derive(Debug, Subcommand)]
enum IndexCommand {
    /// Tokenize a corpus and write a positional index.
    Build(IndexBuild),
}

#[derive(Debug, Subcommand)]
enum VectorsCommand {
    /// Count the 128 joining-term queries for every pair.
    Build(VectorsBuild),
}

#[derive(Debug, Subcommand)]
enum AnalogyCommand {
    /// Answer each question with margin-based skipping or double guessing.
    Solve(AnalogySolve),
    /// Rank every question's gold pair against all gold pairs.
    Rank(AnalogyRank),
}

#[derive(Debug, Subcommand)]
enum NounmodCommand {
    /// Leave-one-out nearest-neighbour classification.
    Classify(NounmodClassify),
}

#[derive(Debug, Subcommand)]
enum EvalCommand {
    /// Precision, recall and F across margin thresholds.
    Sweep(EvalSweep),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DocModeArg {
    File,
    Blankline,
}

#[derive(Debug, Args)]
struct IndexBuild {
    /// Corpus files or directories (directories are read recursively).
    #[arg(long, required = true, num_args = 1..)]
    corpus: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "file")]
    doc_mode: DocModeArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("sources").required(true).multiple(true))]
struct VectorsBuild {
    /// Pairs TSV.
    #[arg(long, group = "sources")]
    pairs: Option<PathBuf>,
    /// Questions TSV; the stem and choice pairs are added.
    #[arg(long, group = "sources")]
    questions: Option<PathBuf>,
    /// Noun-modifier TSV; the modifier:head pairs are added.
    #[arg(long, group = "sources")]
    data: Option<PathBuf>,
    #[arg(long)]
    index: PathBuf,
    #[command(flatten)]
    terms: TermsArg,
    /// Count cache file, created if missing.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TermsArg {
    /// Joining-term table (default: the built-in table).
    #[arg(long = "terms")]
    path: Option<PathBuf>,
}

impl TermsArg {
    fn load(&self, manifest: &mut RunManifest) -> Result<JoiningTermTable> {
        let table = match &self.path {
            Some(p) => {
                manifest.input(p)?;
                JoiningTermTable::load(p)?
            }
            None => JoiningTermTable::standard(),
        };
        manifest.terms_hash = Some(table.hash_hex());
        Ok(table)
    }
}

#[derive(Debug, Args)]
struct AnalogySolve {
    #[arg(long)]
    questions: PathBuf,
    #[arg(long)]
    vectors: PathBuf,
    #[command(flatten)]
    terms: TermsArg,
    /// Margin threshold: positive skips, negative double-guesses.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    threshold: f64,
    /// Seed for breaking cosine ties.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AnalogyRank {
    #[arg(long)]
    questions: PathBuf,
    #[arg(long)]
    vectors: PathBuf,
    #[command(flatten)]
    terms: TermsArg,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    #[arg(long)]
    out: PathBuf,
    /// Cumulative rank table (default: <out>.table.csv).
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Classes {
    #[value(name = "30")]
    Thirty,
    #[value(name = "5")]
    Five,
}

#[derive(Debug, Args)]
struct NounmodClassify {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    vectors: PathBuf,
    #[command(flatten)]
    terms: TermsArg,
    #[arg(long, value_enum, default_value = "30")]
    classes: Classes,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Per-class precision, recall and F (default: <out>.classes.csv).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Task {
    Analogy,
    Nounmod,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("grid").required(true))]
struct EvalSweep {
    #[arg(long, value_enum)]
    task: Task,
    /// Questions TSV (analogy task).
    #[arg(long, required_if_eq("task", "analogy"))]
    questions: Option<PathBuf>,
    /// Noun-modifier TSV (nounmod task).
    #[arg(long, required_if_eq("task", "nounmod"))]
    data: Option<PathBuf>,
    #[arg(long)]
    vectors: PathBuf,
    #[command(flatten)]
    terms: TermsArg,
    #[arg(long, value_enum, default_value = "30")]
    classes: Classes,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated thresholds.
    #[arg(long, group = "grid", value_delimiter = ',', allow_negative_numbers = true)]
    thresholds: Option<Vec<f64>>,
    /// Inclusive grid `from:to:step`, e.g. -0.11:0.11:0.01.
    #[arg(long, group = "grid", allow_hyphen_values = true)]
    range: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

/// Bad arguments discovered after parsing.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn provider_failure(v: &VectorError) -> bool {
    matches!(v, VectorError::Provider(_) | VectorError::Cache(_))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return 1;
        }
        if cause.is::<CacheError>() || cause.is::<ProviderError>() {
            return 3;
        }
        let vector = cause
            .downcast_ref::<VectorError>()
            .or_else(|| match cause.downcast_ref::<AnalogyError>() {
                Some(AnalogyError::Vector(v)) => Some(v),
                _ => None,
            })
            .or_else(|| match cause.downcast_ref::<NounModError>() {
                Some(NounModError::Vector(v)) => Some(v),
                _ => None,
            });
        if vector.is_some_and(provider_failure) {
            return 3;
        }
    }
    2
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(Usage("--jobs must be at least 1".into()).into());
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("cannot start worker threads")?;
    let manifest = RunManifest::start(argv, cli.jobs);
    pool.install(|| match cli.command {
        Command::Index(IndexCommand::Build(a)) => index_build(a, manifest),
        Command::Vectors(VectorsCommand::Build(a)) => vectors_build(a, manifest),
        Command::Analogy(AnalogyCommand::Solve(a)) => analogy_solve(a, manifest),
        Command::Analogy(AnalogyCommand::Rank(a)) => analogy_rank(a, manifest),
        Command::Nounmod(NounmodCommand::Classify(a)) => nounmod_classify(a, manifest),
        Command::Eval(EvalCommand::Sweep(a)) => eval_sweep(a, manifest),
    })
}

fn index_build(a: IndexBuild, mut manifest: RunManifest) -> Result<()> {
    let mode = match a.doc_mode {
        DocModeArg::File => DocMode::FilePerDoc,
        DocModeArg::Blankline => DocMode::BlankLine,
    };
    for path in &a.corpus {
        manifest.input(path)?;
    }
    let docs = ingest(&a.corpus, mode)?;
    let index = CorpusIndex::build(&docs)?;
    write_atomic(&a.out, |w| Ok(index.write_to(w)?))?;
    manifest.output(&a.out);
    manifest.index_fingerprint = Some(index.fingerprint().to_hex());
    manifest.note("documents", index.doc_count());
    manifest.note("terms", index.terms().len());
    println!(
        "indexed {} documents, {} distinct tokens, fingerprint {}",
        index.doc_count(),
        index.terms().len(),
        index.fingerprint()
    );
    manifest.finish(&a.out)
}

fn load_store(path: &Path, table: &JoiningTermTable, manifest: &mut RunManifest) -> Result<VectorStore> {
    manifest.input(path)?;
    let store = VectorStore::load(path).with_context(|| format!("cannot load vectors {}", path.display()))?;
    store.check_table(table).with_context(|| {
        format!(
            "vectors {} were built with a different joining-term table",
            path.display()
        )
    })?;
    Ok(store)
}

fn vectors_build(a: VectorsBuild, mut manifest: RunManifest) -> Result<()> {
    let table = a.terms.load(&mut manifest)?;
    let mut pairs: Vec<WordPair> = Vec::new();
    if let Some(p) = &a.pairs {
        manifest.input(p)?;
        let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
        pairs.extend(parse_pair_list(&text).with_context(|| format!("in {}", p.display()))?);
    }
    if let Some(p) = &a.questions {
        manifest.input(p)?;
        let questions = read_questions(p).with_context(|| format!("in {}", p.display()))?;
        pairs.extend(questions.iter().flat_map(|q| q.pairs().cloned()));
    }
    if let Some(p) = &a.data {
        manifest.input(p)?;
        pairs.extend(
            read_dataset(p)
                .with_context(|| format!("in {}", p.display()))?
                .iter()
                .map(|d| d.pair()),
        );
    }

    manifest.input(&a.index)?;
    let index = CorpusIndex::load(&a.index).with_context(|| format!("cannot load index {}", a.index.display()))?;
    manifest.index_fingerprint = Some(index.fingerprint().to_hex());
    let cache = match &a.cache {
        Some(p) => CountCache::open(p)?,
        None => CountCache::in_memory(),
    };
    let provider = IndexProvider::new(&index);
    let store = VectorStore::build(&pairs, &table, &provider, &cache)?;
    write_atomic(&a.out, |w| Ok(store.write_to(w)?))?;
    manifest.output(&a.out);
    let zero = store.vectors().iter().filter(|v| v.is_zero()).count();
    manifest.note("pairs", store.len());
    manifest.note("zero_vectors", zero);
    println!("built {} vectors ({} all-zero)", store.len(), zero);
    manifest.finish(&a.out)
}

fn analogy_solve(a: AnalogySolve, mut manifest: RunManifest) -> Result<()> {
    let table = a.terms.load(&mut manifest)?;
    manifest.input(&a.questions)?;
    let questions = read_questions(&a.questions).with_context(|| format!("in {}", a.questions.display()))?;
    let store = load_store(&a.vectors, &table, &mut manifest)?;
    let run = AnalogyRun::new(score_questions(&questions, &store)?, a.seed);
    let decisions = run.decisions(a.threshold);
    write_atomic(&a.out, |w| Ok(run.write_csv(&decisions, w)?))?;
    manifest.output(&a.out);
    manifest.seed = Some(a.seed);
    manifest.threshold = Some(a.threshold);

    let r = run.summarize(&decisions);
    manifest.note("correct", r.correct);
    manifest.note("guesses", r.guesses);
    manifest.note("possible", r.possible);
    manifest.note("precision", r.precision);
    manifest.note("recall", r.recall);
    manifest.note("f", r.f);
    println!(
        "precision {} ({}/{}), recall {} ({}/{}), F {}",
        percent(r.precision),
        r.correct,
        r.guesses,
        percent(r.recall),
        r.correct,
        r.possible,
        percent(r.f)
    );
    manifest.finish(&a.out)
}

fn analogy_rank(a: AnalogyRank, mut manifest: RunManifest) -> Result<()> {
    if a.top_k < 1 {
        return Err(Usage("--top-k must be at least 1".into()).into());
    }
    let table = a.terms.load(&mut manifest)?;
    manifest.input(&a.questions)?;
    let questions = read_questions(&a.questions).with_context(|| format!("in {}", a.questions.display()))?;
    let store = load_store(&a.vectors, &table, &mut manifest)?;
    let experiment = RankExperiment::run(&questions, &store, a.top_k)?;
    let rows = cumulative_rank_table(&experiment.gold_ranks(), a.top_k)?;

    let table_path = a.table.clone().unwrap_or_else(|| sibling(&a.out, "table.csv"));
    write_atomic(&a.out, |w| Ok(experiment.write_csv(a.top_k, w)?))?;
    write_atomic(&table_path, |w| Ok(write_rank_table_csv(&rows, w)?))?;
    manifest.output(&a.out);
    manifest.output(&table_path);
    manifest.note("pool", experiment.pool.len());
    manifest.note("dropped", experiment.dropped.clone());

    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "pool of {} gold pairs ({} stems dropped as all-zero)",
        experiment.pool.len(),
        experiment.dropped.len()
    )?;
    for r in &rows {
        writeln!(
            stdout,
            "rank {:>3}: {:>4} {:>6}  cumulative {:>4} {:>6}",
            r.rank,
            r.matches,
            format!("{:.1}%", r.matches_percent),
            r.cumulative,
            format!("{:.1}%", r.cumulative_percent)
        )?;
    }
    manifest.finish(&a.out)
}

fn classify_with<L: ClassLabel>(
    run: &NounModRun<L>,
    a: &NounmodClassify,
    pairs: &[WordPair],
    manifest: &mut RunManifest,
) -> Result<()> {
    let outputs = run.outputs(a.threshold);
    let predictions: Vec<_> = outputs.iter().map(|o| o.prediction).collect();
    let report = relsim_core::metrics::per_class_prf(&predictions, &run.labels, L::ALL)?;
    let accuracy = relsim_core::metrics::accuracy(&predictions, &run.labels);

    let report_path = a.report.clone().unwrap_or_else(|| sibling(&a.out, "classes.csv"));
    write_atomic(&a.out, |w| Ok(run.write_csv(pairs, &outputs, w)?))?;
    write_atomic(&report_path, |w| Ok(write_per_class_csv(&report, w)?))?;
    manifest.output(&a.out);
    manifest.output(&report_path);
    manifest.note("macro_precision", report.macro_precision);
    manifest.note("macro_recall", report.macro_recall);
    manifest.note("macro_f", report.macro_f);
    manifest.note("accuracy", accuracy);
    println!(
        "macro precision {}, recall {}, F {}; accuracy {}",
        percent(report.macro_precision),
        percent(report.macro_recall),
        percent(report.macro_f),
        percent(accuracy)
    );
    Ok(())
}

fn nounmod_classify(a: NounmodClassify, mut manifest: RunManifest) -> Result<()> {
    let table = a.terms.load(&mut manifest)?;
    manifest.input(&a.data)?;
    let dataset = read_dataset(&a.data).with_context(|| format!("in {}", a.data.display()))?;
    let store = load_store(&a.vectors, &table, &mut manifest)?;
    let vectors = dataset_vectors(&dataset, &store)?;
    let pairs: Vec<WordPair> = dataset.iter().map(|d| d.pair()).collect();
    let run = NounModRun::new(dataset.iter().map(|d| d.class30).collect(), &vectors, a.seed)?;
    manifest.seed = Some(a.seed);
    manifest.threshold = Some(a.threshold);
    match a.classes {
        Classes::Thirty => classify_with(&run, &a, &pairs, &mut manifest)?,
        Classes::Five => classify_with(&run.relabel(Class30::collapse), &a, &pairs, &mut manifest)?,
    }
    manifest.finish(&a.out)
}

fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Usage(format!("--range expects from:to:step, got {spec:?}"));
    let [from, to, step] = parts[..] else {
        return Err(bad().into());
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    Ok(threshold_range(num(from)?, num(to)?, num(step)?).map_err(|e| Usage(e.to_string()))?)
}

fn eval_sweep(a: EvalSweep, mut manifest: RunManifest) -> Result<()> {
    let thresholds = match (&a.thresholds, &a.range) {
        (Some(list), _) => list.clone(),
        (None, Some(spec)) => parse_range(spec)?,
        (None, None) => unreachable!("clap requires one of --thresholds and --range"),
    };
    let table = a.terms.load(&mut manifest)?;
    manifest.seed = Some(a.seed);
    let task: Box<dyn ThresholdTask> = match a.task {
        Task::Analogy => {
            let path = a.questions.as_ref().expect("required by clap");
            manifest.input(path)?;
            let questions = read_questions(path).with_context(|| format!("in {}", path.display()))?;
            let store = load_store(&a.vectors, &table, &mut manifest)?;
            Box::new(AnalogyRun::new(score_questions(&questions, &store)?, a.seed))
        }
        Task::Nounmod => {
            let path = a.data.as_ref().expect("required by clap");
            manifest.input(path)?;
            let dataset = read_dataset(path).with_context(|| format!("in {}", path.display()))?;
            let store = load_store(&a.vectors, &table, &mut manifest)?;
            let vectors = dataset_vectors(&dataset, &store)?;
            let run = NounModRun::new(dataset.iter().map(|d| d.class30).collect(), &vectors, a.seed)?;
            match a.classes {
                Classes::Thirty => Box::new(run),
                Classes::Five => Box::new(run.relabel(Class30::collapse)),
            }
        }
    };
    let rows = sweep(task.as_ref(), &thresholds).map_err(|e| Usage(e.to_string()))?;
    write_atomic(&a.out, |w| Ok(write_sweep_csv(&rows, w)?))?;
    manifest.output(&a.out);
    manifest.note("thresholds", rows.len());
    println!("{} thresholds written to {}", rows.len(), a.out.display());
    manifest.finish(&a.out)
}

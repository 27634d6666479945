//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relsim_core::analogy::{cumulative_rank_table, decide, rank_by_cosine, read_questions};
use relsim_core::metrics::{accuracy, prf, Prediction};
use relsim_core::nounmod::{ClassLabel, NounModRun};
use relsim_core::patterns::{generate_queries, stem, QUERIES_PER_PAIR};
use relsim_core::relvec::cosine_components;
use relsim_core::seeding::item_rng;
use relsim_core::{Class30, Class5, CorpusIndex, DecisionKind, JoiningTermTable, RelationVector, WordPair};

const LIMIT: Duration = Duration::from_secs(60);

fn oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2003);
    let mut cases = 0;
    let mut nonzero = 0;
    for corpus in 0..100 {
        let docs = oracle::random_corpus(&mut rng, 1000, 50);
        assert!(docs.len() <= 1000);
        let index = CorpusIndex::build(&docs).unwrap();
        for _ in 0..100 {
            let pattern = oracle::random_pattern(&mut rng);
            let expected = oracle::naive_count(&docs, &pattern);
            let got = index.count_documents(&pattern);
            assert_eq!(got, expected, "corpus {corpus}, pattern {pattern}");
            cases += 1;
            nonzero += usize::from(expected > 0);
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(cases, 10_000);
    assert!(nonzero > 2_000, "only {nonzero} cases had matches");
    assert!(elapsed < LIMIT, "took {elapsed:?}");
    println!("    {cases} cases, {nonzero} with matches, {elapsed:.2?}");
}

fn stemming_golden() {
    let cases = [
        ("advertisement", "advertise*"),
        ("compliance", "complia*"),
        ("rhythm", "rhythm*"),
        ("up", "up"),
        ("ab", "ab"),
        ("abc", "abc*"),
        ("abcdefgh", "abcdefgh*"),
        ("abcdefghi", "abcdef*"),
        ("abcdefghij", "abcdefg*"),
        ("abcdefghijk", "abcdefg*"),
    ];
    for (word, expected) in cases {
        assert_eq!(stem(word).unwrap().stemmed, expected, "{word}");
    }
}

fn query_generation() {
    let table = JoiningTermTable::standard();
    let q = generate_queries(&WordPair::new("restrained", "limit"), &table).unwrap();
    assert!(q.queries().iter().any(|s| s == "restrai* * very limit*"));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut text = String::from("# synthetic question file\n");
    for i in 0..374 {
        let mut fields = vec![format!("q{i}")];
        for _ in 0..12 {
            let len = rng.gen_range(1..=14);
            fields.push((0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect());
        }
        fields.push(rng.gen_range(0..5).to_string());
        text.push_str(&fields.join("\t"));
        text.push('\n');
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("questions.tsv");
    std::fs::write(&path, text).unwrap();
    let questions = read_questions(&path).unwrap();
    assert_eq!(questions.len(), 374);
    let mut slots = 0;
    for question in &questions {
        for pair in question.pairs() {
            let n = generate_queries(pair, &table).unwrap().queries().len();
            assert_eq!(n, QUERIES_PER_PAIR, "{pair}");
            slots += n;
        }
    }
    assert_eq!(slots, 287_232);
}

fn margin_logic() {
    let cosines = [0.31874, 0.57234, 0.68757, 0.49725, 0.69265];
    let at = |t: f64| decide(&cosines, false, t, &mut item_rng(0, "traffic:street"));
    let d = at(0.0);
    assert_eq!(d.kind, DecisionKind::Guess(4));
    assert!((d.margin.unwrap() - 0.00508).abs() <= 1e-12, "margin {:?}", d.margin);
    for t in [0.0051, 0.01, 0.1] {
        assert_eq!(at(t).kind, DecisionKind::Skip, "t = {t}");
    }
    for t in [-0.0051, -0.01, -0.1] {
        assert_eq!(at(t).kind, DecisionKind::DoubleGuess(4, 2), "t = {t}");
    }
    for t in [-0.005, 0.005] {
        assert_eq!(at(t).kind, DecisionKind::Guess(4), "t = {t}");
    }
    assert_eq!(rank_by_cosine(&cosines), vec![4, 2, 1, 3, 0]);
}

fn within(actual: f64, expected_percent: f64) {
    assert!(
        (100.0 * actual - expected_percent).abs() <= 0.05,
        "{} vs {expected_percent}",
        100.0 * actual
    );
}

fn metric_arithmetic() {
    let r = prf(176, 369, 374).unwrap();
    within(r.precision, 47.7);
    within(r.recall, 47.1);
    within(r.f, 47.4);

    for (correct, expected) in [(167, 27.8), (274, 45.7)] {
        let gold = vec![Class5::Spatial; 600];
        let mut preds = vec![Prediction::Single(Class5::Quality); 600];
        for p in preds.iter_mut().take(correct) {
            *p = Prediction::Single(Class5::Spatial);
        }
        within(accuracy(&preds, &gold), expected);
    }

    let zero = prf(0, 0, 0).unwrap();
    assert_eq!((zero.precision, zero.recall, zero.f), (0.0, 0.0, 0.0));
    let none_right = prf(0, 10, 10).unwrap();
    assert_eq!(none_right.f, 0.0);
}

fn class_collapse() {
    let sizes = [
        ("ag", 36),
        ("ben", 9),
        ("cntr", 3),
        ("cont", 15),
        ("cs", 17),
        ("detr", 4),
        ("dir", 8),
        ("eff", 34),
        ("eq", 5),
        ("freq", 16),
        ("inst", 35),
        ("lat", 22),
        ("lfr", 21),
        ("loc", 5),
        ("mat", 32),
        ("meas", 30),
        ("obj", 33),
        ("obj_prop", 15),
        ("part", 9),
        ("posr", 30),
        ("prod", 16),
        ("prop", 49),
        ("prp", 31),
        ("src", 12),
        ("st", 9),
        ("tat", 30),
        ("top", 45),
        ("tthr", 6),
        ("type", 16),
        ("whl", 7),
    ];
    assert_eq!(sizes.len(), Class30::ALL.len());
    let mut groups = std::collections::BTreeMap::new();
    for (label, n) in sizes {
        *groups.entry(label.parse::<Class30>().unwrap().collapse()).or_insert(0) += n;
    }
    let got: Vec<(String, i32)> = groups.into_iter().map(|(g, n)| (g.to_string(), n)).collect();
    let expected = [
        ("causality", 86),
        ("participant", 260),
        ("quality", 146),
        ("spatial", 56),
        ("temporality", 52),
    ];
    assert_eq!(got, expected.map(|(g, n)| (g.to_string(), n)));
}

fn cumulative_rank_tables() {
    let rows = cumulative_rank_table(&[1, 1, 2], 2).unwrap();
    assert_eq!((rows[0].matches, rows[0].cumulative), (2, 2));
    assert_eq!((rows[1].matches, rows[1].cumulative), (1, 3));
    assert!((rows[0].matches_percent - 200.0 / 3.0).abs() < 1e-9);
    assert!((rows[1].cumulative_percent - 100.0).abs() < 1e-9);
    let empty = cumulative_rank_table(&[], 3).unwrap();
    assert!(empty
        .iter()
        .all(|r| r.matches == 0 && r.cumulative == 0 && r.cumulative_percent == 0.0));
    assert!(cumulative_rank_table(&[1], 0).is_err());

    let histogram = [31, 19, 13, 11, 6, 7, 9, 5, 5, 3];
    let percents = [8.4, 5.1, 3.5, 3.0, 1.6, 1.9, 2.4, 1.4, 1.4, 0.8];
    let cumulative = [31, 50, 63, 74, 80, 87, 96, 101, 106, 109];
    let cumulative_percents = [8.4, 13.6, 17.1, 20.1, 21.7, 23.6, 26.0, 27.4, 28.7, 29.5];
    let mut ranks = Vec::new();
    for (i, &n) in histogram.iter().enumerate() {
        ranks.extend(std::iter::repeat_n(i + 1, n));
    }
    ranks.extend(std::iter::repeat_n(50, 369 - ranks.len()));
    let rows = cumulative_rank_table(&ranks, 10).unwrap();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.rank, i + 1);
        assert_eq!(row.matches, histogram[i]);
        assert_eq!(row.cumulative, cumulative[i]);
        assert!((row.matches_percent - percents[i]).abs() <= 0.05, "rank {}", i + 1);
        assert!(
            (row.cumulative_percent - cumulative_percents[i]).abs() <= 0.05,
            "rank {}",
            i + 1
        );
    }
}

fn vector(i: usize, counts: Vec<u64>) -> RelationVector {
    RelationVector::from_counts(WordPair::new(format!("m{i}"), "h"), counts, Arc::from("t"))
}

fn loocv_properties() {
    // Identical vectors within each class.
    let labels: Vec<Class30> = (0..90).map(|i| Class30::ALL[i % 30]).collect();
    let vectors: Vec<RelationVector> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut counts = vec![0; 128];
            counts[Class30::ALL.iter().position(|c| c == l).unwrap()] = 7;
            counts[127] = 2;
            vector(i, counts)
        })
        .collect();
    let refs: Vec<&RelationVector> = vectors.iter().collect();
    let run = NounModRun::new(labels.clone(), &refs, 0).unwrap();
    for (p, g) in run.predictions(0.0).into_iter().zip(&labels) {
        assert_eq!(p, Prediction::Single(*g));
    }
    assert_eq!(run.accuracy(0.0), 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let thresholds: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.01).collect();
    for dataset in 0..200 {
        let n = rng.gen_range(3..50);
        let labels: Vec<Class30> = (0..n).map(|_| Class30::ALL[rng.gen_range(0..30)]).collect();
        let vectors: Vec<RelationVector> = (0..n)
            .map(|i| {
                vector(
                    i,
                    (0..128).map(|k| if k < 6 { rng.gen_range(0..4) } else { 0 }).collect(),
                )
            })
            .collect();
        let refs: Vec<&RelationVector> = vectors.iter().collect();
        let seed = rng.gen();
        let fine = NounModRun::new(labels.clone(), &refs, seed).unwrap();
        for (i, nb) in fine.neighbours.iter().enumerate() {
            assert!(
                nb.first != i && nb.second != i,
                "dataset {dataset}: item {i} is its own neighbour"
            );
        }

        let mut abstained = vec![false; n];
        for &t in &thresholds {
            for (i, p) in fine.predictions(t).into_iter().enumerate() {
                let now = p == Prediction::Abstain;
                assert!(
                    !abstained[i] || now,
                    "dataset {dataset}: abstention not monotone at t = {t}"
                );
                abstained[i] = now;
            }
        }

        let coarse = NounModRun::new(
            labels.iter().map(|l| l.collapse()).collect::<Vec<Class5>>(),
            &refs,
            seed,
        )
        .unwrap();
        assert_eq!(coarse.neighbours, fine.neighbours, "dataset {dataset}");
        let t = rng.gen_range(-0.1..0.1);
        for (f, c) in fine.predictions(t).into_iter().zip(coarse.predictions(t)) {
            let expected_ok = match f {
                Prediction::Single(a) => c == Prediction::Single(a.collapse()),
                Prediction::Double(a, b) if a.collapse() == b.collapse() => c == Prediction::Single(a.collapse()),
                Prediction::Double(a, b) => c == Prediction::Double(a.collapse(), b.collapse()),
                Prediction::Abstain => matches!(c, Prediction::Abstain | Prediction::Single(_)),
            };
            assert!(expected_ok, "dataset {dataset}: {f:?} vs {c:?}");
        }
    }
}

fn cosine_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let zero = vec![0.0; 128];
    for _ in 0..10_000 {
        let mut draw = || -> Vec<f64> {
            let density = rng.gen_range(0.0..1.0);
            (0..128)
                .map(|_| {
                    if rng.gen_bool(density) {
                        rng.gen_range(0.0..15.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let a = draw();
        let b = draw();
        let ab = cosine_components(&a, &b);
        assert_eq!(ab, cosine_components(&b, &a));
        assert!((0.0..=1.0).contains(&ab), "{ab}");
        let k = rng.gen_range(1e-3..1e3);
        let scaled: Vec<f64> = a.iter().map(|x| x * k).collect();
        assert!((cosine_components(&scaled, &b) - ab).abs() <= 1e-12);
        assert_eq!(cosine_components(&a, &zero), 0.0);
        assert!((ab - oracle::naive_cosine(&a, &b)).abs() <= 1e-12);
    }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Runs the whole pipeline into `dir` and returns every CSV it wrote.
fn pipeline(dir: &Path, jobs: Option<usize>) -> Vec<(String, Vec<u8>)> {
    let run = |args: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_relsim"));
        if let Some(n) = jobs {
            cmd.arg("--jobs").arg(n.to_string());
        }
        let out = cmd.args(args).current_dir(dir).output().unwrap();
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    let corpus = data("mini_corpus.txt");
    let questions = data("questions.tsv");
    let nounmod = data("nounmod.tsv");
    let pairs = data("pairs.tsv");
    let (corpus, questions, nounmod, pairs) = (
        corpus.to_str().unwrap(),
        questions.to_str().unwrap(),
        nounmod.to_str().unwrap(),
        pairs.to_str().unwrap(),
    );
    run(&[
        "index",
        "build",
        "--corpus",
        corpus,
        "--doc-mode",
        "blankline",
        "--out",
        "mini.idx",
    ]);
    run(&[
        "vectors",
        "build",
        "--pairs",
        pairs,
        "--questions",
        questions,
        "--data",
        nounmod,
        "--index",
        "mini.idx",
        "--cache",
        "counts.cache",
        "--out",
        "mini.vec",
    ]);
    run(&[
        "analogy",
        "solve",
        "--questions",
        questions,
        "--vectors",
        "mini.vec",
        "--threshold",
        "0",
        "--seed",
        "0",
        "--out",
        "solve.csv",
    ]);
    run(&[
        "analogy",
        "solve",
        "--questions",
        questions,
        "--vectors",
        "mini.vec",
        "--threshold",
        "-0.05",
        "--seed",
        "9",
        "--out",
        "solve_neg.csv",
    ]);
    run(&[
        "analogy",
        "rank",
        "--questions",
        questions,
        "--vectors",
        "mini.vec",
        "--top-k",
        "10",
        "--out",
        "rank.csv",
    ]);
    for classes in ["30", "5"] {
        run(&[
            "nounmod",
            "classify",
            "--data",
            nounmod,
            "--vectors",
            "mini.vec",
            "--classes",
            classes,
            "--threshold",
            "0",
            "--seed",
            "0",
            "--out",
            &format!("nounmod{classes}.csv"),
        ]);
    }
    run(&[
        "eval",
        "sweep",
        "--task",
        "analogy",
        "--questions",
        questions,
        "--vectors",
        "mini.vec",
        "--range=-0.11:0.11:0.01",
        "--out",
        "sweep_analogy.csv",
    ]);
    run(&[
        "eval",
        "sweep",
        "--task",
        "nounmod",
        "--data",
        nounmod,
        "--vectors",
        "mini.vec",
        "--classes",
        "5",
        "--range=-0.03:0.03:0.01",
        "--out",
        "sweep_nounmod.csv",
    ]);

    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv") || p.extension().is_some_and(|e| e == "vec"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn end_to_end_determinism() {
    let start = Instant::now();
    let runs: Vec<Vec<(String, Vec<u8>)>> = [None, None, Some(1), Some(8)]
        .into_iter()
        .map(|jobs| {
            let dir = tempfile::tempdir().unwrap();
            pipeline(dir.path(), jobs)
        })
        .collect();
    let elapsed = start.elapsed();
    let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.len() >= 10, "{names:?}");
    for (i, other) in runs.iter().enumerate().skip(1) {
        assert_eq!(other.len(), runs[0].len());
        for ((name, a), (_, b)) in runs[0].iter().zip(other) {
            assert!(a == b, "{name} differs in run {i}");
        }
    }
    assert!(elapsed < LIMIT, "took {elapsed:?}");
    println!("    {} files per run, 4 runs, {elapsed:.2?}", names.len());
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        (
            "phrase counts equal naive scan on 10,000 random cases",
            oracle_equivalence,
        ),
        ("stemming examples and length boundaries", stemming_golden),
        (
            "query generation: 128 per pair, worked example, 287,232 slots",
            query_generation,
        ),
        ("margin logic on traffic:street cosines", margin_logic),
        ("precision/recall/F and accuracy arithmetic", metric_arithmetic),
        ("30-to-5 class collapse sizes", class_collapse),
        ("cumulative rank table", cumulative_rank_tables),
        ("leave-one-out classifier properties", loocv_properties),
        ("cosine properties on 10,000 random pairs", cosine_properties),
        ("end-to-end determinism on the bundled sample", end_to_end_determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(()) => println!("PASS  {name}"),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL  {name}: {msg}");
                failed.push(name);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

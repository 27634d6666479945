use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use relsim_core::patterns::{generate_queries, parse_pattern};
use relsim_core::relvec::{CountCache, IndexProvider};
use relsim_core::{CorpusIndex, JoiningTermTable, VectorStore, WordPair};

fn index_build(c: &mut Criterion) {
    let docs = relsim_bench::corpus(20_000, 1);
    c.bench_function("index_build_20k_docs", |b| {
        b.iter(|| CorpusIndex::build(black_box(&docs)).unwrap())
    });
}

fn count_documents(c: &mut Criterion) {
    let index = CorpusIndex::build(&relsim_bench::corpus(20_000, 1)).unwrap();
    let mut group = c.benchmark_group("count_documents");
    for query in [
        "water in the riverbed",
        "water* in the riverbed*",
        "restrai* * very limit*",
        "the * of",
    ] {
        let pattern = parse_pattern(query).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(query), &pattern, |b, p| {
            b.iter(|| index.count_documents(black_box(p)))
        });
    }
    group.finish();
}

fn relation_vectors(c: &mut Criterion) {
    let index = CorpusIndex::build(&relsim_bench::corpus(5_000, 2)).unwrap();
    let table = JoiningTermTable::standard();
    let provider = IndexProvider::new(&index);
    let pairs = vec![
        WordPair::new("traffic", "street"),
        WordPair::new("water", "riverbed"),
        WordPair::new("mason", "stone"),
        WordPair::new("carpenter", "wood"),
    ];
    c.bench_function("generate_queries", |b| {
        b.iter(|| generate_queries(black_box(&pairs[0]), &table).unwrap())
    });
    c.bench_function("vectors_4_pairs_uncached", |b| {
        b.iter(|| VectorStore::build(&pairs, &table, &provider, &CountCache::in_memory()).unwrap())
    });
}

criterion_group!(benches, index_build, count_documents, relation_vectors);
criterion_main!(benches);

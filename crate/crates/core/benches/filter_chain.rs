//! Throughput of the per-record filter chain, the engineering target the
//! toolkit documents: ≥ 50,000 records/second through the stateless
//! stages on one core for average-length sentences.
//!
//! Run with `cargo bench -p bitext-core`. The numbers that count are from
//! this optimized build; `cargo test` runs the same chain at a lower
//! optimization level and measures accordingly.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::path::PathBuf;

use bitext_core::content::ContentConfig;
use bitext_core::dedup::{dedup_pass, DedupConfig};
use bitext_core::ingest::FilePairSource;
use bitext_core::langscript::{builtin_profiles, LangScriptConfig};
use bitext_core::model::{LanguageCode, NormalizedRecord};
use bitext_core::pipeline::{judge_records, DatasetEntry, FilterKind, CANONICAL_ORDER};
use bitext_core::synthbench::generate_clean;

fn lang(code: &str) -> LanguageCode {
    LanguageCode::new(code).unwrap()
}

fn entry_with(filters: Vec<FilterKind>) -> DatasetEntry {
    DatasetEntry {
        source: FilePairSource {
            dataset_id: "bench".to_string(),
            src_path: PathBuf::from("unused.src"),
            tgt_path: PathBuf::from("unused.tgt"),
            src_lang: lang("en"),
            tgt_lang: lang("id"),
        },
        enabled_filters: filters,
        dedup: DedupConfig::default(),
        langscript: LangScriptConfig::default(),
        content: ContentConfig::default(),
    }
}

fn corpus(count: usize) -> Vec<NormalizedRecord> {
    generate_clean(count, 31, "bench", lang("en"), lang("id"))
        .into_iter()
        .map(NormalizedRecord::new)
        .collect()
}

fn bench_stateless_chain(c: &mut Criterion) {
    let records = corpus(10_000);
    let profiles = builtin_profiles();
    // One rayon thread = one core, the unit the target is stated in.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();

    let stateless: Vec<FilterKind> = CANONICAL_ORDER
        .iter()
        .copied()
        .filter(|kind| *kind != FilterKind::Dedup)
        .collect();
    let content_only = vec![
        FilterKind::Length,
        FilterKind::Symbol,
        FilterKind::Keyword,
        FilterKind::Number,
    ];
    let language_only = vec![FilterKind::Language, FilterKind::Script];

    let mut group = c.benchmark_group("stateless_chain");
    group.throughput(Throughput::Elements(records.len() as u64));
    for (name, filters) in [
        ("full", stateless),
        ("content_only", content_only),
        ("language_and_script", language_only),
    ] {
        let entry = entry_with(filters);
        group.bench_with_input(BenchmarkId::from_parameter(name), &entry, |b, entry| {
            b.iter(|| pool.install(|| judge_records(&records, entry, profiles)));
        });
    }
    group.finish();
}

fn bench_dedup_pass(c: &mut Criterion) {
    let records = corpus(10_000);
    let config = DedupConfig::default();
    let mut group = c.benchmark_group("dedup");
    group.throughput(Throughput::Elements(records.len() as u64));
    group.bench_function("pass_10k_unique", |b| {
        b.iter(|| dedup_pass(&records, &config));
    });
    group.finish();
}

criterion_group!(benches, bench_stateless_chain, bench_dedup_pass);
criterion_main!(benches);

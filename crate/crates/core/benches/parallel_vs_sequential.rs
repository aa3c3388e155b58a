use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use schemamatch::config::{MatchConfig, TableStrategy};
use schemamatch::embedding::HashProvider;
use schemamatch::exec::Execution;
use schemamatch::representation::ColumnStore;
use schemamatch::sampling::{SamplingConfig, SamplingStrategy};
use schemamatch::schema::{Attribute, Schema, Table};
use schemamatch::table_matcher::match_tables;

const WORDS: [&str; 16] = [
    "north", "river", "stone", "amber", "field", "cloud", "maple", "ridge", "harbor", "lumen", "cedar", "delta",
    "orbit", "quill", "sable", "tundra",
];

// small deterministic generator so the bench has no rng dependency
fn word(state: &mut u64) -> &'static str {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    WORDS[(*state >> 60) as usize]
}

fn schema(name: &str, tables: usize, columns: usize, rows: usize, seed: u64) -> Schema {
    let mut state = seed;
    let tables = (0..tables)
        .map(|t| {
            let mut table = Table::new(format!("{}_{t}", word(&mut state)));
            for c in 0..columns {
                let values: Vec<String> = (0..rows)
                    .map(|_| format!("{} {} {}", word(&mut state), word(&mut state), word(&mut state)))
                    .collect();
                table = table.with_attribute(Attribute::new(format!("{}_{c}", word(&mut state))).with_instances(values));
            }
            table
        })
        .collect();
    Schema::new(name, tables).unwrap()
}

fn modes() -> [(&'static str, Execution); 2] {
    [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)]
}

fn column_store(c: &mut Criterion) {
    let provider = HashProvider::default();
    let s = schema("bench", 4, 8, 2000, 1);
    let cfg = SamplingConfig {
        strategy: SamplingStrategy::None,
        ..SamplingConfig::default()
    };
    let mut group = c.benchmark_group("column_store");
    group.sample_size(10);
    for (label, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &mode, |b, &mode| {
            b.iter(|| ColumnStore::build(&provider, &s, &cfg, mode).unwrap())
        });
    }
    group.finish();
}

fn table_matching(c: &mut Criterion) {
    let provider = HashProvider::default();
    let source = schema("src", 12, 6, 300, 2);
    let target = schema("tgt", 12, 6, 300, 3);
    let mut group = c.benchmark_group("table_matching");
    group.sample_size(10);
    for (label, mode) in modes() {
        let cfg = MatchConfig {
            strategy: TableStrategy::Instance,
            execution: mode,
            ..MatchConfig::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(label), &cfg, |b, cfg| {
            b.iter(|| match_tables(&source, &target, &provider, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, column_store, table_matching);
criterion_main!(benches);

//! Sequential against rayon-parallel execution for the document-level stages.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gramfuse::fuse::hash_embed_all;
use gramfuse::grammar::{extract_all, FunctionWordSet, GrammarConfig, GRAMMAR_DIM};
use gramfuse::matrix::Matrix;
use gramfuse::model::{init_head, predict_with, HeadConfig};
use gramfuse::par::Execution;
use gramfuse::synthetic::{generate, SyntheticSpec};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn stages(c: &mut Criterion) {
    let docs = generate(&SyntheticSpec {
        documents: 2000,
        ..SyntheticSpec::default()
    })
    .expect("synthetic corpus");
    let fset = FunctionWordSet::builtin();
    let cfg = GrammarConfig::default();

    let mut group = c.benchmark_group("extract");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| extract_all(black_box(&docs), &fset, &cfg, exec).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("hash_embed");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| hash_embed_all(black_box(&docs), 256, 0, exec).unwrap())
        });
    }
    group.finish();

    let dim = 256 + GRAMMAR_DIM;
    let rows = 20_000;
    let x = Matrix::from_vec(
        rows,
        dim,
        (0..rows * dim)
            .map(|i| ((i * 7919) % 1000) as f64 / 500.0 - 1.0)
            .collect(),
    )
    .expect("feature matrix");
    let mut head = init_head(HeadConfig {
        hidden_dim: 64,
        ..HeadConfig::new(dim, 17)
    })
    .expect("head");
    head.fitted = true;
    let mut group = c.benchmark_group("predict");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| predict_with(&head, black_box(&x), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = stages
}
criterion_main!(benches);

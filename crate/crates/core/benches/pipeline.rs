//! Closure, augmentation and decoding over synthetic documents.
//!
//! With `parallel` each stage runs once in a one-thread rayon pool and once in
//! the default pool; built with `--no-default-features` only the sequential
//! path is measured.
//!
//!     cargo bench -p ifp-core
//!     cargo bench -p ifp-core --no-default-features

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ifp_core::corpus::Document;
use ifp_core::dataset::{augment_closure, build_training_sets, intervals_to_points};
use ifp_core::decoder::{classify_documents, GoldOracle, RelationSet};
use ifp_core::synth::{generate_documents, SynthConfig};

fn corpus() -> Vec<Document> {
    generate_documents(&SynthConfig {
        documents: 48,
        entities_per_doc: 12,
        links_per_doc: 24,
        grid: 16,
        seed: 1,
    })
}

fn stages(c: &mut Criterion, label: &str, run: &dyn Fn(&mut (dyn FnMut() + Send))) {
    let docs = corpus();
    let points = intervals_to_points(&docs);
    let oracle = GoldOracle::new(&docs, 0.1, 0);

    let mut group = c.benchmark_group("pipeline");
    group.sample_size(20);
    group.bench_function(BenchmarkId::new("closure", label), |b| {
        b.iter(|| run(&mut || drop(augment_closure(&points))))
    });
    group.bench_function(BenchmarkId::new("training_sets", label), |b| {
        b.iter(|| run(&mut || drop(build_training_sets(&docs, 0))))
    });
    group.bench_function(BenchmarkId::new("classify", label), |b| {
        b.iter(|| run(&mut || drop(classify_documents(&docs, &oracle, RelationSet::Full).unwrap())))
    });
    group.finish();
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    stages(c, "1-thread", &|f| single.install(&mut *f));
    let label = format!("{}-threads", rayon::current_num_threads());
    stages(c, &label, &|f| f());
}

#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    stages(c, "sequential", &|f| f());
}

criterion_group!(benches, bench);
criterion_main!(benches);

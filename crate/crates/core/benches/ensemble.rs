use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use connected_cm::experiments::{connected_fraction, giant_samples, simple_fraction};
use connected_cm::oracle::enumerate_counts_with;
use connected_cm::par::Execution;
use connected_cm::{DegreeDistribution, TypeSequence};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn replicates(c: &mut Criterion) {
    let t = TypeSequence::from_pairs(&[(1, 250), (4, 250)]).unwrap();
    let mut group = c.benchmark_group("replicates_n500");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("connected", name), |b| {
            b.iter(|| connected_fraction(&t, 2_000, 1, exec).unwrap())
        });
        group.bench_function(BenchmarkId::new("simple", name), |b| b.iter(|| simple_fraction(&t, 2_000, 1, exec).unwrap()));
    }
    group.finish();
}

fn giants(c: &mut Criterion) {
    let p = DegreeDistribution::from_pairs(&[(1, 0.5), (4, 0.5)]).unwrap();
    let mut group = c.benchmark_group("giant_n10000");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| giant_samples(&p, 0.05, 10_000, 20, 1, exec).unwrap()));
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let t = TypeSequence::from_pairs(&[(1, 4), (2, 3), (4, 1)]).unwrap();
    let mut group = c.benchmark_group("enumerate_l14");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| enumerate_counts_with(&t, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, replicates, giants, enumeration);
criterion_main!(benches);

//! Sequential versus data-parallel execution of the three chunked workloads:
//! exact typicality enumeration, Monte Carlo trials and k-fold derangement counting.
//!
//! Without the `parallel` feature both variants run the sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use permtypical::counting::exact_kfold_derangements_with;
use permtypical::dist::JointDistribution;
use permtypical::montecarlo::{estimate_typicality_prob, exact_typicality_prob_with, TrialConfig};
use permtypical::{Execution, Permutation, PermutationVector};

fn modes() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel { threads: None }),
    ]
}

fn exact_enumeration(c: &mut Criterion) {
    let d = JointDistribution::dsbs(0.1).unwrap();
    let mut group = c.benchmark_group("exact_enumeration");
    group.sample_size(10);
    for n in [6usize, 8] {
        let pv = PermutationVector::pair(Permutation::standard_ordered(0, &[n - 2, 2]).unwrap());
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| exact_typicality_prob_with(&d, &pv, n, black_box(0.1), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let d = JointDistribution::dsbs(0.1).unwrap();
    let pv = PermutationVector::pair(Permutation::standard_ordered(4, &[10, 6]).unwrap());
    let cfg = TrialConfig::new(d, pv, 0.1, 20_000, 7).unwrap();
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| estimate_typicality_prob(black_box(&cfg), exec).unwrap())
        });
    }
    group.finish();
}

fn kfold_counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("kfold_derangements");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::new(name, "n6_k3"), |b| {
            b.iter(|| exact_kfold_derangements_with(black_box(6), 3, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exact_enumeration, monte_carlo, kfold_counting);
criterion_main!(benches);

use std::collections::HashMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ggjet::asymptotics::{chi_gr, kernel_sum_exact, kernel_sum_f64, polylog_sum, tight_path_count};
use ggjet::cohomology::{chi_schur_exact, HypersurfaceContext};
use ggjet::delta::all_relations;
use ggjet::error::DEFAULT_MAX_CELLS;
use ggjet::jets::{gg_rank, JetConfig};
use ggjet::young::{count_ssyt, multiplicity_table};
use ggjet::Partition;

fn young(c: &mut Criterion) {
    let shape = Partition::new(vec![6, 4, 2], 3).unwrap();
    c.bench_function("count_ssyt (6,4,2) kappa=5 m=36", |b| {
        b.iter(|| count_ssyt(black_box(&shape), 5, 36))
    });
    let mut g = c.benchmark_group("multiplicity_table");
    for m in [8u64, 12, 16] {
        g.bench_with_input(BenchmarkId::new("n=3 kappa=3", m), &m, |b, &m| {
            b.iter(|| multiplicity_table(3, 3, m, DEFAULT_MAX_CELLS).unwrap())
        });
    }
    g.finish();
    c.bench_function("gg_rank n=4 kappa=4 m=60", |b| {
        let cfg = JetConfig::new(4, 4, 60).unwrap();
        b.iter(|| gg_rank(black_box(&cfg), 1000).unwrap())
    });
}

fn cohomology(c: &mut Criterion) {
    let ctx = HypersurfaceContext::new(3, 9).unwrap();
    let shape = Partition::new(vec![7, 4, 2], 3).unwrap();
    c.bench_function("chi_schur_exact n=3 (7,4,2)", |b| {
        b.iter(|| chi_schur_exact(&ctx, black_box(&shape), 0).unwrap())
    });
    let ctx = HypersurfaceContext::new(2, 7).unwrap();
    c.bench_function("chi_gr n=2 kappa=2 m=14", |b| {
        b.iter(|| chi_gr(&ctx, 2, 14, DEFAULT_MAX_CELLS, &mut HashMap::new()).unwrap())
    });
}

fn asymptotics(c: &mut Criterion) {
    c.bench_function("polylog_sum kappa=1000 q=3", |b| b.iter(|| polylog_sum(black_box(1000), 3)));
    c.bench_function("tight_path_count depth 3", |b| {
        b.iter(|| tight_path_count(black_box(&[1, 2, 3]), black_box(&[6, 9, 12])).unwrap())
    });
    let mut g = c.benchmark_group("kernel_sum n=3 alpha=(6,0)");
    for kappa in [10u32, 20, 40] {
        g.bench_with_input(BenchmarkId::new("f64", kappa), &kappa, |b, &k| {
            b.iter(|| kernel_sum_f64(3, k, &[6, 0]).unwrap())
        });
    }
    g.bench_function("exact/6", |b| b.iter(|| kernel_sum_exact(3, 6, &[6, 0]).unwrap()));
    g.finish();
}

fn pluecker(c: &mut Criterion) {
    c.bench_function("all_relations n=3 kappa=5", |b| b.iter(|| all_relations(3, black_box(5))));
}

criterion_group!(benches, young, cohomology, asymptotics, pluecker);
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use pflow_bench::{dense, psd_problem};
use pflow_core::linalg::{project_rank, project_rank_psd, svd};

fn decompositions(c: &mut Criterion) {
    let mut group = c.benchmark_group("decomp");
    for n in [20, 40, 80] {
        let a = dense(n, n, 1);
        let s = a.symmetrized();
        group.bench_with_input(BenchmarkId::new("svd", n), &a, |b, a| b.iter(|| svd(black_box(a)).unwrap()));
        group.bench_with_input(BenchmarkId::new("project_rank", n), &a, |b, a| {
            b.iter(|| project_rank(black_box(a), 3).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("project_rank_psd", n), &s, |b, s| {
            b.iter(|| project_rank_psd(black_box(s), 3).unwrap())
        });
    }
    group.finish();
}

fn operator(c: &mut Criterion) {
    let mut group = c.benchmark_group("operator");
    for (n, m) in [(20, 400), (40, 800)] {
        let p = psd_problem(n, 2, m);
        let x = dense(n, n, 2);
        let z = dense(m, 1, 3).into_vec();
        group.bench_function(BenchmarkId::new("apply", n), |b| b.iter(|| p.op.apply(black_box(&x)).unwrap()));
        group.bench_function(BenchmarkId::new("adjoint", n), |b| b.iter(|| p.op.adjoint(black_box(&z)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, decompositions, operator);
criterion_main!(benches);

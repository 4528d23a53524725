use cartan_core::minimality::{sample_zero_locus, sample_zero_locus_sequential, CoordinatePoly};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("zero_locus_sampling");
    for (name, text) in [("clifford", "x0*x3 - x1*x2"), ("lawson", "-2*x0*x1*x2 + x3*(x1^2 - x2^2)")] {
        let f = CoordinatePoly::parse(text).unwrap();
        for n in [256usize, 4096] {
            group.bench_with_input(BenchmarkId::new(format!("{name}/sequential"), n), &n, |b, &n| {
                b.iter(|| sample_zero_locus_sequential(black_box(&f), n, 1).unwrap())
            });
            group.bench_with_input(BenchmarkId::new(format!("{name}/default"), n), &n, |b, &n| {
                b.iter(|| sample_zero_locus(black_box(&f), n, 1).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sampling);
criterion_main!(benches);

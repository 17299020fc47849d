use criterion::{criterion_group, criterion_main, Criterion};
use isrgame_bench::{nakagami, rician};
use std::hint::black_box;

fn bench(c: &mut Criterion) {
    let models = [
        ("nakagami", nakagami(1.5, 0.5, 1.0, 1e4)),
        ("rician_k4", rician(4.0, 1.0, 1.0, 1e4)),
    ];
    let mut g = c.benchmark_group("isr_cdf");
    for (name, p) in &models {
        g.bench_function(format!("{name}/closed_form"), |b| {
            b.iter(|| p.isr_cdf(black_box(1.7)).unwrap())
        });
        g.bench_function(format!("{name}/quadrature"), |b| {
            b.iter(|| p.isr_cdf_quadrature(black_box(1.7)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);

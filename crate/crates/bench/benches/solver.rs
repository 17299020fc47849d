use criterion::{criterion_group, criterion_main, Criterion};
use isrgame_bench::{nakagami, rayleigh, rician};
use isrgame_core::find_fixed_points;
use std::hint::black_box;

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("find_fixed_points");
    g.sample_size(20);
    let cases = [
        ("rayleigh_sym", rayleigh(1.0, 1e4), rayleigh(1.0, 1e4)),
        (
            "rayleigh_weak_strong",
            rayleigh(0.25, 1e4),
            rayleigh(1.0, 1e4),
        ),
        (
            "nakagami",
            nakagami(0.5, 1.0, 1.0, 1e4),
            nakagami(0.5, 1.0, 1.0, 1e4),
        ),
        (
            "rician",
            rician(2.0, 2.0, 1.0, 1e4),
            rician(2.0, 2.0, 1.0, 1e4),
        ),
    ];
    for (name, p1, p2) in &cases {
        g.bench_function(format!("{name}/grid2000"), |b| {
            b.iter(|| find_fixed_points(p1, p2, black_box(2000)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);

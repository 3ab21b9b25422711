use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rectdim::applications::{
    mult_dim, simultaneous_dim, Factor, MultiplicativeInstance, SimultaneousInstance,
};
use rectdim::{compute_s, ExponentProfile, ProductSpaceSpec};

fn instance(d: usize) -> (ProductSpaceSpec, ExponentProfile) {
    let deltas = (0..d).map(|i| 0.5 + 0.5 * (i as f64 / d as f64)).collect();
    let a = (0..d).map(|i| 1.0 + 0.3 * i as f64).collect();
    let t = (0..d).map(|i| 0.2 * ((i * 7) % 5) as f64).collect();
    (
        ProductSpaceSpec::new(deltas, 0.2).unwrap(),
        ExponentProfile::new(a, t).unwrap(),
    )
}

fn compute(c: &mut Criterion) {
    let mut g = c.benchmark_group("compute_s");
    for d in [2, 8, 32, 128] {
        let (space, profile) = instance(d);
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| {
                compute_s(black_box(&space), black_box(&profile))
                    .unwrap()
                    .value
            })
        });
    }
    g.finish();
}

fn applications(c: &mut Criterion) {
    let tau: Vec<f64> = (1..=16).map(|i| 1.0 / i as f64).collect();
    let inst = SimultaneousInstance::new(&tau).unwrap();
    c.bench_function("simultaneous_dim/16", |b| {
        b.iter(|| simultaneous_dim(black_box(&inst)).unwrap().value)
    });

    let mult = MultiplicativeInstance::from_factors(
        Factor::new(16f64.ln(), 1.0).unwrap(),
        Factor::new(4f64.ln(), 0.5).unwrap(),
        1.0,
    )
    .unwrap();
    c.bench_function("mult_dim/exceptional", |b| {
        b.iter(|| mult_dim(black_box(&mult)).unwrap().dim)
    });
}

criterion_group!(benches, compute, applications);
criterion_main!(benches);

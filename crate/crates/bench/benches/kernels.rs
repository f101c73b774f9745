use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nlyoung::frac_calc::toeplitz::backward_sums_direct;
use nlyoung::frac_calc::{backward_sums, QuadratureConfig};
use nlyoung::grid_fields::{make_product_field, Elementary, Regularity, Weierstrass};
use nlyoung::nonlinear_young::{riemann_sum, FractionalIntegrator, Germ};
use nlyoung::pinned::reference_case;

fn toeplitz(c: &mut Criterion) {
    let mut g = c.benchmark_group("backward_sums");
    for k in [8u32, 12, 16] {
        let n = 1usize << k;
        let w: Vec<f64> = (0..n).map(|d| (d as f64 + 1.0).powf(-0.6)).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.01).sin()).collect();
        g.bench_with_input(BenchmarkId::new("fft", n), &n, |b, _| b.iter(|| backward_sums(black_box(&w), black_box(&x))));
        if k <= 12 {
            g.bench_with_input(BenchmarkId::new("direct", n), &n, |b, _| {
                b.iter(|| backward_sums_direct(black_box(&w), black_box(&x)))
            });
        }
    }
    g.finish();
}

fn fractional(c: &mut Criterion) {
    let case = reference_case();
    let mut g = c.benchmark_group("fractional_evaluate");
    g.sample_size(10);
    for k in [12u32, 14, 16] {
        let fi = FractionalIntegrator::new(QuadratureConfig::with_nodes(1 << k)).diagnostics(false);
        g.bench_with_input(BenchmarkId::new("reference", 1 << k), &k, |b, _| {
            b.iter(|| fi.evaluate(case.field.as_ref(), case.path.as_ref(), &case.reg, case.a, case.b).unwrap())
        });
    }
    let w = make_product_field(Arc::new(Weierstrass::new(0.6, 16, 2.0, &[]).unwrap()), Elementary::Sin.shared());
    let reg = Regularity::new(0.6, 1.0, 1.0);
    let fi = FractionalIntegrator::new(QuadratureConfig::with_nodes(1 << 14)).diagnostics(false);
    g.bench_function("weierstrass_sin", |b| b.iter(|| fi.evaluate(&w, &Elementary::identity(), &reg, 0.0, 1.0).unwrap()));
    g.finish();
}

fn sewing(c: &mut Criterion) {
    let case = reference_case();
    let germ = Germ::new(case.field.as_ref(), case.path.as_ref());
    let mut g = c.benchmark_group("riemann_sum");
    for k in [10usize, 14, 18] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| b.iter(|| riemann_sum(&germ, case.a, case.b, k)));
    }
    g.finish();
}

criterion_group!(benches, toeplitz, fractional, sewing);
criterion_main!(benches);

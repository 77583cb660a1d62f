use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mixnorm_bench::{fiber, gaussian, points};
use mixnorm_core::littlewood_paley::LPFamily;
use mixnorm_core::maximal::{fiber_max_brute, fiber_max_fast};
use mixnorm_core::mixed_grid::dft_forward;
use mixnorm_core::spaces::{tl_norm, SpaceKind, SpaceParams};
use mixnorm_core::{aniso_norm, AnisotropyVector, ExponentVector};

fn dft(c: &mut Criterion) {
    let mut group = c.benchmark_group("dft_forward");
    for (n, samples) in [(1, 4096), (2, 128), (2, 256), (3, 32)] {
        let f = gaussian(n, samples, 8.0);
        group.bench_with_input(BenchmarkId::new(format!("{n}d"), samples), &f, |b, f| {
            b.iter(|| dft_forward(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn directional_max(c: &mut Criterion) {
    let mut group = c.benchmark_group("fiber_max");
    for len in [256, 1024, 4096] {
        let v = fiber(len, 7);
        group.bench_with_input(BenchmarkId::new("fast", len), &v, |b, v| b.iter(|| fiber_max_fast(black_box(v))));
        if len <= 1024 {
            group.bench_with_input(BenchmarkId::new("brute", len), &v, |b, v| b.iter(|| fiber_max_brute(black_box(v))));
        }
    }
    group.finish();
}

fn anisotropic_norm(c: &mut Criterion) {
    let a = AnisotropyVector::new(vec![1.0, 2.0, 3.5]).unwrap();
    let xs = points(3, 256, 100.0, 3);
    c.bench_function("aniso_norm/256_points_3d", |b| {
        b.iter(|| xs.iter().map(|x| aniso_norm(black_box(x), &a, 1e-12).unwrap()).sum::<f64>())
    });
}

fn triebel_lizorkin(c: &mut Criterion) {
    let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
    let p = ExponentVector::new(vec![2.0, 1.5]).unwrap();
    let mut group = c.benchmark_group("tl_norm");
    group.sample_size(10);
    for samples in [64, 128] {
        let f = gaussian(2, samples, 12.0);
        let levels = LPFamily::covering_level(&a, f.grid());
        let fam = LPFamily::build_truncated(&a, levels, f.grid()).unwrap();
        let prm = SpaceParams::new(SpaceKind::TriebelLizorkin, 1.0, p.clone(), 2.0, a.clone()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(samples), &f, |b, f| {
            b.iter(|| tl_norm(black_box(f), &prm, &fam).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dft, directional_max, anisotropic_norm, triebel_lizorkin);
criterion_main!(benches);

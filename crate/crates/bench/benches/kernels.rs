use criterion::{black_box, criterion_group, criterion_main, Criterion};

use bubblelab::correction::{assemble_ll, contract_with, sample_w, LinearizedSystem};
use bubblelab::profile::norm_star;
use bubblelab::quadrature::{compute_universal, interaction_integral, QuadratureSpec};
use bubblelab::{Bubble, DimensionParams, PotentialSpec};
use bubblelab_bench::chain;

fn grid_kernels(c: &mut Criterion) {
    let (a, cfg, g) = chain(16.0);
    let w = sample_w(&a, &g);
    c.bench_function("laplacian", |b| b.iter(|| g.apply_laplacian(black_box(w.values()))));
    c.bench_function("assemble_ll", |b| b.iter(|| assemble_ll(black_box(&a), &g)));
    c.bench_function("norm_star", |b| b.iter(|| norm_star(black_box(&w), &a, &cfg.norms).unwrap()));
    c.bench_function("jet", |b| b.iter(|| w.jet(black_box(10.3), black_box(0.7)).unwrap()));
}

fn solver(c: &mut Criterion) {
    let (a, cfg, g) = chain(16.0);
    let mut group = c.benchmark_group("solver");
    group.sample_size(10);
    group.bench_function("factorize", |b| b.iter(|| LinearizedSystem::new(black_box(&a), g.clone(), cfg.tail).unwrap()));
    let sys = LinearizedSystem::new(&a, g.clone(), cfg.tail).unwrap();
    let ll = assemble_ll(&a, &g);
    group.bench_function("solve", |b| b.iter(|| sys.solve(black_box(&ll)).unwrap()));
    group.bench_function("contraction", |b| b.iter(|| contract_with(black_box(&sys), &cfg).unwrap()));
    group.finish();
}

fn quadrature(c: &mut Criterion) {
    let dims = DimensionParams::new(7).unwrap();
    let pot = PotentialSpec::new(1.0, 4.0, 16.0).unwrap();
    let spec = QuadratureSpec::default();
    let mut group = c.benchmark_group("quadrature");
    group.sample_size(10);
    group.bench_function("universal_constants", |b| b.iter(|| compute_universal(&dims, black_box(&pot), &spec).unwrap()));
    let bi = Bubble::on_axis(&dims, 0.0, 16.0).unwrap();
    let bj = Bubble::on_axis(&dims, 10.0, 16.0).unwrap();
    group.bench_function("interaction_integral", |b| b.iter(|| interaction_integral(black_box(&bi), &bj, &dims, &spec).unwrap()));
    group.finish();
}

criterion_group!(benches, grid_kernels, solver, quadrature);
criterion_main!(benches);

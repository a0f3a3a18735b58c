use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use owl_core::{
    build_weight, compact_svd, gen_dictionary, gen_signal, prox_w, psi_gamma, solve_fixed,
    SolverConfig, SynthSpec, WeightMatrix,
};

fn spec() -> SynthSpec {
    SynthSpec {
        n: 64,
        m: 26,
        k: 15,
        s: 15,
        r: 10,
        noise_norm: 0.0,
        trials: 1,
        seed: 7,
    }
}

fn bench_kernels(c: &mut Criterion) {
    let (x, _) = gen_signal(&spec(), 11).unwrap();

    c.bench_function("compact_svd_64x15", |b| {
        b.iter(|| compact_svd(black_box(&x), 1e-10).unwrap())
    });

    c.bench_function("psi_gamma_64x15", |b| {
        b.iter(|| psi_gamma(black_box(&x), 0.5, 1e-10).unwrap())
    });

    c.bench_function("build_weight_64x15", |b| {
        b.iter(|| build_weight(black_box(&x), 0.5).unwrap())
    });

    let w = WeightMatrix::identity(15);
    c.bench_function("prox_w_64x15", |b| {
        b.iter(|| prox_w(black_box(&x), &w, 0.3).unwrap())
    });
}

fn bench_solver(c: &mut Criterion) {
    let s = spec();
    let a = gen_dictionary(s.m, s.n, 3);
    let (x, _) = gen_signal(&s, 11).unwrap();
    let y = &a * &x;
    let mut cfg = SolverConfig::for_problem(0.5, &a, &y);
    cfg.alpha *= 0.01;
    cfg.sigma_max *= 0.01;
    cfg.max_iter = 200;
    let z0 = a.tr_mul(&y);

    c.bench_function("solve_fixed_200_iters", |b| {
        b.iter(|| solve_fixed(black_box(&a), &y, &z0, &cfg).unwrap())
    });
}

criterion_group!(benches, bench_kernels, bench_solver);
criterion_main!(benches);

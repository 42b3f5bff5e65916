use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use f2f_core::expt::{fit_fringe, FringeSample};
use f2f_core::gamma::best_branch;
use f2f_core::meas::{simulate_pulse, PulseCounts};
use f2f_core::{
    appendix_expansion, exact_post_state, CombMode, CountModel, Detector, Expansion, GammaSpec, InterferometerParams,
    JumpOperator,
};

fn jumps(c: &mut Criterion) {
    let mut group = c.benchmark_group("jump");
    for n in [64u64, 256, 1024] {
        let state = GammaSpec::new(100 * n, n, 0.4).unwrap().state();
        let jump = JumpOperator::new((100.0 * n as f64).sqrt(), 1.0, 0.3);
        group.bench_with_input(BenchmarkId::new("apply", n), &state, |b, s| {
            b.iter(|| jump.apply(black_box(s), Detector::D1))
        });
        group.bench_with_input(BenchmarkId::new("branch_weights", n), &state, |b, s| {
            b.iter(|| jump.branch_weights(black_box(s)))
        });
    }
    group.finish();
}

fn post_states(c: &mut Criterion) {
    let jump = JumpOperator::new(100.0, 1.0, 0.0);
    c.bench_function("exact_post_state 1e4 50/50", |b| {
        b.iter(|| exact_post_state(10_000, black_box(50), 50, &jump).unwrap())
    });
    let jump = JumpOperator::new(2000f64.sqrt(), 1.0, 0.0);
    c.bench_function("appendix_expansion 2000 6/2", |b| {
        b.iter(|| appendix_expansion(2000, black_box(6), 2, &jump, Expansion::Exact).unwrap())
    });
    let state = exact_post_state(10_000, 100, 0, &JumpOperator::new(100.0, 1.0, 0.0)).unwrap();
    c.bench_function("best_branch n=100", |b| b.iter(|| best_branch(black_box(&state), 10_000, 100).unwrap()));
}

fn pulse(c: &mut Criterion) {
    let comb = CombMode::gaussian(40, 6.0, 49, 0.25).unwrap();
    let params = InterferometerParams::balanced(1.0e4, 0.0, 0).unwrap();
    let start = GammaSpec::new(10_000, 200, 0.5).unwrap().state();
    c.bench_function("simulate_pulse mu=100", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        b.iter(|| {
            simulate_pulse(&start, &params, &comb, 3, PulseCounts::Model(CountModel::Fixed { n: 100 }), &mut rng).unwrap()
        })
    });
}

fn fringe(c: &mut Criterion) {
    let samples: Vec<FringeSample> = (11..=256u64)
        .map(|n| {
            let phi = if n >= 129 { PI / 2.0 * (n - 128) as f64 } else { 0.0 };
            FringeSample {
                pulse: n,
                phi,
                counts: 100.0 + 90.0 * (0.7 + phi - 2.0 * PI * 0.13 * (n - 1) as f64).cos(),
            }
        })
        .collect();
    c.bench_function("fit_fringe 246 points", |b| b.iter(|| fit_fringe(black_box(&samples), 1.0, 1024).unwrap()));
}

criterion_group!(benches, jumps, post_states, pulse, fringe);
criterion_main!(benches);

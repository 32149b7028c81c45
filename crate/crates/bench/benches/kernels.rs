use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gtasep::asymptotics::{dl_function, polylog, transition_cumulants};
use gtasep::bethe::{cumulants_from_series, series_coeffs};
use gtasep::exact::{mean_jumps, partition_function};
use gtasep::scalar::ratio;
use gtasep::sim::{replica_rng, step_gtasep, HopSampler, RingState, StationarySampler};
use gtasep::{ExactParams, ModelParams};

fn monte_carlo(c: &mut Criterion) {
    let params = ModelParams::new(0.5, 0.9).unwrap();
    let kernel = HopSampler::new(&params).unwrap();
    let mut g = c.benchmark_group("ring_step");
    for l in [100usize, 1000] {
        let mut rng = replica_rng(7, 0);
        let mut state = RingState::random(l, l / 2, &mut rng).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, _| {
            b.iter(|| step_gtasep(&mut state, &kernel, &mut rng).unwrap())
        });
    }
    g.finish();
    let sampler = StationarySampler::new(512, &params, 1.0).unwrap();
    let mut rng = replica_rng(8, 0);
    c.bench_function("stationary_sample_512", |b| b.iter(|| sampler.sample(&mut rng)));
}

fn exact(c: &mut Criterion) {
    let q = ExactParams::new(ratio(1, 2), ratio(1, 2)).unwrap();
    let mut g = c.benchmark_group("exact");
    for m in [10usize, 50] {
        g.bench_with_input(BenchmarkId::new("mean_jumps", m), &m, |b, &m| b.iter(|| mean_jumps(m, m, &q).unwrap()));
        g.bench_with_input(BenchmarkId::new("partition_function", m), &m, |b, &m| {
            b.iter(|| partition_function(m, m, q.nu()).unwrap())
        });
    }
    g.finish();
    c.bench_function("bethe_cumulants_3_3_order6", |b| {
        b.iter(|| cumulants_from_series(&series_coeffs(3, 3, &q, 6).unwrap(), 6).unwrap())
    });
}

fn special(c: &mut Criterion) {
    c.bench_function("polylog_3/2", |b| b.iter(|| polylog(1.5, black_box(-3.7)).unwrap()));
    c.bench_function("dl_function", |b| b.iter(|| dl_function(black_box(0.8)).unwrap()));
    c.bench_function("transition_cumulants_theta10", |b| b.iter(|| transition_cumulants(black_box(10.0)).unwrap()));
}

criterion_group!(benches, monte_carlo, exact, special);
criterion_main!(benches);

//! Benchmarks for the heavy numeric kernels: the wavelet transform, the
//! smoothed coherence evaluation (the inner loop of every Monte Carlo
//! significance run) and the bootstrapped frequency-band causality test.

use criterion::{criterion_group, criterion_main, Criterion};

use solwave::coherence::CoherenceEngine;
use solwave::sampledata;
use solwave::{
    annual_mean, cwt, granger_frequency, make_scale_grid, wavelet_coherence, MorletParams,
    SmoothingSpec,
};

fn bench_kernels(c: &mut Criterion) {
    let data = sampledata::generate(7);
    let params = MorletParams::default();
    let spec = SmoothingSpec::default();

    let n = data.sunspots.len();
    let monthly = make_scale_grid(1.0, n, 2.0, 1.0 / 12.0, 512.0, params).unwrap();

    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);

    group.bench_function("cwt_monthly", |b| {
        b.iter(|| cwt(&data.sunspots, &monthly, params).unwrap())
    });

    let engine = CoherenceEngine::new(&monthly, params, &spec).unwrap();
    group.bench_function("coherence_eval_monthly", |b| {
        b.iter(|| engine.r2_only(&data.sunspots.values, &data.temp_north.values))
    });

    group.bench_function("wavelet_coherence_monthly", |b| {
        b.iter(|| {
            wavelet_coherence(&data.sunspots, &data.temp_north, &monthly, params, &spec, 0.5)
                .unwrap()
        })
    });

    let sun = annual_mean(&data.sunspots).unwrap();
    let sun = solwave::align(&sun, &data.co2).unwrap().0;
    let temps: Vec<_> = [&data.temp_north, &data.temp_south, &data.temp_global]
        .iter()
        .map(|t| {
            let a = annual_mean(t).unwrap();
            solwave::align(&a, &data.co2).unwrap().0
        })
        .collect();
    let effects: Vec<&solwave::TimeSeries> = temps.iter().collect();
    let bands = [(2.0 * std::f64::consts::PI / 64.0, 2.0 * std::f64::consts::PI / 16.0)];
    group.bench_function("granger_frequency_band", |b| {
        b.iter(|| granger_frequency(&sun, &effects, 11, &bands, 20, 42).unwrap())
    });

    group.finish();
}

criterion_group!(benches, bench_kernels);
criterion_main!(benches);

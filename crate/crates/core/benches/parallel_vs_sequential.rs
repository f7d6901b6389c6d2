use conewave::par::sequential;
use conewave::special_functions::Mollifier;
use conewave::two_diffraction::{oscillatory_oracle, OracleAmplitude, OracleConfig};
use conewave::verification::at4_point;
use conewave::wave_trace::{mollified_trace, pillowcase_spectrum, PillowcaseSurface};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn trace(c: &mut Criterion) {
    let spec = pillowcase_spectrum(PillowcaseSurface::new(1.0, 1.0).unwrap(), 300.0).unwrap();
    let ts: Vec<f64> = (0..1000).map(|k| 0.5 + 0.005 * k as f64).collect();
    let h = Mollifier::new(0.03).unwrap();
    let mut g = c.benchmark_group("mollified_trace");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| mollified_trace(black_box(&spec), &ts, h).unwrap()));
    g.bench_function("sequential", |b| b.iter(|| sequential(|| mollified_trace(black_box(&spec), &ts, h).unwrap())));
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let cp = at4_point(100.0).unwrap();
    let cfg = OracleConfig::default();
    let mut g = c.benchmark_group("oscillatory_oracle");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| oscillatory_oracle(black_box(&cp), OracleAmplitude::Leading, &cfg).unwrap()));
    g.bench_function("sequential", |b| {
        b.iter(|| sequential(|| oscillatory_oracle(black_box(&cp), OracleAmplitude::Leading, &cfg).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, trace, oracle);
criterion_main!(benches);

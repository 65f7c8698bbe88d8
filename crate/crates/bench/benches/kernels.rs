use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use maxrep::bergmann::{bergmann_beta, seeded_quadruple};
use maxrep::delzant_py::{pi_s_matrix, FourierTruncation, Mobius};
use maxrep::pingpong::{build_witness, verify_pingpong};
use maxrep::IndefiniteForm;

fn beta(c: &mut Criterion) {
    let mut group = c.benchmark_group("beta");
    for q in [3, 8, 32] {
        let form = IndefiniteForm::real(2, q).unwrap();
        let quads: Vec<_> = (0..256).map(|i| seeded_quadruple(form, 1, i).unwrap()).collect();
        group.throughput(Throughput::Elements(quads.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(q), &quads, |b, quads| {
            b.iter(|| {
                for l in quads {
                    let _ = black_box(bergmann_beta(&l[0], &l[1], &l[2]));
                }
            })
        });
    }
    group.finish();
}

fn pi_s(c: &mut Criterion) {
    let mut group = c.benchmark_group("pi_s_matrix");
    group.sample_size(10);
    let g = Mobius::hyperbolic(0.3);
    for n in [64, 256] {
        let trunc = FourierTruncation::new(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &trunc, |b, t| {
            b.iter(|| pi_s_matrix(2.0, &g, t, None, None).unwrap())
        });
    }
    group.finish();
}

fn pingpong(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_pingpong");
    group.sample_size(10);
    let w = build_witness(16, 7, 200).unwrap();
    for samples in [200, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(samples), &samples, |b, &s| {
            b.iter(|| verify_pingpong(&w, s).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, beta, pi_s, pingpong);
criterion_main!(benches);

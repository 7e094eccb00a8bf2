use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use nmc_core::gf2x::{evaluate_everywhere, find_roots, random_poly, FieldElement, FieldSpec, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mul(c: &mut Criterion) {
    let mut group = c.benchmark_group("field_mul");
    group.throughput(Throughput::Elements(1024));
    for m in [8u32, 24, 64] {
        let f = FieldSpec::standard(m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
        let mask = if m == 64 { u64::MAX } else { (1 << m) - 1 };
        let xs: Vec<FieldElement> = (0..1024).map(|_| FieldElement::new(rng.gen::<u64>() & mask)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(m), &xs, |b, xs| {
            b.iter(|| xs.iter().fold(FieldElement::new(1), |acc, &x| f.mul(acc, x)))
        });
    }
    group.finish();
}

fn roots(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_roots");
    group.sample_size(20);
    for (m, degree) in [(12u32, 50usize), (24, 143), (24, 575)] {
        let f = FieldSpec::standard(m).unwrap();
        let p = random_poly(&f, degree, &mut ChaCha8Rng::seed_from_u64(degree as u64));
        group.bench_function(BenchmarkId::new(format!("m{m}"), degree), |b| b.iter(|| find_roots(&f, black_box(&p))));
    }
    group.finish();
}

fn fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_everywhere");
    group.sample_size(10);
    for m in [16u32, 20] {
        let f = FieldSpec::standard(m).unwrap();
        let p: Poly = random_poly(&f, 9 * 64 - 1, &mut ChaCha8Rng::seed_from_u64(1));
        group.throughput(Throughput::Elements(1 << m));
        group.bench_function(BenchmarkId::from_parameter(m), |b| b.iter(|| evaluate_everywhere(&f, black_box(&p))));
    }
    group.finish();
}

criterion_group!(benches, mul, roots, fft);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nmc_core::code::{build_mc_code, build_table_code, CodeParams};
use nmc_core::harness::{tamper_dist_strong, EvalMode};
use nmc_core::tamper::{sample_family, FamilyKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("table_build");
    group.sample_size(10);
    for (n, k, t, delta) in [(14u32, 3u32, 64u64, 0.0), (16, 4, 128, 0.0), (14, 2, 4, 0.2)] {
        let p = CodeParams::new(n, k, t, delta, 1);
        group.bench_function(BenchmarkId::from_parameter(format!("n{n}_k{k}_t{t}_d{delta}")), |b| {
            b.iter(|| build_table_code(&p, &mut p.rng()))
        });
    }
    group.finish();
}

fn mc_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_build_and_index");
    group.sample_size(10);
    let p = CodeParams::new(20, 4, 64, 0.0, 1);
    group.bench_function("n20_k4_t64", |b| {
        b.iter(|| {
            let code = build_mc_code(&p, &mut p.rng()).unwrap();
            code.enumerate_supports().unwrap().total()
        })
    });
    group.finish();
}

fn sampled_cell(c: &mut Criterion) {
    let p = CodeParams::new(16, 4, 128, 0.0, 1);
    let code = build_table_code(&p, &mut p.rng()).unwrap();
    let f = sample_family(FamilyKind::Bitwise, 16, 1, &mut ChaCha8Rng::seed_from_u64(2)).unwrap().remove(0);
    c.bench_function("tamper_dist_sampled_25600", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        b.iter(|| tamper_dist_strong(&code, black_box(&f), 5, EvalMode::Sampled { samples: 25_600 }, &mut rng))
    });
}

criterion_group!(benches, table_build, mc_build, sampled_cell);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qecsense_core::bosonic::{chebyshev_code, FockModel};
use qecsense_core::dephasing::{
    build_recovery, decompose_modes, design_beyond_hnls, lindblad_model, ring_model,
};
use qecsense_core::linalg::{eigh, DenseMatrix};
use qecsense_core::lp::{solve_l1, L1BallProgram};
use qecsense_core::simulator::{evolve, DensityMatrix, EvolutionSchedule};

fn random_hermitian(dim: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
    .hermitian_part()
}

fn bench_eigh(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigh");
    for dim in [8usize, 16, 32, 64] {
        let matrix = random_hermitian(dim, dim as u64);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &matrix, |b, m| {
            b.iter(|| eigh(m).unwrap())
        });
    }
    group.finish();
}

fn bench_simplex(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_l1");
    for dim in [8usize, 32, 101] {
        let mut rng = ChaCha8Rng::seed_from_u64(dim as u64);
        let objective: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut rows = vec![vec![1.0; dim]];
        for _ in 0..3 {
            rows.push((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
        let program = L1BallProgram::new(objective, rows, 2.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &program, |b, p| {
            b.iter(|| solve_l1(p).unwrap())
        });
    }
    group.finish();
}

fn bench_chebyshev(c: &mut Criterion) {
    let mut group = c.benchmark_group("chebyshev_code");
    for (s, m) in [(2usize, 100usize), (4, 400)] {
        let model = FockModel::plain(m, s, 1.0).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("s{s}_M{m}")),
            &model,
            |b, model| b.iter(|| chebyshev_code(model).unwrap()),
        );
    }
    group.finish();
}

fn bench_evolution(c: &mut Criterion) {
    let cm = ring_model(3, &[-0.45], 1.0).unwrap();
    let gain = design_beyond_hnls(&cm, None, None).unwrap().gain;
    let design = design_beyond_hnls(&cm, Some(0.6 * gain), None).unwrap();
    let modes = decompose_modes(&cm).unwrap();
    let recovery = build_recovery(&design, &modes).unwrap();
    let model = lindblad_model(&cm).unwrap();
    let initial = DensityMatrix::from_pure(&design.code.plus_state()).unwrap();
    let schedule = EvolutionSchedule::new(0.01, 0.001, 0.001 / 20.0, 1.0).unwrap();
    c.bench_function("evolve_ring3_ten_recoveries", |b| {
        b.iter(|| evolve(&model, &initial, &schedule, Some(&recovery)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_eigh,
    bench_simplex,
    bench_chebyshev,
    bench_evolution
);
criterion_main!(benches);

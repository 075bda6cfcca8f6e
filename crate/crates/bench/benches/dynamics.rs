use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rydring::effective::build_effective;
use rydring::hamiltonian::perfect_blockade_hamiltonian;
use rydring::observables::SiteOperators;
use rydring::simulation::{simulate, RunOptions};
use rydring::{Interaction, ModelParams, Propagator, PropagatorKind, Sector, SymmetricBasis, TimeGrid, Wavefunction};

fn basis(c: &mut Criterion) {
    let mut g = c.benchmark_group("basis");
    for n in [16, 20, 24] {
        let p = ModelParams::perfect(n, 2).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| SymmetricBasis::build(black_box(p), Sector::Blockaded(2)).unwrap())
        });
    }
    g.finish();
}

fn hamiltonians(c: &mut Criterion) {
    let p = ModelParams::perfect(20, 2).unwrap();
    c.bench_function("perfect_blockade_h/20", |b| b.iter(|| perfect_blockade_hamiltonian(black_box(&p)).unwrap()));
    let p = ModelParams::new(16, 2, Interaction::Finite(30.0)).unwrap();
    c.bench_function("effective_h/16", |b| b.iter(|| build_effective(black_box(&p)).unwrap()));
}

fn propagation(c: &mut Criterion) {
    let p = ModelParams::perfect(20, 2).unwrap();
    let (basis, h) = perfect_blockade_hamiltonian(&p).unwrap();
    let grid = TimeGrid::from_zero(20.0, 0.02).unwrap();
    let psi0 = Wavefunction::vacuum(&basis).unwrap();
    let ops = SiteOperators::new(&basis).unwrap();
    let mut g = c.benchmark_group("evolve/20");
    g.sample_size(10);
    for (name, kind) in [
        ("spectral", PropagatorKind::Spectral),
        ("krylov", PropagatorKind::Krylov { tol: 1e-12 }),
    ] {
        g.bench_function(name, |b| {
            b.iter(|| {
                let prop = Propagator::new(&h, kind).unwrap();
                let mut acc = 0.0;
                prop.evolve_with(&psi0, &grid, |_, _, psi| {
                    acc += ops.density(psi);
                    Ok(())
                })
                .unwrap();
                acc
            })
        });
    }
    g.finish();
}

fn full_run(c: &mut Criterion) {
    let p = ModelParams::perfect(15, 2).unwrap();
    let grid = TimeGrid::from_zero(50.0, 0.02).unwrap();
    let opts = RunOptions::default();
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    g.bench_function("15", |b| b.iter(|| simulate(black_box(&p), &grid, &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, basis, hamiltonians, propagation, full_run);
criterion_main!(benches);

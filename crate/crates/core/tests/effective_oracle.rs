use rydring::effective::{build_effective, compare_dynamics};
use rydring::oracle::{full_observables, full_space_evolve};
use rydring::{Interaction, ModelParams, PropagatorKind, TimeGrid};

/// Largest |β_eff − β_full| over the grid times Δ².
fn scaled_deviation(n: usize, delta: f64, grid: &TimeGrid) -> f64 {
    let p = ModelParams::new(n, 2, Interaction::Finite(delta)).unwrap();
    let model = build_effective(&p).unwrap();
    let cmp = compare_dynamics(&model, grid, &[2], PropagatorKind::Spectral).unwrap();
    let full = full_space_evolve(&p, grid).unwrap();
    let worst = full
        .iter()
        .zip(cmp.effective.beta.values())
        .map(|(f, b)| (full_observables(f).unwrap().beta - b).abs())
        .fold(0.0, f64::max);
    worst * delta * delta
}

#[test]
fn effective_model_error_is_second_order() {
    let grid = TimeGrid::from_zero(10.0, 0.05).unwrap();
    for n in [8, 10] {
        let c: Vec<f64> = [30.0, 50.0, 80.0].iter().map(|&d| scaled_deviation(n, d, &grid)).collect();
        let (lo, hi) = c.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi / lo < 1.25, "N={n}: c = {c:?}");
    }
}

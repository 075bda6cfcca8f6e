//! End-to-end runs: evolve the vacuum, evaluate every observable at each
//! sample, check the invariants and reduce the series to summary numbers.

use serde::Serialize;

use crate::effective::build_effective;
use crate::error::{invalid, Result};
use crate::hamiltonian::{perfect_blockade_hamiltonian, HermitianMatrix};
use crate::observables::{
    concurrence, entanglement_of_formation, two_party_correlation, two_party_correlation_classical,
    wootters_concurrence, ExponentialFit, Peak, Series, SiteOperators,
};
use crate::propagator::{Propagator, PropagatorKind, TimeGrid, Wavefunction};
use crate::ring_config::{Interaction, ModelParams};
use crate::symmetric_basis::SymmetricBasis;

/// Default averaging window for long-time statistics.
pub const DEFAULT_WINDOW: (f64, f64) = (5.0, 200.0);

const NORM_TOL: f64 = 1e-10;
const ENERGY_TOL: f64 = 1e-9;
const DM_TOL: f64 = 1e-10;
const CONCURRENCE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub beta: f64,
    pub n_ryd: f64,
    /// One entry per requested distance.
    pub g2: Vec<Option<f64>>,
    pub mc: f64,
    pub mc_class: f64,
    pub concurrence: f64,
    pub eof: f64,
    pub delta_abs: f64,
}

/// Largest violations of the run's invariants.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InvariantReport {
    pub max_norm_error: f64,
    /// `|E(t) − E(0)| / max(1, |E(0)|)`
    pub max_energy_error: f64,
    pub max_trace_error: f64,
    pub min_dm_eigenvalue: f64,
    pub max_concurrence_mismatch: f64,
    /// Samples with `t > 0` where `β > |δ|` fails.
    pub beta_delta_violations: usize,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.max_norm_error <= NORM_TOL
            && self.max_energy_error <= ENERGY_TOL
            && self.max_trace_error <= DM_TOL
            && self.min_dm_eigenvalue >= -DM_TOL
            && self.max_concurrence_mismatch <= CONCURRENCE_TOL
            && self.beta_delta_violations == 0
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub distances: Vec<usize>,
    pub kind: PropagatorKind,
    /// Evaluate the general Wootters formula and the density-matrix spectrum
    /// at every sample.
    pub check_invariants: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            distances: vec![2],
            kind: PropagatorKind::default(),
            check_invariants: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Run {
    pub params: ModelParams,
    pub grid: TimeGrid,
    pub distances: Vec<usize>,
    pub basis_dim: usize,
    pub samples: Vec<Sample>,
    pub invariants: InvariantReport,
}

/// Hamiltonian of the run: the blockaded laser term for an infinite
/// interaction, the effective model otherwise.
pub fn model_hamiltonian(params: &ModelParams) -> Result<(SymmetricBasis, HermitianMatrix)> {
    match params.delta {
        Interaction::Infinite => perfect_blockade_hamiltonian(params),
        Interaction::Finite(_) => {
            let model = build_effective(params)?;
            Ok((model.basis, model.h_eff))
        }
    }
}

pub fn simulate(params: &ModelParams, grid: &TimeGrid, opts: &RunOptions) -> Result<Run> {
    let (basis, h) = model_hamiltonian(params)?;
    simulate_with(params, &basis, &h, grid, opts)
}

pub fn simulate_with(
    params: &ModelParams,
    basis: &SymmetricBasis,
    h: &HermitianMatrix,
    grid: &TimeGrid,
    opts: &RunOptions,
) -> Result<Run> {
    let n = params.n_sites;
    if let Some(&k) = opts.distances.iter().find(|&&k| !(1..n).contains(&k)) {
        return Err(invalid(format!("correlation distance {k} outside 1..{n}")));
    }
    let ops = SiteOperators::new(basis)?;
    let prop = Propagator::new(h, opts.kind)?;
    let psi0 = Wavefunction::vacuum(basis)?;
    let e0 = psi0.energy(h);
    let mut inv = InvariantReport::default();
    let mut samples = Vec::with_capacity(grid.len());
    prop.evolve_with(&psi0, grid, |_, t, psi| {
        let dm = ops.two_site_dm(psi);
        let c = concurrence(&dm);
        let mut g2 = Vec::with_capacity(opts.distances.len());
        for &k in &opts.distances {
            g2.push(ops.g2(psi, k)?);
        }
        let sample = Sample {
            t,
            beta: dm.beta,
            n_ryd: n as f64 * dm.beta,
            g2,
            mc: two_party_correlation(&dm)?,
            mc_class: two_party_correlation_classical(&dm),
            concurrence: c,
            eof: entanglement_of_formation(c),
            delta_abs: dm.delta.norm(),
        };
        inv.max_norm_error = inv.max_norm_error.max((psi.norm() - 1.0).abs());
        inv.max_energy_error = inv
            .max_energy_error
            .max((psi.energy(h) - e0).abs() / e0.abs().max(1.0));
        inv.max_trace_error = inv.max_trace_error.max((dm.alpha + 2.0 * dm.beta - 1.0).abs());
        if opts.check_invariants {
            let matrix = dm.matrix();
            let min_eig = crate::observables::hermitian_eigenvalues4(&matrix)?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            inv.min_dm_eigenvalue = inv.min_dm_eigenvalue.min(min_eig);
            let general = wootters_concurrence(&matrix)?;
            inv.max_concurrence_mismatch = inv.max_concurrence_mismatch.max((general - c).abs());
        }
        if t > 0.0 && !(sample.beta > sample.delta_abs) {
            if inv.beta_delta_violations == 0 {
                log::warn!("beta = {} does not exceed |delta| = {} at t = {t}", sample.beta, sample.delta_abs);
            }
            inv.beta_delta_violations += 1;
        }
        samples.push(sample);
        Ok(())
    })?;
    if !inv.holds() {
        log::warn!("invariant check failed: {inv:?}");
    }
    Ok(Run {
        params: *params,
        grid: *grid,
        distances: opts.distances.clone(),
        basis_dim: basis.len(),
        samples,
        invariants: inv,
    })
}

impl Run {
    pub fn series(&self, f: impl Fn(&Sample) -> f64) -> Series {
        let values = self.samples.iter().map(f).collect();
        Series::new(self.grid, values).expect("one sample per grid point")
    }

    pub fn beta(&self) -> Series {
        self.series(|s| s.beta)
    }

    /// `g₂` for the `i`-th requested distance; undefined samples are NaN.
    pub fn g2(&self, i: usize) -> Series {
        self.series(|s| s.g2[i].unwrap_or(f64::NAN))
    }

    pub fn mc(&self) -> Series {
        self.series(|s| s.mc)
    }

    pub fn mc_class(&self) -> Series {
        self.series(|s| s.mc_class)
    }

    pub fn eof(&self) -> Series {
        self.series(|s| s.eof)
    }

    pub fn concurrence(&self) -> Series {
        self.series(|s| s.concurrence)
    }

    /// `M_C − M_C^class`
    pub fn mc_excess(&self) -> Series {
        self.series(|s| s.mc - s.mc_class)
    }
}

/// A statistic that is reported either as a value or as the reason it could
/// not be computed.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Stat<T> {
    Value(T),
    Unavailable { error: String },
}

impl<T> Stat<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Stat::Value(v),
            Err(e) => Stat::Unavailable { error: e.to_string() },
        }
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Stat::Value(v) => Some(v),
            Stat::Unavailable { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesStats {
    pub mean: Stat<f64>,
    pub std: Stat<f64>,
    pub global_max: Option<Peak>,
    /// Local maxima with `t` up to [`SHORT_TIME`].
    pub early_maxima: Vec<Peak>,
}

/// Upper end of the interval whose local maxima are listed.
pub const SHORT_TIME: f64 = 3.0;

fn series_stats(s: &Series, window: (f64, f64)) -> SeriesStats {
    SeriesStats {
        mean: Stat::from(s.time_average(window.0, window.1)),
        std: Stat::from(s.time_std(window.0, window.1)),
        global_max: s.global_max(),
        early_maxima: s.local_maxima().into_iter().filter(|p| p.t <= SHORT_TIME).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct G2Stats {
    pub k: usize,
    #[serde(flatten)]
    pub stats: SeriesStats,
    pub first_max: Option<Peak>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub n_sites: usize,
    pub m: usize,
    pub delta: Interaction,
    pub basis_dim: usize,
    pub samples: usize,
    pub window: (f64, f64),
    pub beta: SeriesStats,
    pub beta_frequency: Stat<f64>,
    pub g2: Vec<G2Stats>,
    pub mc: SeriesStats,
    pub mc_class: SeriesStats,
    pub mc_excess_fit: Stat<ExponentialFit>,
    pub concurrence: SeriesStats,
    pub eof: SeriesStats,
    pub invariants: InvariantReport,
}

impl Run {
    pub fn summary(&self, window: (f64, f64)) -> Summary {
        let beta = self.beta();
        let g2 = self
            .distances
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let s = self.g2(i);
                G2Stats {
                    k,
                    stats: series_stats(&s, window),
                    first_max: s.first_local_max_after(0.0),
                }
            })
            .collect();
        Summary {
            n_sites: self.params.n_sites,
            m: self.params.m,
            delta: self.params.delta,
            basis_dim: self.basis_dim,
            samples: self.samples.len(),
            window,
            beta: series_stats(&beta, window),
            beta_frequency: Stat::from(beta.dominant_frequency(window.0, window.1)),
            g2,
            mc: series_stats(&self.mc(), window),
            mc_class: series_stats(&self.mc_class(), window),
            mc_excess_fit: Stat::from(self.mc_excess().envelope_exponential_fit()),
            concurrence: series_stats(&self.concurrence(), window),
            eof: series_stats(&self.eof(), window),
            invariants: self.invariants.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ring_run() {
        let p = ModelParams::perfect(10, 2).unwrap();
        let grid = TimeGrid::from_zero(30.0, 0.02).unwrap();
        let opts = RunOptions {
            distances: vec![1, 2, 3],
            ..RunOptions::default()
        };
        let run = simulate(&p, &grid, &opts).unwrap();
        assert_eq!(run.basis_dim, 14);
        assert_eq!(run.samples.len(), grid.len());
        assert!(run.invariants.holds(), "{:?}", run.invariants);
        assert_eq!(run.samples[0].g2, vec![None, None, None]);
        assert!(run.samples[1..].iter().all(|s| s.g2[0] == Some(0.0)));
        let s = run.summary((5.0, 30.0));
        let peak = s.beta.global_max.unwrap();
        assert!((peak.t - 1.09).abs() < 0.03, "{peak:?}");
        assert!(s.beta_frequency.value().is_some());
        assert!(serde_json::to_string(&s).is_ok());
    }

    #[test]
    fn rejects_bad_distance() {
        let p = ModelParams::perfect(8, 2).unwrap();
        let grid = TimeGrid::from_zero(1.0, 0.1).unwrap();
        let opts = RunOptions {
            distances: vec![8],
            ..RunOptions::default()
        };
        assert!(simulate(&p, &grid, &opts).is_err());
    }

    #[test]
    fn finite_delta_uses_effective_model() {
        let p = ModelParams::new(10, 2, Interaction::Finite(40.0)).unwrap();
        let grid = TimeGrid::from_zero(5.0, 0.05).unwrap();
        let run = simulate(&p, &grid, &RunOptions::default()).unwrap();
        assert!(run.invariants.max_norm_error < 1e-10);
        let unsupported = ModelParams::new(10, 3, Interaction::Finite(40.0)).unwrap();
        assert!(simulate(&unsupported, &grid, &RunOptions::default()).is_err());
    }
}

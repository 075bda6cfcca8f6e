//! Finite interaction strength by adiabatic elimination of the singly and
//! doubly blockade-violating manifolds.

use faer::Mat;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::hamiltonian::{h0_block, h0_in_basis, HermitianMatrix, SectorBlock};
use crate::observables::{Series, SiteOperators};
use crate::propagator::{Propagator, PropagatorKind, TimeGrid, Wavefunction};
use crate::ring_config::ModelParams;
use crate::symmetric_basis::{Sector, SymmetricBasis};

/// Start of the window that defines the long-time mean used to normalise
/// deviations.
pub const NORMALISATION_START: f64 = 5.0;

#[derive(Clone, Debug)]
pub struct EffectiveModel {
    pub params: ModelParams,
    pub delta: f64,
    pub basis: SymmetricBasis,
    pub h_perfect: HermitianMatrix,
    pub h_eff: HermitianMatrix,
    /// `<ν=0|H₀|ν=1>`
    pub omega01: SectorBlock,
    /// `<ν=0|H₀|ν=2>`
    pub omega02: SectorBlock,
}

/// `block * blockᵀ`
fn gram(block: &SectorBlock) -> Mat<f64> {
    let a = block.entries.to_dense();
    &a * a.transpose()
}

pub fn build_effective(params: &ModelParams) -> Result<EffectiveModel> {
    params.validate()?;
    if params.m != 2 {
        return Err(invalid(format!(
            "the effective model eliminates nearest-neighbour pairs only (m=2), got m={}",
            params.m
        )));
    }
    let delta = params
        .delta
        .finite()
        .ok_or_else(|| invalid("the effective model needs a finite interaction strength"))?;
    let basis = SymmetricBasis::build(params, Sector::Blockaded(2))?;
    let nu1 = SymmetricBasis::build(params, Sector::NuEquals(1))?;
    let nu2 = SymmetricBasis::build(params, Sector::NuEquals(2))?;
    let h_perfect = h0_in_basis(&basis)?;
    let omega01 = h0_block(&basis, &nu1)?;
    let omega02 = h0_block(&basis, &nu2)?;
    let c1 = gram(&omega01);
    let c2 = gram(&omega02);
    let h0 = h_perfect.to_dense();
    let dim = basis.len();
    let h = Mat::from_fn(dim, dim, |i, j| h0[(i, j)] - c1[(i, j)] / delta - c2[(i, j)] / (2.0 * delta));
    let h_eff = HermitianMatrix::from_dense_symmetrized(&h, 0.0)?;
    Ok(EffectiveModel {
        params: *params,
        delta,
        basis,
        h_perfect,
        h_eff,
        omega01,
        omega02,
    })
}

/// Spectral widths of the laser term inside the first two manifolds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ManifoldCheck {
    pub width0: f64,
    pub width1: f64,
    pub delta: f64,
}

impl ManifoldCheck {
    /// Adjacent manifolds are taken to overlap once their mean half-width
    /// reaches the spacing.
    pub fn overlapping(&self) -> bool {
        0.5 * (self.width0 + self.width1) >= self.delta
    }
}

fn spread(h: &HermitianMatrix) -> Result<f64> {
    let e = h.eigenvalues()?;
    Ok(match (e.first(), e.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    })
}

impl EffectiveModel {
    pub fn manifold_check(&self) -> Result<ManifoldCheck> {
        let nu1 = SymmetricBasis::build(&self.params, Sector::NuEquals(1))?;
        let check = ManifoldCheck {
            width0: spread(&self.h_perfect)?,
            width1: spread(&h0_in_basis(&nu1)?)?,
            delta: self.delta,
        };
        if check.overlapping() {
            log::warn!(
                "N={}, delta={}: manifold widths {:.3} and {:.3} are not small against the spacing; \
                 adiabatic elimination may be inaccurate",
                self.params.n_sites,
                self.delta,
                check.width0,
                check.width1
            );
        }
        Ok(check)
    }

    /// The two second-order corrections, `-Ω₀₁Ω₀₁ᵀ/Δ` and `-Ω₀₂Ω₀₂ᵀ/(2Δ)`.
    pub fn corrections(&self) -> (Mat<f64>, Mat<f64>) {
        let c1 = gram(&self.omega01);
        let c2 = gram(&self.omega02);
        let d = self.delta;
        (
            Mat::from_fn(c1.nrows(), c1.ncols(), |i, j| -c1[(i, j)] / d),
            Mat::from_fn(c2.nrows(), c2.ncols(), |i, j| -c2[(i, j)] / (2.0 * d)),
        )
    }
}

/// Density and correlator series of one model.
#[derive(Clone, Debug)]
pub struct DynamicsSeries {
    pub beta: Series,
    /// Per requested distance; undefined samples are NaN.
    pub g2: Vec<Series>,
}

fn run_series(
    basis: &SymmetricBasis,
    h: &HermitianMatrix,
    grid: &TimeGrid,
    distances: &[usize],
    kind: PropagatorKind,
) -> Result<DynamicsSeries> {
    let ops = SiteOperators::new(basis)?;
    let prop = Propagator::new(h, kind)?;
    let mut beta = Vec::with_capacity(grid.len());
    let mut g2: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); distances.len()];
    prop.evolve_with(&Wavefunction::vacuum(basis)?, grid, |_, _, psi| {
        beta.push(ops.density(psi));
        for (col, &k) in g2.iter_mut().zip(distances) {
            col.push(ops.g2(psi, k)?.unwrap_or(f64::NAN));
        }
        Ok(())
    })?;
    Ok(DynamicsSeries {
        beta: Series::new(*grid, beta)?,
        g2: g2.into_iter().map(|v| Series::new(*grid, v)).collect::<Result<_>>()?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Deviation {
    /// Observable name, `beta` or `g2_<k>`.
    pub observable: String,
    /// Long-time mean of the perfect-blockade series.
    pub normalisation: f64,
    /// Largest `|effective − perfect|` over the grid divided by the
    /// normalisation.
    pub max_relative: f64,
    pub at_t: f64,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub perfect: DynamicsSeries,
    pub effective: DynamicsSeries,
    pub deviations: Vec<Deviation>,
    pub manifolds: ManifoldCheck,
}

impl Comparison {
    pub fn deviation(&self, observable: &str) -> Option<&Deviation> {
        self.deviations.iter().find(|d| d.observable == observable)
    }
}

fn deviation(name: String, perfect: &Series, effective: &Series) -> Result<Deviation> {
    let grid = perfect.grid();
    let t1 = grid.t_end();
    let t0 = NORMALISATION_START.max(grid.t_start());
    let normalisation = perfect.time_average(t0, t1)?;
    if !(normalisation.abs() > 0.0) {
        return Err(crate::Error::Analysis(format!("{name}: long-time mean vanishes")));
    }
    let (mut worst, mut at_t) = (0.0f64, grid.t_start());
    for (i, (p, e)) in perfect.values().iter().zip(effective.values()).enumerate() {
        let d = (p - e).abs();
        if d.is_finite() && d > worst {
            worst = d;
            at_t = grid.time(i);
        }
    }
    Ok(Deviation {
        observable: name,
        normalisation,
        max_relative: worst / normalisation.abs(),
        at_t,
    })
}

/// Evolves the vacuum under the perfect-blockade and the effective
/// Hamiltonian on the same grid and reports the largest deviation of β and
/// of `g₂(k)` for each requested `k`.
pub fn compare_dynamics(
    model: &EffectiveModel,
    grid: &TimeGrid,
    distances: &[usize],
    kind: PropagatorKind,
) -> Result<Comparison> {
    let manifolds = model.manifold_check()?;
    let perfect = run_series(&model.basis, &model.h_perfect, grid, distances, kind)?;
    let effective = run_series(&model.basis, &model.h_eff, grid, distances, kind)?;
    let mut deviations = vec![deviation("beta".into(), &perfect.beta, &effective.beta)?];
    for ((k, p), e) in distances.iter().zip(&perfect.g2).zip(&effective.g2) {
        deviations.push(deviation(format!("g2_{k}"), p, e)?);
    }
    Ok(Comparison {
        perfect,
        effective,
        deviations,
        manifolds,
    })
}

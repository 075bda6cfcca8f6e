//! Brute-force reference in the full `2^N` configuration space.
//!
//! Nothing here uses the symmetric basis machinery: the Hamiltonian, the
//! blockade test and the dihedral orbits are rebuilt from scratch so that
//! agreement with the reduced path is a genuine cross-check.

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::perfect_blockade_hamiltonian;
use crate::observables::{
    concurrence, correlation_of_matrix, entanglement_of_formation, two_party_correlation,
    two_party_correlation_classical, wootters_concurrence, Matrix4, SiteOperators, G2_MIN_DENSITY,
};
use crate::propagator::{Propagator, PropagatorKind, TimeGrid, Wavefunction};
use crate::ring_config::{Interaction, ModelParams};
use crate::symmetric_basis::SymmetricBasis;

pub const ORACLE_MAX_SITES: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// State vector over all `2^N` configurations, indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState {
    pub n_sites: usize,
    pub amps: Vec<Complex64>,
}

fn ring_distance(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

fn excited_sites(c: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| c >> i & 1 == 1).collect()
}

fn respects_blockade(c: usize, n: usize, m: usize) -> bool {
    let sites = excited_sites(c, n);
    sites
        .iter()
        .enumerate()
        .all(|(a, &i)| sites[a + 1..].iter().all(|&j| ring_distance(i, j, n) >= m))
}

/// Sum over ordered site pairs `(k, k + l)` of `Δ/l⁶ n_k n_{k+l}`, `l < m`.
fn interaction(c: usize, n: usize, m: usize, delta: f64) -> f64 {
    let mut e = 0.0;
    for k in 0..n {
        for l in 1..m {
            if c >> k & 1 == 1 && c >> ((k + l) % n) & 1 == 1 {
                e += delta / (l as f64).powi(6);
            }
        }
    }
    e
}

/// Dense Hamiltonian on the listed configurations together with its spectral
/// decomposition.
struct DenseModel {
    configs: Vec<usize>,
    energies: Vec<f64>,
    vectors: Mat<f64>,
}

impl DenseModel {
    fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let n = params.n_sites;
        if n > ORACLE_MAX_SITES {
            return Err(Error::TooLarge {
                what: "oracle ring size",
                n,
                limit: ORACLE_MAX_SITES,
            });
        }
        // P H₀ P vanishes outside the blockaded configurations, so for the
        // perfect blockade the support alone is diagonalised
        let configs: Vec<usize> = match params.delta {
            Interaction::Infinite => (0..1usize << n).filter(|&c| respects_blockade(c, n, params.m)).collect(),
            Interaction::Finite(_) => (0..1usize << n).collect(),
        };
        let dim = configs.len();
        let position = |c: usize| configs.binary_search(&c).ok();
        let mut h = Mat::<f64>::zeros(dim, dim);
        for (a, &c) in configs.iter().enumerate() {
            if let Interaction::Finite(d) = params.delta {
                h[(a, a)] = interaction(c, n, params.m, d);
            }
            for k in 0..n {
                if let Some(b) = position(c ^ (1 << k)) {
                    h[(b, a)] += 1.0;
                }
            }
        }
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let energies = (0..dim).map(|i| evd.S().column_vector()[i]).collect();
        Ok(Self {
            configs,
            energies,
            vectors: evd.U().to_owned(),
        })
    }

    fn evolve_vacuum(&self, n: usize, t: f64) -> FullState {
        let dim = self.configs.len();
        let v0 = self.configs.binary_search(&0).expect("vacuum is always allowed");
        let mut amps = vec![ZERO; 1 << n];
        // ψ(t) = V e^{-iEt} Vᵀ |0>
        let coeffs: Vec<Complex64> = (0..dim)
            .map(|j| Complex64::from_polar(self.vectors[(v0, j)], -self.energies[j] * t))
            .collect();
        for (i, &c) in self.configs.iter().enumerate() {
            amps[c] = (0..dim).map(|j| coeffs[j] * self.vectors[(i, j)]).sum();
        }
        FullState { n_sites: n, amps }
    }
}

/// Full-space states evolved from the vacuum at every grid time, by dense
/// diagonalisation. A perfect blockade is realised as the projected
/// dynamics `P H₀ P`.
pub fn full_space_evolve(params: &ModelParams, grid: &TimeGrid) -> Result<Vec<FullState>> {
    let model = DenseModel::new(params)?;
    Ok(grid
        .times()
        .into_iter()
        .map(|t| model.evolve_vacuum(params.n_sites, t))
        .collect())
}

/// Projection of a full-space state onto a symmetric basis.
#[derive(Clone, Debug)]
pub struct Symmetrized {
    pub psi: Wavefunction,
    /// `<ψ|ψ> − <Pψ|Pψ>`
    pub norm_deficit: f64,
}

/// All distinct images of `c` under rotations and reflection, computed
/// site by site.
fn dihedral_images(c: usize, n: usize) -> Vec<usize> {
    let sites = excited_sites(c, n);
    let mut images: Vec<usize> = (0..n)
        .flat_map(|r| {
            let rot: usize = sites.iter().map(|&i| 1 << ((i + r) % n)).sum();
            let refl: usize = sites.iter().map(|&i| 1 << ((n - i + r) % n)).sum();
            [rot, refl]
        })
        .collect();
    images.sort_unstable();
    images.dedup();
    images
}

pub fn symmetrize(full: &FullState, basis: &SymmetricBasis) -> Result<Symmetrized> {
    let n = basis.n_sites();
    if full.n_sites != n || full.amps.len() != 1 << n {
        return Err(invalid("full-space state does not match the basis ring size"));
    }
    let amps: Vec<Complex64> = basis
        .states()
        .iter()
        .map(|s| {
            let orbit = dihedral_images(s.rep().bits() as usize, n);
            let sum: Complex64 = orbit.iter().map(|&c| full.amps[c]).sum();
            sum / (orbit.len() as f64).sqrt()
        })
        .collect();
    let total: f64 = full.amps.iter().map(|a| a.norm_sqr()).sum();
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    Ok(Symmetrized {
        psi: Wavefunction::new(amps),
        norm_deficit: total - kept,
    })
}

/// Reduced matrix of sites 0 and 1, index `2 n_0 + n_1`.
pub fn full_two_site_matrix(full: &FullState) -> Matrix4 {
    let mut rho = [[ZERO; 4]; 4];
    for rest in 0..(1usize << (full.n_sites - 2)) {
        let base = rest << 2;
        let amp = |s: usize| full.amps[base | (s >> 1) | ((s & 1) << 1)];
        for (a, row) in rho.iter_mut().enumerate() {
            for (b, x) in row.iter_mut().enumerate() {
                *x += amp(a) * amp(b).conj();
            }
        }
    }
    rho
}

/// The observables of a sample evaluated with general-purpose formulas.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullObservables {
    pub beta: f64,
    pub n_ryd: f64,
    /// `g₂(k)` for `k = 1..N`; `None` below the density floor.
    pub g2: Vec<Option<f64>>,
    pub mc: f64,
    pub mc_class: f64,
    pub concurrence: f64,
    pub eof: f64,
}

pub fn full_observables(full: &FullState) -> Result<FullObservables> {
    let n = full.n_sites;
    let prob = |c: usize| full.amps[c].norm_sqr();
    let beta: f64 = (0..full.amps.len()).filter(|c| c & 1 == 1).map(prob).sum();
    let n_ryd: f64 = (0..full.amps.len()).map(|c| c.count_ones() as f64 * prob(c)).sum();
    let g2 = (1..n)
        .map(|k| {
            let pair: f64 = (0..full.amps.len()).filter(|c| c & 1 == 1 && c >> k & 1 == 1).map(prob).sum();
            (beta >= G2_MIN_DENSITY).then(|| pair / (beta * beta))
        })
        .collect();
    let rho = full_two_site_matrix(full);
    let mut diag = [[ZERO; 4]; 4];
    for i in 0..4 {
        diag[i][i] = rho[i][i];
    }
    let concurrence = wootters_concurrence(&rho)?;
    Ok(FullObservables {
        beta,
        n_ryd,
        g2,
        mc: correlation_of_matrix(&rho)?,
        mc_class: correlation_of_matrix(&diag)?,
        concurrence,
        eof: entanglement_of_formation(concurrence),
    })
}

/// Largest differences between the oracle and the symmetric-basis
/// perfect-blockade run, per observable.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OracleReport {
    pub samples: usize,
    pub beta: f64,
    pub n_ryd: f64,
    pub g2: f64,
    pub mc: f64,
    pub mc_class: f64,
    pub concurrence: f64,
    pub eof: f64,
    pub amplitudes: f64,
    pub norm_deficit: f64,
}

impl OracleReport {
    /// Largest observable deviation.
    pub fn max_deviation(&self) -> f64 {
        [
            self.beta,
            self.n_ryd,
            self.g2,
            self.mc,
            self.mc_class,
            self.concurrence,
            self.eof,
            self.amplitudes,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn option_gap(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

/// Runs the perfect-blockade model both ways and reports the deviations.
pub fn compare_with_reduced(params: &ModelParams, grid: &TimeGrid) -> Result<OracleReport> {
    if params.delta != Interaction::Infinite {
        return Err(invalid("the oracle comparison covers the perfect blockade only"));
    }
    let n = params.n_sites;
    let full = full_space_evolve(params, grid)?;
    let (basis, h) = perfect_blockade_hamiltonian(params)?;
    let ops = SiteOperators::new(&basis)?;
    let prop = Propagator::new(&h, PropagatorKind::Spectral)?;
    let mut r = OracleReport {
        samples: grid.len(),
        ..OracleReport::default()
    };
    let mut i = 0;
    prop.evolve_with(&Wavefunction::vacuum(&basis)?, grid, |_, _, psi| {
        let f = &full[i];
        i += 1;
        let sym = symmetrize(f, &basis)?;
        let o = full_observables(f)?;
        let dm = ops.two_site_dm(psi);
        let c = concurrence(&dm);
        let up = |slot: &mut f64, d: f64| *slot = slot.max(d);
        up(&mut r.norm_deficit, sym.norm_deficit.abs());
        up(&mut r.amplitudes, sym.psi.max_abs_diff(psi));
        up(&mut r.beta, (o.beta - dm.beta).abs());
        up(&mut r.n_ryd, (o.n_ryd - n as f64 * dm.beta).abs());
        up(&mut r.mc, (o.mc - two_party_correlation(&dm)?).abs());
        up(&mut r.mc_class, (o.mc_class - two_party_correlation_classical(&dm)).abs());
        up(&mut r.concurrence, (o.concurrence - c).abs());
        up(&mut r.eof, (o.eof - entanglement_of_formation(c)).abs());
        for k in 1..n {
            up(&mut r.g2, option_gap(o.g2[k - 1], ops.g2(psi, k)?));
        }
        Ok(())
    })?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric_basis::Sector;

    #[test]
    fn three_site_blockaded_support() {
        let allowed: Vec<usize> = (0..8).filter(|&c| respects_blockade(c, 3, 2)).collect();
        assert_eq!(allowed, vec![0, 1, 2, 4]);
        assert_eq!(dihedral_images(0b0011, 4).len(), 4);
        assert_eq!(dihedral_images(0b0101, 4).len(), 2);
    }

    #[test]
    fn vacuum_at_zero() {
        let grid = TimeGrid::from_zero(0.1, 0.1).unwrap();
        let states = full_space_evolve(&ModelParams::perfect(6, 2).unwrap(), &grid).unwrap();
        assert!((states[0].amps[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(states[0].amps[1..].iter().all(|a| a.norm() < 1e-14));
        let obs = full_observables(&states[0]).unwrap();
        assert!(obs.beta < 1e-28);
        assert!(obs.g2.iter().all(Option::is_none));
    }

    #[test]
    fn three_sites_closed_form() {
        // vacuum couples to the symmetric single excitation with √3
        let grid = TimeGrid::from_zero(2.0, 0.25).unwrap();
        let states = full_space_evolve(&ModelParams::perfect(3, 2).unwrap(), &grid).unwrap();
        for (s, t) in states.iter().zip(grid.times()) {
            let beta = full_observables(s).unwrap().beta;
            let expected = (3f64.sqrt() * t).sin().powi(2) / 3.0;
            assert!((beta - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_norms() {
        let p = ModelParams::perfect(8, 2).unwrap();
        let basis = SymmetricBasis::build(&p, Sector::Blockaded(2)).unwrap();
        let grid = TimeGrid::from_zero(3.0, 0.5).unwrap();
        for s in full_space_evolve(&p, &grid).unwrap() {
            assert!(symmetrize(&s, &basis).unwrap().norm_deficit.abs() < 1e-10);
        }
        let mut asym = FullState {
            n_sites: 8,
            amps: vec![ZERO; 256],
        };
        asym.amps[1] = Complex64::new(1.0, 0.0);
        let sym = symmetrize(&asym, &basis).unwrap();
        assert!(sym.norm_deficit > 0.5);
        let wrong = SymmetricBasis::build(&ModelParams::perfect(6, 2).unwrap(), Sector::Blockaded(2)).unwrap();
        assert!(symmetrize(&asym, &wrong).is_err());
    }

    #[test]
    fn reduced_run_agrees() {
        let grid = TimeGrid::from_zero(10.0, 0.1).unwrap();
        let r = compare_with_reduced(&ModelParams::perfect(8, 2).unwrap(), &grid).unwrap();
        assert_eq!(r.samples, grid.len());
        assert!(r.max_deviation() < 1e-10, "{r:?}");
        assert!(r.norm_deficit < 1e-10);
        let finite = ModelParams::new(8, 2, Interaction::Finite(30.0)).unwrap();
        assert!(compare_with_reduced(&finite, &grid).is_err());
    }

    #[test]
    fn refuses_large_rings() {
        let grid = TimeGrid::from_zero(1.0, 0.5).unwrap();
        assert!(full_space_evolve(&ModelParams::perfect(13, 2).unwrap(), &grid).is_err());
    }
}

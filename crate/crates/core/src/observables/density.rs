//! Two-site reduced density matrix, Rydberg density and density-density
//! correlations.
//!
//! Two routes are provided. [`two_site_dm`] expands the symmetric state onto
//! raw configurations and performs the partial trace directly.
//! [`SiteOperators`] precomputes the translation-averaged local operators
//! in the symmetric basis so that a sample costs one pass over the state;
//! it is what the time series use.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::symmetrized_operator;
use crate::propagator::Wavefunction;
use crate::ring_config::pairs_at_distance;
use crate::sparse::CsrMatrix;
use crate::symmetric_basis::{ConfigExpansion, Sector, SymmetricBasis};

/// Below this density the normalised correlator is reported as undefined.
pub const G2_MIN_DENSITY: f64 = 1e-8;

/// Reduced state of two adjacent sites in the basis `{gg, gr, rg, rr}`:
///
/// ```text
/// | α   γ   γ   0 |
/// | γ*  β   δ   0 |
/// | γ*  δ*  β   0 |
/// | 0   0   0   0 |
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSiteDM {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

/// Dense 4×4 complex matrix, row-major.
pub type Matrix4 = [[Complex64; 4]; 4];
pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl TwoSiteDM {
    pub fn vacuum() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            gamma: ZERO,
            delta: ZERO,
        }
    }

    pub fn matrix(&self) -> Matrix4 {
        let (a, b, g, d) = (re(self.alpha), re(self.beta), self.gamma, self.delta);
        [
            [a, g, g, ZERO],
            [g.conj(), b, d, ZERO],
            [g.conj(), d.conj(), b, ZERO],
            [ZERO; 4],
        ]
    }

    /// State of one site after tracing out its neighbour.
    pub fn single_site(&self) -> Matrix2 {
        [[re(1.0 - self.beta), self.gamma], [self.gamma.conj(), re(self.beta)]]
    }

    /// Checks unit trace, Hermiticity and positivity within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let trace = self.alpha + 2.0 * self.beta;
        if (trace - 1.0).abs() > tol {
            return Err(invalid(format!("two-site trace alpha + 2 beta = {trace}")));
        }
        if self.alpha < -tol || self.beta < -tol {
            return Err(invalid("negative populations in two-site density matrix"));
        }
        let min_eig = super::entanglement::hermitian_eigenvalues4(&self.matrix())?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -tol {
            return Err(invalid(format!("two-site density matrix has eigenvalue {min_eig}")));
        }
        Ok(())
    }
}

/// Mean Rydberg occupation per site.
pub fn rydberg_density(dm: &TwoSiteDM) -> f64 {
    dm.beta
}

fn check_blockaded(basis: &SymmetricBasis) -> Result<()> {
    match basis.sector() {
        Sector::Blockaded(m) if m >= 2 => Ok(()),
        Sector::NuEquals(0) => Ok(()),
        _ => Err(Error::NotBlockaded),
    }
}

fn check_dim(basis: &SymmetricBasis, psi: &Wavefunction) -> Result<()> {
    if psi.dim() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: psi.dim(),
        });
    }
    Ok(())
}

/// Amplitudes of a symmetric state on every raw configuration of its sector.
pub struct ExpandedState<'e> {
    expansion: &'e ConfigExpansion,
    amps: Vec<Complex64>,
}

impl<'e> ExpandedState<'e> {
    pub fn new(expansion: &'e ConfigExpansion, psi: &Wavefunction) -> Self {
        Self {
            expansion,
            amps: expansion.expand(psi.amps()),
        }
    }

    fn amp(&self, bits: u32) -> Option<Complex64> {
        self.expansion.position(bits).map(|i| self.amps[i])
    }

    /// Partial trace over all sites except 0 and 1.
    pub fn two_site_dm(&self) -> TwoSiteDM {
        let mut dm = TwoSiteDM {
            alpha: 0.0,
            beta: 0.0,
            gamma: ZERO,
            delta: ZERO,
        };
        for (&c, &a) in self.expansion.configs().iter().zip(&self.amps) {
            let p = a.norm_sqr();
            if c & 1 == 1 {
                dm.beta += p;
            }
            match c & 0b11 {
                0b00 => {
                    dm.alpha += p;
                    if let Some(b) = self.amp(c | 0b10) {
                        dm.gamma += a * b.conj();
                    }
                }
                0b10 => {
                    if let Some(b) = self.amp((c & !0b10) | 0b01) {
                        dm.delta += a * b.conj();
                    }
                }
                _ => {}
            }
        }
        dm
    }

    /// `<n_0 n_k>`
    pub fn pair_correlation(&self, k: usize) -> f64 {
        let bit = 1u32 << k;
        self.expansion
            .configs()
            .iter()
            .zip(&self.amps)
            .filter(|(&c, _)| c & 1 == 1 && c & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// Reduced density matrix of sites 0 and 1 for a state in a blockaded
/// symmetric basis, by explicit partial trace.
pub fn two_site_dm(basis: &SymmetricBasis, psi: &Wavefunction) -> Result<TwoSiteDM> {
    check_blockaded(basis)?;
    check_dim(basis, psi)?;
    let expansion = basis.expansion();
    Ok(ExpandedState::new(&expansion, psi).two_site_dm())
}

/// Normalised density-density correlation `<n_0 n_k> / <n_0>^2`, computed by
/// expanding onto raw configurations. `None` while the density is below
/// [`G2_MIN_DENSITY`].
pub fn g2(basis: &SymmetricBasis, psi: &Wavefunction, k: usize) -> Result<Option<f64>> {
    check_blockaded(basis)?;
    check_dim(basis, psi)?;
    check_distance(basis.n_sites(), k)?;
    let expansion = basis.expansion();
    let state = ExpandedState::new(&expansion, psi);
    let beta = state.two_site_dm().beta;
    Ok(normalised(state.pair_correlation(k), beta))
}

fn check_distance(n: usize, k: usize) -> Result<()> {
    if !(1..n).contains(&k) {
        return Err(invalid(format!("correlation distance {k} outside 1..{n}")));
    }
    Ok(())
}

fn normalised(pair: f64, beta: f64) -> Option<f64> {
    (beta >= G2_MIN_DENSITY).then(|| pair / (beta * beta))
}

/// Translation-averaged local operators in a symmetric basis.
///
/// For a dihedral-invariant state every site pair is equivalent, so
/// `β = <N_Ryd>/N`, `<n_0 n_k> = <Σ_j n_j n_{j+k}>/N`,
/// `γ = <Σ_j σ⁺_j>/N` restricted to the sector, and
/// `δ = <Σ_j (σ⁺_j σ⁻_{j+1} + h.c.)>/(2N)`.
#[derive(Clone, Debug)]
pub struct SiteOperators {
    n_sites: usize,
    occupation: Vec<f64>,
    pairs: Vec<Vec<f64>>,
    raising: CsrMatrix,
    hopping: CsrMatrix,
}

impl SiteOperators {
    pub fn new(basis: &SymmetricBasis) -> Result<Self> {
        check_blockaded(basis)?;
        let n = basis.n_sites();
        let nf = n as f64;
        let occupation = basis
            .states()
            .iter()
            .map(|s| s.excitation_count() as f64 / nf)
            .collect();
        let pairs = (1..n)
            .map(|k| {
                basis
                    .states()
                    .iter()
                    .map(|s| pairs_at_distance(s.rep().bits(), k, n) as f64 / nf)
                    .collect()
            })
            .collect();
        let raising = symmetrized_operator(basis, basis, |c, out| {
            for k in 0..n {
                if c >> k & 1 == 0 {
                    out.push((c | 1 << k, 1.0));
                }
            }
        })?;
        let hopping = symmetrized_operator(basis, basis, |c, out| {
            for k in 0..n {
                let bond = 1 << k | 1 << ((k + 1) % n);
                if (c & bond).count_ones() == 1 {
                    out.push((c ^ bond, 1.0));
                }
            }
        })?;
        Ok(Self {
            n_sites: n,
            occupation,
            pairs,
            raising,
            hopping,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn diagonal(weights: &[f64], psi: &Wavefunction) -> f64 {
        weights.iter().zip(psi.amps()).map(|(w, a)| w * a.norm_sqr()).sum()
    }

    pub fn density(&self, psi: &Wavefunction) -> f64 {
        Self::diagonal(&self.occupation, psi)
    }

    /// `<n_0 n_k>` for `1 <= k < N`.
    pub fn pair_correlation(&self, psi: &Wavefunction, k: usize) -> Result<f64> {
        check_distance(self.n_sites, k)?;
        Ok(Self::diagonal(&self.pairs[k - 1], psi))
    }

    pub fn g2(&self, psi: &Wavefunction, k: usize) -> Result<Option<f64>> {
        Ok(normalised(self.pair_correlation(psi, k)?, self.density(psi)))
    }

    pub fn two_site_dm(&self, psi: &Wavefunction) -> TwoSiteDM {
        let nf = self.n_sites as f64;
        let beta = self.density(psi);
        let gamma = self.raising.sandwich(psi.amps(), psi.amps()) / nf;
        let delta = self.hopping.sandwich(psi.amps(), psi.amps()) / (2.0 * nf);
        TwoSiteDM {
            alpha: 1.0 - 2.0 * beta,
            beta,
            gamma,
            delta,
        }
    }
}

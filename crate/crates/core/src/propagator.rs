//! Time evolution `Ψ(t) = exp(-iHt) Ψ(0)` with ħ = ε = 1.
//!
//! Small problems are diagonalised once and sampled through the spectral
//! decomposition; large ones are stepped with a Lanczos (Krylov-subspace)
//! exponential acting on the sparse Hamiltonian.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::HermitianMatrix;
use crate::symmetric_basis::SymmetricBasis;

pub const DEFAULT_DT: f64 = 0.02;
pub const DEFAULT_T_END: f64 = 200.0;
/// Above this dimension `PropagatorKind::Auto` switches to Krylov stepping.
pub const DEFAULT_DENSE_THRESHOLD: usize = 1200;
/// Target absolute error per Krylov step for a normalised state.
pub const DEFAULT_KRYLOV_TOL: f64 = 1e-12;
const KRYLOV_MAX_DIM: usize = 40;
const SPECTRAL_BATCH: usize = 64;

/// Uniform sampling grid `t_start, t_start + dt, ..., t_end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    dt: f64,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, dt: f64) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite() && dt.is_finite()) {
            return Err(invalid("time grid bounds must be finite"));
        }
        if t_start < 0.0 || t_end <= t_start {
            return Err(invalid(format!("need 0 <= t_start < t_end, got [{t_start}, {t_end}]")));
        }
        if dt <= 0.0 {
            return Err(invalid(format!("time step {dt} must be positive")));
        }
        Ok(Self { t_start, t_end, dt })
    }

    /// `[0, t_end]` with step `dt`.
    pub fn from_zero(t_end: f64, dt: f64) -> Result<Self> {
        Self::new(0.0, t_end, dt)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_start: 0.0,
            t_end: DEFAULT_T_END,
            dt: DEFAULT_DT,
        }
    }
}

/// Complex amplitude vector over some basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavefunction {
    amps: Vec<Complex64>,
}

impl Wavefunction {
    pub fn new(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    /// Unit amplitude on basis vector `index`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// The state with no excitations, expressed in a symmetric basis.
    pub fn vacuum(basis: &SymmetricBasis) -> Result<Self> {
        let i = basis.vacuum_index().ok_or(Error::MissingVacuum)?;
        Ok(Self::basis_state(basis.len(), i))
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// `<Ψ|H|Ψ>`
    pub fn energy(&self, h: &HermitianMatrix) -> f64 {
        h.csr().sandwich(&self.amps, &self.amps).re
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// How `Propagator::new` chooses its method.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PropagatorKind {
    /// Spectral up to `dense_threshold`, Krylov above.
    Auto { dense_threshold: usize },
    Spectral,
    Krylov { tol: f64 },
}

impl Default for PropagatorKind {
    fn default() -> Self {
        PropagatorKind::Auto {
            dense_threshold: DEFAULT_DENSE_THRESHOLD,
        }
    }
}

/// Eigenpairs of a real symmetric matrix.
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
}

impl SpectralDecomposition {
    pub fn new(h: &HermitianMatrix) -> Result<Self> {
        let evd = h
            .to_dense()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let eigenvalues = (0..h.dim()).map(|i| evd.S()[i]).collect();
        let eigenvectors = evd.U().to_owned();
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn coefficients(&self, psi: &Wavefunction) -> (Vec<f64>, Vec<f64>) {
        let d = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut re = vec![0.0; d];
        let mut im = vec![0.0; d];
        for k in 0..d {
            let col = v.col(k);
            let (mut r, mut i) = (0.0, 0.0);
            for (j, a) in psi.amps().iter().enumerate() {
                r += col[j] * a.re;
                i += col[j] * a.im;
            }
            re[k] = r;
            im[k] = i;
        }
        (re, im)
    }

    /// Propagates `psi` to every time in `times`, calling `f(i, psi(t_i))`.
    fn sample(
        &self,
        psi: &Wavefunction,
        times: &[f64],
        f: &mut dyn FnMut(usize, &Wavefunction) -> Result<()>,
    ) -> Result<()> {
        let d = self.eigenvalues.len();
        let (c_re, c_im) = self.coefficients(psi);
        let mut offset = 0;
        for chunk in times.chunks(SPECTRAL_BATCH) {
            let phases = Mat::from_fn(d, 2 * chunk.len(), |k, col| {
                let (s, c) = (self.eigenvalues[k] * chunk[col / 2]).sin_cos();
                if col % 2 == 0 {
                    c * c_re[k] + s * c_im[k]
                } else {
                    c * c_im[k] - s * c_re[k]
                }
            });
            let out = &self.eigenvectors * &phases;
            for (j, _) in chunk.iter().enumerate() {
                let amps = (0..d)
                    .map(|i| Complex64::new(out[(i, 2 * j)], out[(i, 2 * j + 1)]))
                    .collect();
                f(offset + j, &Wavefunction::new(amps))?;
            }
            offset += chunk.len();
        }
        Ok(())
    }
}

enum Method {
    Spectral(SpectralDecomposition),
    Krylov { tol: f64 },
}

/// Propagator for a fixed, time-independent Hamiltonian.
pub struct Propagator<'h> {
    h: &'h HermitianMatrix,
    method: Method,
}

impl<'h> Propagator<'h> {
    pub fn new(h: &'h HermitianMatrix, kind: PropagatorKind) -> Result<Self> {
        let method = match kind {
            PropagatorKind::Auto { dense_threshold } if h.dim() > dense_threshold => Method::Krylov {
                tol: DEFAULT_KRYLOV_TOL,
            },
            PropagatorKind::Auto { .. } | PropagatorKind::Spectral => {
                Method::Spectral(SpectralDecomposition::new(h)?)
            }
            PropagatorKind::Krylov { tol } => {
                if !(tol > 0.0) {
                    return Err(invalid("krylov tolerance must be positive"));
                }
                Method::Krylov { tol }
            }
        };
        Ok(Self { h, method })
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.method, Method::Spectral(_))
    }

    pub fn hamiltonian(&self) -> &HermitianMatrix {
        self.h
    }

    fn check(&self, psi: &Wavefunction) -> Result<()> {
        if psi.dim() != self.h.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.h.dim(),
                got: psi.dim(),
            });
        }
        Ok(())
    }

    /// `exp(-iHt) psi` for any real `t`, including negative times.
    pub fn propagate(&self, psi: &Wavefunction, t: f64) -> Result<Wavefunction> {
        self.check(psi)?;
        match &self.method {
            Method::Spectral(sd) => {
                let mut out = None;
                sd.sample(psi, &[t], &mut |_, p| {
                    out = Some(p.clone());
                    Ok(())
                })?;
                Ok(out.expect("one sample"))
            }
            Method::Krylov { tol } => krylov_propagate(self.h, psi.amps(), t, *tol).map(Wavefunction::new),
        }
    }

    /// Samples the evolution of `psi0` (given at t = 0) on `grid`.
    pub fn evolve_with(
        &self,
        psi0: &Wavefunction,
        grid: &TimeGrid,
        mut f: impl FnMut(usize, f64, &Wavefunction) -> Result<()>,
    ) -> Result<()> {
        self.check(psi0)?;
        let times = grid.times();
        match &self.method {
            Method::Spectral(sd) => sd.sample(psi0, &times, &mut |i, psi| f(i, times[i], psi)),
            Method::Krylov { tol } => {
                let mut psi = if grid.t_start() > 0.0 {
                    krylov_propagate(self.h, psi0.amps(), grid.t_start(), *tol)?
                } else {
                    psi0.amps().to_vec()
                };
                for (i, &t) in times.iter().enumerate() {
                    if i > 0 {
                        psi = krylov_propagate(self.h, &psi, t - times[i - 1], *tol)?;
                    }
                    f(i, t, &Wavefunction::new(psi.clone()))?;
                }
                Ok(())
            }
        }
    }

    pub fn evolve(&self, psi0: &Wavefunction, grid: &TimeGrid) -> Result<Vec<Wavefunction>> {
        let mut out = Vec::with_capacity(grid.len());
        self.evolve_with(psi0, grid, |_, _, psi| {
            out.push(psi.clone());
            Ok(())
        })?;
        Ok(out)
    }
}

/// Samples `exp(-iHt) psi0` on `grid` with the default method choice.
pub fn evolve(h: &HermitianMatrix, psi0: &Wavefunction, grid: &TimeGrid) -> Result<Vec<Wavefunction>> {
    Propagator::new(h, PropagatorKind::default())?.evolve(psi0, grid)
}

/// `exp(-iHt) v` by adaptive Lanczos substeps.
fn krylov_propagate(h: &HermitianMatrix, v: &[Complex64], t: f64, tol: f64) -> Result<Vec<Complex64>> {
    let mut psi = v.to_vec();
    let mut remaining = t;
    let mut step = t;
    let mut guard = 0usize;
    while remaining.abs() > 0.0 {
        if step.abs() > remaining.abs() {
            step = remaining;
        }
        match lanczos_exp(h, &psi, step, tol)? {
            Some(next) => {
                psi = next;
                remaining -= step;
            }
            None => {
                step *= 0.5;
                guard += 1;
                if guard > 60 {
                    return Err(Error::Krylov(format!("step size underflow propagating by {t}")));
                }
            }
        }
    }
    Ok(psi)
}

/// One Lanczos approximation of `exp(-i tau H) v`; `None` when the error
/// estimate exceeds `tol` at the maximal subspace dimension.
fn lanczos_exp(h: &HermitianMatrix, v: &[Complex64], tau: f64, tol: f64) -> Result<Option<Vec<Complex64>>> {
    let dim = v.len();
    let beta0 = norm(v);
    if beta0 == 0.0 {
        return Ok(Some(v.to_vec()));
    }
    let max_m = KRYLOV_MAX_DIM.min(dim);
    let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|a| a / beta0).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..max_m {
        h.csr().mul_vec_into(&basis[j], &mut w);
        let a: f64 = basis[j].iter().zip(&w).map(|(q, x)| (q.conj() * x).re).sum();
        alpha.push(a);
        // full reorthogonalisation, applied twice
        for _ in 0..2 {
            for q in &basis {
                let c: Complex64 = q.iter().zip(&w).map(|(qi, x)| qi.conj() * x).sum();
                for (x, qi) in w.iter_mut().zip(q) {
                    *x -= c * qi;
                }
            }
        }
        let b = norm(&w);
        let m = j + 1;
        let y = small_exp(&alpha, &beta, tau)?;
        let err = beta0 * b * y[m - 1].norm();
        if err <= tol || b <= 1e-14 || m == dim {
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for (yi, q) in y.iter().zip(&basis) {
                let s = yi * beta0;
                for (o, qi) in out.iter_mut().zip(q) {
                    *o += s * qi;
                }
            }
            return Ok(Some(out));
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Ok(None)
}

/// `exp(-i tau T) e_1` for the symmetric tridiagonal `T`.
fn small_exp(alpha: &[f64], beta: &[f64], tau: f64) -> Result<Vec<Complex64>> {
    let m = alpha.len();
    let t = Mat::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let evd = t
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let (s, u) = (evd.S(), evd.U());
    Ok((0..m)
        .map(|i| {
            (0..m)
                .map(|k| Complex64::from_polar(u[(i, k)] * u[(0, k)], -tau * s[k]))
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::perfect_blockade_hamiltonian;
    use crate::ring_config::ModelParams;
    use crate::sparse::CsrMatrix;

    fn two_level() -> HermitianMatrix {
        HermitianMatrix::from_csr(CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 1.0)])).unwrap()
    }

    #[test]
    fn grid_bookkeeping() {
        let g = TimeGrid::from_zero(200.0, 0.02).unwrap();
        assert_eq!(g.len(), 10001);
        assert!((g.time(10000) - 200.0).abs() < 1e-9);
        assert!(TimeGrid::new(1.0, 1.0, 0.1).is_err());
        assert!(TimeGrid::new(-1.0, 1.0, 0.1).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
        assert_eq!(TimeGrid::default().len(), 10001);
    }

    #[test]
    fn rabi_oscillation() {
        let h = two_level();
        let psi0 = Wavefunction::basis_state(2, 0);
        let grid = TimeGrid::from_zero(3.0, 0.1).unwrap();
        for kind in [PropagatorKind::Spectral, PropagatorKind::Krylov { tol: 1e-13 }] {
            let p = Propagator::new(&h, kind).unwrap();
            p.evolve_with(&psi0, &grid, |_, t, psi| {
                let expect = [Complex64::new(t.cos(), 0.0), Complex64::new(0.0, -t.sin())];
                for (a, b) in psi.amps().iter().zip(expect) {
                    assert!((a - b).norm() < 1e-12, "t={t}");
                }
                Ok(())
            })
            .unwrap();
            let at0 = p.propagate(&psi0, 0.0).unwrap();
            assert!(at0.max_abs_diff(&psi0) < 1e-15);
        }
    }

    #[test]
    fn vacuum_state() {
        let (basis, h) = perfect_blockade_hamiltonian(&ModelParams::perfect(10, 2).unwrap()).unwrap();
        let v = Wavefunction::vacuum(&basis).unwrap();
        assert_eq!(v.amps()[0], Complex64::new(1.0, 0.0));
        assert_eq!(v.norm(), 1.0);
        assert_eq!(v.energy(&h), 0.0);
        let p = ModelParams::perfect(10, 2).unwrap();
        let excited = SymmetricBasis::build(&p, crate::Sector::NuEquals(1)).unwrap();
        assert_eq!(Wavefunction::vacuum(&excited), Err(Error::MissingVacuum));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let h = two_level();
        let p = Propagator::new(&h, PropagatorKind::Spectral).unwrap();
        assert!(p.propagate(&Wavefunction::basis_state(3, 0), 1.0).is_err());
    }

    #[test]
    fn spectral_and_krylov_agree() {
        let (basis, h) = perfect_blockade_hamiltonian(&ModelParams::perfect(18, 2).unwrap()).unwrap();
        let psi0 = Wavefunction::vacuum(&basis).unwrap();
        let grid = TimeGrid::from_zero(20.0, 0.05).unwrap();
        let spectral = Propagator::new(&h, PropagatorKind::Spectral).unwrap().evolve(&psi0, &grid).unwrap();
        let krylov = Propagator::new(&h, PropagatorKind::Krylov { tol: DEFAULT_KRYLOV_TOL })
            .unwrap()
            .evolve(&psi0, &grid)
            .unwrap();
        let worst = spectral
            .iter()
            .zip(&krylov)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "max deviation {worst}");
    }

    #[test]
    fn conservation_and_reversal() {
        let (basis, h) = perfect_blockade_hamiltonian(&ModelParams::perfect(14, 2).unwrap()).unwrap();
        let psi0 = Wavefunction::vacuum(&basis).unwrap();
        for kind in [PropagatorKind::Spectral, PropagatorKind::Krylov { tol: DEFAULT_KRYLOV_TOL }] {
            let p = Propagator::new(&h, kind).unwrap();
            let grid = TimeGrid::from_zero(50.0, 0.5).unwrap();
            p.evolve_with(&psi0, &grid, |_, _, psi| {
                assert!((psi.norm() - 1.0).abs() < 1e-10);
                assert!(psi.energy(&h).abs() < 1e-9);
                Ok(())
            })
            .unwrap();
            let forward = p.propagate(&psi0, 7.3).unwrap();
            let back = p.propagate(&forward, -7.3).unwrap();
            assert!(back.max_abs_diff(&psi0) < 1e-8);
        }
    }

    #[test]
    fn offset_grid_matches_direct_propagation() {
        let (basis, h) = perfect_blockade_hamiltonian(&ModelParams::perfect(12, 2).unwrap()).unwrap();
        let psi0 = Wavefunction::vacuum(&basis).unwrap();
        let grid = TimeGrid::new(5.0, 6.0, 0.25).unwrap();
        for kind in [PropagatorKind::Spectral, PropagatorKind::Krylov { tol: 1e-12 }] {
            let p = Propagator::new(&h, kind).unwrap();
            let samples = p.evolve(&psi0, &grid).unwrap();
            let direct = p.propagate(&psi0, 6.0).unwrap();
            assert!(samples.last().unwrap().max_abs_diff(&direct) < 1e-9);
        }
    }
}

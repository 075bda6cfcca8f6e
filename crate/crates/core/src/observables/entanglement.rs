//! Two-party correlation, concurrence and entanglement of formation of a
//! two-site state.

use faer::{Mat, Side};
use num_complex::Complex64;

use super::density::{Matrix2, Matrix4, TwoSiteDM};
use crate::error::{Error, Result};

/// Eigenvalues of ρ below this are treated as exact zeros when forming the
/// concurrence; keeping them only injects square-root noise.
const RANK_CUTOFF: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn to_mat(m: &Matrix4) -> Mat<Complex64> {
    Mat::from_fn(4, 4, |i, j| m[i][j])
}

pub(crate) fn hermitian_eigenvalues4(m: &Matrix4) -> Result<Vec<f64>> {
    to_mat(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))
}

pub fn kron2(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

/// Reduced state of the first site of a two-site matrix.
pub fn trace_second(rho: &Matrix4) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = rho[2 * a][2 * b] + rho[2 * a + 1][2 * b + 1];
        }
    }
    out
}

/// Reduced state of the second site of a two-site matrix.
pub fn trace_first(rho: &Matrix4) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = rho[a][b] + rho[2 + a][2 + b];
        }
    }
    out
}

/// `(2/3) Σ |λ_i|` over the eigenvalues of `ρ − ρ_A ⊗ ρ_B` for a general
/// two-site matrix.
pub fn correlation_of_matrix(rho: &Matrix4) -> Result<f64> {
    let product = kron2(&trace_second(rho), &trace_first(rho));
    let mut diff = *rho;
    for i in 0..4 {
        for j in 0..4 {
            diff[i][j] -= product[i][j];
        }
    }
    let eig = hermitian_eigenvalues4(&diff)?;
    Ok(2.0 / 3.0 * eig.iter().map(|x| x.abs()).sum::<f64>())
}

/// Two-party correlation `M_C` of a translation-invariant two-site state.
pub fn two_party_correlation(dm: &TwoSiteDM) -> Result<f64> {
    let rho1 = dm.single_site();
    let product = kron2(&rho1, &rho1);
    let mut diff = dm.matrix();
    for i in 0..4 {
        for j in 0..4 {
            diff[i][j] -= product[i][j];
        }
    }
    let eig = hermitian_eigenvalues4(&diff)?;
    Ok(2.0 / 3.0 * eig.iter().map(|x| x.abs()).sum::<f64>())
}

/// `M_C` of the classical (diagonal) part of the state: `(8/3) β²`.
pub fn two_party_correlation_classical(dm: &TwoSiteDM) -> f64 {
    8.0 / 3.0 * dm.beta * dm.beta
}

/// Concurrence of a structured two-site state, `C = 2 min(β, |δ|)`.
pub fn concurrence(dm: &TwoSiteDM) -> f64 {
    (2.0 * dm.beta.min(dm.delta.norm())).max(0.0)
}

/// Wootters concurrence of an arbitrary two-qubit density matrix.
///
/// With `ρ = Σ p_i |u_i><u_i|` and `v_i = √p_i u_i`, the values `λ_i` are the
/// singular values of the complex symmetric matrix `τ_ij = v_iᵀ (σ_y⊗σ_y) v_j`.
pub fn wootters_concurrence(rho: &Matrix4) -> Result<f64> {
    let evd = to_mat(rho)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let kept: Vec<usize> = (0..4).filter(|&i| s[i].re > RANK_CUTOFF).collect();
    if kept.is_empty() {
        return Ok(0.0);
    }
    // σ_y⊗σ_y in {gg, gr, rg, rr}: entries (0,3)=(3,0)=-1, (1,2)=(2,1)=1
    let flip = |v: &dyn Fn(usize) -> Complex64, w: &dyn Fn(usize) -> Complex64| {
        -v(0) * w(3) + v(1) * w(2) + v(2) * w(1) - v(3) * w(0)
    };
    let k = kept.len();
    let tau = Mat::from_fn(k, k, |a, b| {
        let (i, j) = (kept[a], kept[b]);
        let (pi, pj) = (s[i].re.sqrt(), s[j].re.sqrt());
        flip(&|r| u[(r, i)], &|r| u[(r, j)]) * (pi * pj)
    });
    let mut lambda = tau.singular_values().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    lambda.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = lambda.iter().skip(1).sum();
    Ok((lambda[0] - rest).max(0.0))
}

/// Binary entropy in bits.
fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Entanglement of formation from the concurrence.
pub fn entanglement_of_formation(concurrence: f64) -> f64 {
    let c = concurrence.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

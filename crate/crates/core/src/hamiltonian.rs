//! Laser and interaction Hamiltonians in units of the collective Rabi energy.
//!
//! `H/ε = Σ_k (r_k + r_k†) + Σ_k Σ_{l=1}^{m-1} Δ_l n_k n_{k+l}` with
//! `Δ_l = Δ / l^6`.

use faer::{Mat, Side};

use crate::error::{invalid, Error, Result};
use crate::ring_config::{mask, pairs_at_distance, ModelParams};
use crate::sparse::CsrMatrix;
use crate::symmetric_basis::{Sector, SymmetricBasis};

/// Largest ring for which the full `2^N` configuration space is assembled.
pub const FULL_SPACE_MAX_SITES: usize = 14;

/// Real symmetric matrix, in units of ε.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    matrix: CsrMatrix,
}

impl HermitianMatrix {
    pub fn from_csr(matrix: CsrMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        if !matrix.is_symmetric() {
            return Err(invalid("matrix is not symmetric"));
        }
        Ok(Self { matrix })
    }

    /// Symmetrises `(a + aᵀ)/2` and drops entries below `tol`.
    pub fn from_dense_symmetrized(a: &Mat<f64>, tol: f64) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let n = a.nrows();
        let sym = Mat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
        Self::from_csr(CsrMatrix::from_dense(&sym, tol))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        self.matrix.to_dense()
    }

    /// Eigenvalues in nondecreasing order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.to_dense()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Coupling block between two symmetric sectors: rows index `rows`, columns
/// index `cols`.
#[derive(Clone, Debug)]
pub struct SectorBlock {
    pub row_sector: Sector,
    pub col_sector: Sector,
    pub entries: CsrMatrix,
}

impl SectorBlock {
    pub fn transpose(&self) -> Self {
        Self {
            row_sector: self.col_sector,
            col_sector: self.row_sector,
            entries: self.entries.transpose(),
        }
    }
}

/// Matrix of a dihedral-invariant operator between two symmetric bases.
///
/// `apply(c, out)` must push `(c', <c'|O|c>)` for every configuration `c'`
/// reached from `c`. Entry `(b, a)` is
/// `sqrt(|O_a| / |O_b|) * Σ_{c' ∈ orbit(b)} <c'|O|rep(a)>`, which equals
/// `<S_b|O|S_a>` because every member of orbit `a` has the same couplings
/// into orbit `b`.
pub fn symmetrized_operator(
    rows: &SymmetricBasis,
    cols: &SymmetricBasis,
    mut apply: impl FnMut(u32, &mut Vec<(u32, f64)>),
) -> Result<CsrMatrix> {
    if rows.n_sites() != cols.n_sites() {
        return Err(invalid(format!(
            "bases for N={} and N={} cannot be coupled",
            rows.n_sites(),
            cols.n_sites()
        )));
    }
    let mut triplets = Vec::new();
    let mut reached = Vec::new();
    for (a, sa) in cols.states().iter().enumerate() {
        reached.clear();
        apply(sa.rep().bits(), &mut reached);
        for &(c, amp) in &reached {
            let Some(b) = rows.index_of_config(c) else {
                continue;
            };
            triplets.push((b, a, amp));
        }
    }
    // |O_a| n_ba = |O_b| n_ab holds exactly for integer counts, so scaling
    // after summation keeps intra-sector blocks bitwise symmetric
    let raw = CsrMatrix::from_triplets(rows.len(), cols.len(), triplets);
    let scaled = raw
        .iter()
        .map(|(b, a, v)| {
            let oa = cols.state(a).orbit_size() as f64;
            let ob = rows.state(b).orbit_size() as f64;
            (b, a, v * oa / (oa * ob).sqrt())
        })
        .collect();
    Ok(CsrMatrix::from_triplets(rows.len(), cols.len(), scaled))
}

fn push_single_flips(n: usize) -> impl FnMut(u32, &mut Vec<(u32, f64)>) {
    move |c, out| {
        for k in 0..n {
            out.push((c ^ (1 << k), 1.0));
        }
    }
}

/// `<S_b|H₀/ε|S_a>` for `b` in `rows`, `a` in `cols`.
pub fn h0_block(rows: &SymmetricBasis, cols: &SymmetricBasis) -> Result<SectorBlock> {
    let entries = symmetrized_operator(rows, cols, push_single_flips(rows.n_sites()))?;
    Ok(SectorBlock {
        row_sector: rows.sector(),
        col_sector: cols.sector(),
        entries,
    })
}

/// Laser Hamiltonian restricted to a single symmetric sector.
pub fn h0_in_basis(basis: &SymmetricBasis) -> Result<HermitianMatrix> {
    HermitianMatrix::from_csr(h0_block(basis, basis)?.entries)
}

/// Diagonal interaction energy of a raw configuration.
///
/// Counts ordered pairs `(k, k + l)` exactly as the site sum in the
/// Hamiltonian does; for `l = N/2` that counts each pair twice.
pub fn interaction_energy(bits: u32, params: &ModelParams) -> f64 {
    (1..params.m)
        .filter_map(|l| params.delta_at(l).map(|d| d * pairs_at_distance(bits, l, params.n_sites) as f64))
        .sum()
}

/// Full `2^N`-dimensional Hamiltonian including the finite interaction.
pub fn full_hamiltonian(params: &ModelParams) -> Result<HermitianMatrix> {
    params.validate()?;
    let n = params.n_sites;
    if n > FULL_SPACE_MAX_SITES {
        return Err(Error::TooLarge {
            what: "full-space Hamiltonian",
            n,
            limit: FULL_SPACE_MAX_SITES,
        });
    }
    if params.delta.finite().is_none() {
        return Err(invalid("full-space Hamiltonian needs a finite interaction strength"));
    }
    let dim = 1usize << n;
    let mut triplets = Vec::with_capacity(dim * (n + 1));
    for c in 0..=mask(n) {
        let diag = interaction_energy(c, params);
        if diag != 0.0 {
            triplets.push((c as usize, c as usize, diag));
        }
        for k in 0..n {
            triplets.push(((c ^ (1 << k)) as usize, c as usize, 1.0));
        }
    }
    HermitianMatrix::from_csr(CsrMatrix::from_triplets(dim, dim, triplets))
}

/// Perfect-blockade Hamiltonian: the laser term inside the symmetric,
/// blockaded sector containing the vacuum.
pub fn perfect_blockade_hamiltonian(params: &ModelParams) -> Result<(SymmetricBasis, HermitianMatrix)> {
    let basis = SymmetricBasis::build(params, Sector::Blockaded(params.m))?;
    let h = h0_in_basis(&basis)?;
    Ok((basis, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_config::Interaction;
    use crate::ring_config::{blockaded_bits, orbit_bits};

    fn params(n: usize, m: usize) -> ModelParams {
        ModelParams::perfect(n, m).unwrap()
    }

    /// Sandwiches the full-space projected laser term between explicitly
    /// constructed symmetric vectors.
    fn brute_symmetric_h0(n: usize, m: usize) -> (Vec<u32>, Mat<f64>) {
        let dim = 1usize << n;
        let allowed = |c: usize| blockaded_bits(c as u32, n, m);
        let mut reps: Vec<u32> = Vec::new();
        let mut vecs: Vec<Vec<f64>> = Vec::new();
        let mut seen = vec![false; dim];
        for c in 0..dim {
            if seen[c] || !allowed(c) {
                continue;
            }
            let orbit = orbit_bits(c as u32, n);
            let mut v = vec![0.0; dim];
            for &x in &orbit {
                seen[x as usize] = true;
                v[x as usize] = (orbit.len() as f64).sqrt().recip();
            }
            reps.push(orbit[0]);
            vecs.push(v);
        }
        let mut order: Vec<usize> = (0..reps.len()).collect();
        order.sort_by_key(|&i| (reps[i].count_ones(), reps[i]));
        let hv = |v: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; dim];
            for c in 0..dim {
                if v[c] == 0.0 || !allowed(c) {
                    continue;
                }
                for k in 0..n {
                    let d = c ^ (1 << k);
                    if allowed(d) {
                        out[d] += v[c];
                    }
                }
            }
            out
        };
        let d = reps.len();
        let mut h = Mat::zeros(d, d);
        for (a, &ia) in order.iter().enumerate() {
            let w = hv(&vecs[ia]);
            for (b, &ib) in order.iter().enumerate() {
                h[(b, a)] = vecs[ib].iter().zip(&w).map(|(x, y)| x * y).sum();
            }
        }
        (order.iter().map(|&i| reps[i]).collect(), h)
    }

    #[test]
    fn four_site_blocks() {
        let (basis, h) = perfect_blockade_hamiltonian(&params(4, 2)).unwrap();
        assert_eq!(h.dim(), 3);
        assert!((h.get(1, 0) - 2.0).abs() < 1e-15);
        assert!((h.get(2, 1) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(h.get(2, 0), 0.0);
        for i in 0..3 {
            assert_eq!(h.get(i, i), 0.0);
        }
        assert_eq!(basis.len(), 3);
    }

    #[test]
    fn matches_brute_force_sandwich() {
        for n in 3..=12 {
            for m in (2..=4).filter(|&m| m <= n) {
                let (basis, h) = perfect_blockade_hamiltonian(&params(n, m)).unwrap();
                let (reps, brute) = brute_symmetric_h0(n, m);
                let got: Vec<u32> = basis.states().iter().map(|s| s.rep().bits()).collect();
                assert_eq!(got, reps);
                let dense = h.to_dense();
                for i in 0..h.dim() {
                    for j in 0..h.dim() {
                        assert!((dense[(i, j)] - brute[(i, j)]).abs() < 1e-12, "N={n} m={m} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn blocks_are_transposes() {
        let p = params(12, 2);
        let b0 = SymmetricBasis::build(&p, Sector::NuEquals(0)).unwrap();
        let b1 = SymmetricBasis::build(&p, Sector::NuEquals(1)).unwrap();
        let b2 = SymmetricBasis::build(&p, Sector::NuEquals(2)).unwrap();
        for other in [&b1, &b2] {
            let ab = h0_block(&b0, other).unwrap();
            let ba = h0_block(other, &b0).unwrap();
            assert!(ab.entries.max_abs_diff(&ba.transpose().entries) < 1e-14);
        }
        // a single flip from the vacuum cannot create an adjacent pair
        let o02 = h0_block(&b2, &b0).unwrap();
        for r in 0..b2.len() {
            assert_eq!(o02.entries.get(r, 0), 0.0);
        }
        let mismatched = SymmetricBasis::build(&params(10, 2), Sector::NuEquals(0)).unwrap();
        assert!(h0_block(&b0, &mismatched).is_err());
    }

    #[test]
    fn intra_sector_diagonal_vanishes() {
        let p = params(10, 2);
        for sector in [Sector::All, Sector::NuEquals(1), Sector::Blockaded(3)] {
            let b = SymmetricBasis::build(&p, sector).unwrap();
            let h = h0_in_basis(&b).unwrap();
            for i in 0..h.dim() {
                assert_eq!(h.get(i, i), 0.0);
            }
            assert!(h.csr().is_symmetric());
        }
    }

    #[test]
    fn full_space_diagonal() {
        let p = ModelParams::new(3, 2, Interaction::Finite(20.0)).unwrap();
        let h = full_hamiltonian(&p).unwrap();
        assert_eq!(h.get(0b111, 0b111), 60.0);
        assert_eq!(h.get(0, 0), 0.0);
        assert_eq!(h.get(0b001, 0), 1.0);
        assert_eq!(h.get(0b011, 0), 0.0);
        let p3 = ModelParams::new(8, 3, Interaction::Finite(64.0)).unwrap();
        let h3 = full_hamiltonian(&p3).unwrap();
        // adjacent pair plus a pair at distance two
        assert_eq!(h3.get(0b111, 0b111), 2.0 * 64.0 + 1.0);
        assert!(full_hamiltonian(&params(10, 2)).is_err());
        assert!(full_hamiltonian(&ModelParams::new(15, 2, Interaction::Finite(20.0)).unwrap()).is_err());
    }

    #[test]
    fn full_spectrum_is_relabeling_invariant() {
        let p = ModelParams::new(6, 3, Interaction::Finite(7.0)).unwrap();
        let h = full_hamiltonian(&p).unwrap();
        let base = h.eigenvalues().unwrap();
        // relabel sites by one rotation composed with the reflection
        let n = 6;
        let perm: Vec<usize> = (0..1usize << n)
            .map(|c| crate::ring_config::reflect_bits(crate::ring_config::rotate_bits(c as u32, 1, n), n) as usize)
            .collect();
        let triplets = h.csr().iter().map(|(r, c, v)| (perm[r], perm[c], v)).collect();
        let hp = HermitianMatrix::from_csr(CsrMatrix::from_triplets(64, 64, triplets)).unwrap();
        let ev = hp.eigenvalues().unwrap();
        for (a, b) in base.iter().zip(&ev) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

//! Density of states and grouping of a spectrum into energy manifolds.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hamiltonian::HermitianMatrix;

/// Dense diagonalisation is refused above this dimension.
pub const DOS_MAX_DIM: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Lower edge of the first bin.
    pub origin: f64,
    pub bin_width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn from_values(values: &[f64], bin_width: f64) -> Result<Self> {
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return Err(invalid(format!("bin width must be positive, got {bin_width}")));
        }
        let Some(lo) = values.iter().copied().reduce(f64::min) else {
            return Ok(Self {
                origin: 0.0,
                bin_width,
                counts: Vec::new(),
            });
        };
        let hi = values.iter().copied().fold(lo, f64::max);
        let origin = (lo / bin_width).floor() * bin_width;
        let nbins = ((hi - origin) / bin_width).floor() as usize + 1;
        let mut counts = vec![0usize; nbins];
        for &v in values {
            let b = (((v - origin) / bin_width).floor() as usize).min(nbins - 1);
            counts[b] += 1;
        }
        Ok(Self {
            origin,
            bin_width,
            counts,
        })
    }

    pub fn center(&self, bin: usize) -> f64 {
        self.origin + (bin as f64 + 0.5) * self.bin_width
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Histogram of the eigenvalues of `h`.
pub fn dos_histogram(h: &HermitianMatrix, bin_width: f64) -> Result<Histogram> {
    if h.dim() > DOS_MAX_DIM {
        return Err(crate::Error::TooLarge {
            what: "matrix dimension for a density of states",
            n: h.dim(),
            limit: DOS_MAX_DIM,
        });
    }
    Histogram::from_values(&h.eigenvalues()?, bin_width)
}

/// A cluster of eigenvalues separated from its neighbours by a gap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifold {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub count: usize,
}

impl Manifold {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Splits sorted-or-unsorted eigenvalues wherever consecutive values differ
/// by more than `min_gap`.
pub fn manifolds(eigenvalues: &[f64], min_gap: f64) -> Vec<Manifold> {
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<Manifold> = Vec::new();
    let mut start = 0;
    for i in 0..sorted.len() {
        let last = i + 1 == sorted.len();
        if last || sorted[i + 1] - sorted[i] > min_gap {
            let group = &sorted[start..=i];
            out.push(Manifold {
                lo: group[0],
                hi: group[group.len() - 1],
                center: group.iter().sum::<f64>() / group.len() as f64,
                count: group.len(),
            });
            start = i + 1;
        }
    }
    out
}

/// Index of the manifold whose center lies within `tol` of `energy`.
pub fn manifold_near(manifolds: &[Manifold], energy: f64, tol: f64) -> Option<usize> {
    manifolds
        .iter()
        .enumerate()
        .filter(|(_, m)| (m.center - energy).abs() <= tol)
        .min_by(|a, b| (a.1.center - energy).abs().total_cmp(&(b.1.center - energy).abs()))
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CsrMatrix;

    #[test]
    fn histogram_counts_every_value() {
        let h = Histogram::from_values(&[-1.0, -0.95, 0.0, 0.49, 2.0], 0.5).unwrap();
        assert_eq!(h.origin, -1.0);
        assert_eq!(h.counts, vec![2, 0, 2, 0, 0, 0, 1]);
        assert_eq!(h.total(), 5);
        assert!((h.center(0) + 0.75).abs() < 1e-15);
        assert!(Histogram::from_values(&[1.0], 0.0).is_err());
        assert!(Histogram::from_values(&[], 1.0).unwrap().counts.is_empty());
    }

    #[test]
    fn dos_of_two_level_matrix() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 1.0)]);
        let h = HermitianMatrix::from_csr(m).unwrap();
        let d = dos_histogram(&h, 0.1).unwrap();
        assert_eq!(d.total(), 2);
        assert_eq!(d.counts.first(), Some(&1));
        assert_eq!(d.counts.last(), Some(&1));
    }

    #[test]
    fn manifold_grouping() {
        let m = manifolds(&[10.1, 0.0, 0.3, 9.8, -0.2, 20.0], 2.0);
        assert_eq!(m.len(), 3);
        assert_eq!(m[0].count, 3);
        assert!((m[0].width() - 0.5).abs() < 1e-15);
        assert!((m[1].center - 9.95).abs() < 1e-12);
        assert_eq!(manifold_near(&m, 10.0, 1.0), Some(1));
        assert_eq!(manifold_near(&m, 15.0, 1.0), None);
        assert!(manifolds(&[], 1.0).is_empty());
    }
}

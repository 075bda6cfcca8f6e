//! Maximally symmetric states (binary bracelets) spanning the dynamics.
//!
//! The vacuum is invariant under every rotation and reflection of the ring
//! and the Hamiltonian commutes with all of them, so the evolution never
//! leaves the span of uniform superpositions over dihedral orbits. Each such
//! state is identified by its smallest orbit member.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ring_config::{
    blockaded_bits, canonical_bits, is_canonical_bits, mask, nu_bits, orbit_bits, Configuration,
    ModelParams, MAX_SITES, MIN_SITES,
};

/// Uniform superposition over one dihedral orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymmetricState {
    rep: Configuration,
    orbit_size: usize,
}

impl SymmetricState {
    pub fn new(cfg: Configuration) -> Self {
        let (rep, orbit_size) = cfg.canonical();
        Self { rep, orbit_size }
    }

    pub fn rep(&self) -> Configuration {
        self.rep
    }

    pub fn orbit_size(&self) -> usize {
        self.orbit_size
    }

    pub fn excitation_count(&self) -> u32 {
        self.rep.excitation_count()
    }
}

/// Which symmetric states a basis keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    /// No two excitations closer than `m` sites.
    Blockaded(usize),
    /// Exactly `nu` adjacent excited pairs (nearest-neighbour interactions only).
    NuEquals(u32),
    All,
}

impl Sector {
    fn contains(self, bits: u32, n: usize) -> bool {
        match self {
            Sector::Blockaded(m) => blockaded_bits(bits, n, m),
            Sector::NuEquals(nu) => nu_bits(bits, n) == nu,
            Sector::All => true,
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Blockaded(m) => write!(f, "blockaded(m={m})"),
            Sector::NuEquals(nu) => write!(f, "nu={nu}"),
            Sector::All => f.write_str("all"),
        }
    }
}

fn check_sites(n: usize) -> Result<()> {
    if !(MIN_SITES..=MAX_SITES).contains(&n) {
        return Err(invalid(format!(
            "ring size {n} outside supported range {MIN_SITES}..={MAX_SITES}"
        )));
    }
    Ok(())
}

fn sort_states(states: &mut [SymmetricState]) {
    states.sort_unstable_by_key(|s| (s.excitation_count(), s.rep.bits()));
}

fn states_from_reps(reps: impl IntoIterator<Item = u32>, n: usize) -> Vec<SymmetricState> {
    let mut states: Vec<SymmetricState> = reps
        .into_iter()
        .map(|bits| {
            let (rep, orbit_size) = canonical_bits(bits, n);
            debug_assert_eq!(rep, bits);
            SymmetricState {
                rep: Configuration::from_raw(rep, n),
                orbit_size,
            }
        })
        .collect();
    sort_states(&mut states);
    states
}

/// Every binary bracelet of length `n`, ordered by excitation count and then
/// bitmask.
pub fn generate_bracelets(n: usize) -> Result<Vec<SymmetricState>> {
    check_sites(n)?;
    let reps = (0..=mask(n)).filter(|&b| is_canonical_bits(b, n));
    Ok(states_from_reps(reps, n))
}

/// Number of binary bracelets of length `n` by orbit counting over the
/// dihedral group, without enumeration.
pub fn count_bracelets(n: usize) -> Result<u64> {
    check_sites(n)?;
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let rotations: u64 = (0..n).map(|r| 1u64 << gcd(r, n)).sum();
    let reflections: u64 = if n % 2 == 1 {
        n as u64 * (1 << n.div_ceil(2))
    } else {
        (n as u64 / 2) * ((1 << (n / 2 + 1)) + (1 << (n / 2)))
    };
    Ok((rotations + reflections) / (2 * n as u64))
}

/// All raw configurations of an `n`-site ring whose excitations are at least
/// `m` sites apart, in increasing bitmask order.
pub fn blockaded_configs(n: usize, m: usize) -> Result<Vec<u32>> {
    check_sites(n)?;
    if m < 1 {
        return Err(invalid("blockade range must be at least 1"));
    }
    let mut out = Vec::new();
    // sites are filled from the highest index down so that the output is
    // produced in increasing numeric order
    fn fill(site: isize, bits: u32, next_allowed: isize, first: Option<usize>, n: usize, m: usize, out: &mut Vec<u32>) {
        if site < 0 {
            out.push(bits);
            return;
        }
        fill(site - 1, bits, next_allowed, first, n, m, out);
        if site <= next_allowed {
            let s = site as usize;
            // wrap-around distance to the highest excited site
            let ok = match first {
                None => true,
                Some(hi) => s + n - hi >= m,
            };
            if ok {
                fill(site - 1, bits | (1 << s), site - m as isize, first.or(Some(s)), n, m, out);
            }
        }
    }
    fill(n as isize - 1, 0, n as isize - 1, None, n, m, &mut out);
    out.sort_unstable();
    Ok(out)
}

/// Number of raw configurations satisfying the blockade of range `m`.
pub fn count_blockaded_configs(n: usize, m: usize) -> Result<usize> {
    Ok(blockaded_configs(n, m)?.len())
}

/// Ordered, indexed set of symmetric states belonging to one sector.
#[derive(Clone, Debug)]
pub struct SymmetricBasis {
    n_sites: usize,
    sector: Sector,
    states: Vec<SymmetricState>,
    index: HashMap<u32, usize>,
}

impl SymmetricBasis {
    pub fn build(params: &ModelParams, sector: Sector) -> Result<Self> {
        params.validate()?;
        let n = params.n_sites;
        let states = match sector {
            Sector::Blockaded(m) => {
                if !(1..=n).contains(&m) {
                    return Err(invalid(format!("blockade range {m} invalid for N={n}")));
                }
                let reps = blockaded_configs(n, m)?
                    .into_iter()
                    .filter(|&b| is_canonical_bits(b, n));
                states_from_reps(reps, n)
            }
            Sector::NuEquals(nu) => {
                if params.m != 2 {
                    return Err(invalid(format!(
                        "nu sectors are defined for nearest-neighbour interactions only (m=2), got m={}",
                        params.m
                    )));
                }
                if nu as usize > n {
                    return Err(invalid(format!("nu={nu} exceeds N={n}")));
                }
                let reps = (0..=mask(n)).filter(|&b| nu_bits(b, n) == nu && is_canonical_bits(b, n));
                states_from_reps(reps, n)
            }
            Sector::All => generate_bracelets(n)?,
        };
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.rep.bits(), i))
            .collect();
        Ok(Self {
            n_sites: n,
            sector,
            states,
            index,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[SymmetricState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &SymmetricState {
        &self.states[i]
    }

    /// Position of the symmetric state whose representative is `rep`.
    pub fn index_of_rep(&self, rep: u32) -> Option<usize> {
        self.index.get(&rep).copied()
    }

    /// Position of the symmetric state containing configuration `bits`.
    pub fn index_of_config(&self, bits: u32) -> Option<usize> {
        if !self.sector.contains(bits, self.n_sites) {
            return None;
        }
        self.index_of_rep(canonical_bits(bits, self.n_sites).0)
    }

    pub fn vacuum_index(&self) -> Option<usize> {
        self.index_of_rep(0)
    }

    /// Sum of the orbit sizes; the number of raw configurations spanned.
    pub fn total_orbit_size(&self) -> usize {
        self.states.iter().map(|s| s.orbit_size).sum()
    }

    pub fn max_excitation_count(&self) -> u32 {
        self.states
            .iter()
            .map(|s| s.excitation_count())
            .max()
            .unwrap_or(0)
    }

    /// Map from raw configurations to symmetric states.
    pub fn expansion(&self) -> ConfigExpansion {
        ConfigExpansion::new(self)
    }
}

/// Expansion of symmetric-basis vectors to amplitudes on every raw
/// configuration of the sector (`amp(rep) / sqrt(|O|)` on each orbit member).
#[derive(Clone, Debug)]
pub struct ConfigExpansion {
    n_sites: usize,
    configs: Vec<u32>,
    state_of: Vec<u32>,
    weight: Vec<f64>,
}

impl ConfigExpansion {
    fn new(basis: &SymmetricBasis) -> Self {
        let n = basis.n_sites;
        let mut entries: Vec<(u32, u32, f64)> = Vec::with_capacity(basis.total_orbit_size());
        for (i, s) in basis.states.iter().enumerate() {
            let w = (s.orbit_size as f64).sqrt().recip();
            for c in orbit_bits(s.rep.bits(), n) {
                entries.push((c, i as u32, w));
            }
        }
        entries.sort_unstable_by_key(|e| e.0);
        Self {
            n_sites: n,
            configs: entries.iter().map(|e| e.0).collect(),
            state_of: entries.iter().map(|e| e.1).collect(),
            weight: entries.iter().map(|e| e.2).collect(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    /// Raw configurations in increasing bitmask order.
    pub fn configs(&self) -> &[u32] {
        &self.configs
    }

    pub fn position(&self, bits: u32) -> Option<usize> {
        self.configs.binary_search(&bits).ok()
    }

    /// Amplitudes aligned with [`ConfigExpansion::configs`].
    pub fn expand(&self, amps: &[Complex64]) -> Vec<Complex64> {
        self.state_of
            .iter()
            .zip(&self.weight)
            .map(|(&s, &w)| amps[s as usize] * w)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_config::Interaction;
    use std::collections::BTreeMap;

    fn params(n: usize, m: usize) -> ModelParams {
        ModelParams::new(n, m, Interaction::Infinite).unwrap()
    }

    /// Orbit representatives found by applying every rotation and reflection
    /// explicitly, independent of the library's canonicalisation.
    fn brute_orbits(n: usize) -> BTreeMap<u32, usize> {
        let mut seen = vec![false; 1 << n];
        let mut out = BTreeMap::new();
        for c in 0..(1u32 << n) {
            if seen[c as usize] {
                continue;
            }
            let mut members = Vec::new();
            for l in 0..n {
                let rot: u32 = (0..n)
                    .filter(|&k| c >> k & 1 == 1)
                    .map(|k| 1u32 << ((k + l) % n))
                    .sum();
                let refl: u32 = (0..n)
                    .filter(|&k| rot >> k & 1 == 1)
                    .map(|k| 1u32 << (n - 1 - k))
                    .sum();
                members.push(rot);
                members.push(refl);
            }
            members.sort_unstable();
            members.dedup();
            for &x in &members {
                seen[x as usize] = true;
            }
            out.insert(members[0], members.len());
        }
        out
    }

    fn brute_blockaded(n: usize, m: usize) -> usize {
        (0..(1u32 << n))
            .filter(|&c| {
                let sites: Vec<usize> = (0..n).filter(|&k| c >> k & 1 == 1).collect();
                sites.iter().enumerate().all(|(i, &a)| {
                    sites[i + 1..].iter().all(|&b| {
                        let d = b - a;
                        d.min(n - d) >= m
                    })
                })
            })
            .count()
    }

    #[test]
    fn bracelet_counts() {
        assert_eq!(generate_bracelets(10).unwrap().len(), 78);
        let three: Vec<u32> = generate_bracelets(3)
            .unwrap()
            .iter()
            .map(|s| s.rep().bits())
            .collect();
        assert_eq!(three, vec![0b000, 0b001, 0b011, 0b111]);
        assert_eq!(generate_bracelets(4).unwrap().len(), 6);
    }

    #[test]
    fn bracelets_match_brute_force() {
        for n in 3..=12 {
            let brute = brute_orbits(n);
            let got = generate_bracelets(n).unwrap();
            assert_eq!(got.len(), brute.len(), "N={n}");
            for s in &got {
                assert_eq!(brute[&s.rep().bits()], s.orbit_size());
            }
            let total: usize = got.iter().map(|s| s.orbit_size()).sum();
            assert_eq!(total, 1 << n);
            assert_eq!(count_bracelets(n).unwrap(), got.len() as u64);
        }
        assert_eq!(count_bracelets(10).unwrap(), 78);
        assert!(count_bracelets(29).is_err());
    }

    #[test]
    fn blockaded_basis_examples() {
        let b = SymmetricBasis::build(&params(10, 2), Sector::Blockaded(2)).unwrap();
        assert_eq!(b.len(), 14);
        assert_eq!(b.max_excitation_count(), 5);
        let b4 = SymmetricBasis::build(&params(4, 2), Sector::Blockaded(2)).unwrap();
        let reps: Vec<u32> = b4.states().iter().map(|s| s.rep().bits()).collect();
        assert_eq!(reps, vec![0b0000, 0b0001, 0b0101]);
        let nu0 = SymmetricBasis::build(&params(10, 2), Sector::NuEquals(0)).unwrap();
        assert_eq!(nu0.states(), b.states());
        let odd = SymmetricBasis::build(&params(11, 2), Sector::Blockaded(2)).unwrap();
        assert_eq!(odd.max_excitation_count(), 5);
    }

    #[test]
    fn nu_sector_requires_nearest_neighbour() {
        assert!(SymmetricBasis::build(&params(10, 3), Sector::NuEquals(0)).is_err());
        assert!(SymmetricBasis::build(&params(10, 2), Sector::NuEquals(11)).is_err());
    }

    #[test]
    fn blockaded_counts() {
        assert_eq!(count_blockaded_configs(10, 2).unwrap(), 123);
        assert_eq!(count_blockaded_configs(3, 2).unwrap(), 4);
        assert_eq!(count_blockaded_configs(4, 4).unwrap(), 5);
        // Lucas numbers
        let mut lucas = vec![2usize, 1];
        for i in 2..=20 {
            let next = lucas[i - 1] + lucas[i - 2];
            lucas.push(next);
        }
        for n in 3..=20 {
            assert_eq!(count_blockaded_configs(n, 2).unwrap(), lucas[n], "N={n}");
        }
        for n in 3..=14 {
            for m in 2..=4 {
                assert_eq!(count_blockaded_configs(n, m).unwrap(), brute_blockaded(n, m), "N={n} m={m}");
            }
        }
    }

    #[test]
    fn orbit_sums_match_raw_counts() {
        for n in [5, 8, 13, 16] {
            for m in 2..=4 {
                let b = SymmetricBasis::build(&params(n, m), Sector::Blockaded(m)).unwrap();
                assert_eq!(b.total_orbit_size(), count_blockaded_configs(n, m).unwrap());
            }
            let all = SymmetricBasis::build(&params(n, 2), Sector::All).unwrap();
            assert_eq!(all.total_orbit_size(), 1 << n);
            let nu_total: usize = (0..=n as u32)
                .map(|nu| {
                    SymmetricBasis::build(&params(n, 2), Sector::NuEquals(nu))
                        .unwrap()
                        .total_orbit_size()
                })
                .sum();
            assert_eq!(nu_total, 1 << n);
        }
    }

    #[test]
    fn ordering_and_lookup() {
        let b = SymmetricBasis::build(&params(14, 2), Sector::Blockaded(2)).unwrap();
        for w in b.states().windows(2) {
            let a = (w[0].excitation_count(), w[0].rep().bits());
            let c = (w[1].excitation_count(), w[1].rep().bits());
            assert!(a < c);
        }
        for (i, s) in b.states().iter().enumerate() {
            assert_eq!(b.index_of_rep(s.rep().bits()), Some(i));
            for c in s.rep().orbit() {
                assert_eq!(b.index_of_config(c.bits()), Some(i));
            }
        }
        assert_eq!(b.vacuum_index(), Some(0));
        assert_eq!(b.index_of_config(0b11), None);
        let again = SymmetricBasis::build(&params(14, 2), Sector::Blockaded(2)).unwrap();
        assert_eq!(again.states(), b.states());
    }

    #[test]
    fn expansion_covers_sector() {
        let b = SymmetricBasis::build(&params(9, 2), Sector::Blockaded(2)).unwrap();
        let e = b.expansion();
        assert_eq!(e.configs(), blockaded_configs(9, 2).unwrap().as_slice());
        let amps: Vec<Complex64> = (0..b.len()).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let x = e.expand(&amps);
        let norm_sym: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let norm_raw: f64 = x.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm_sym - norm_raw).abs() < 1e-12 * norm_sym);
    }
}

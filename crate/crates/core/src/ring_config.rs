//! Occupation patterns on an N-site ring and their dihedral symmetry.
//!
//! A configuration is an N-bit mask where bit `k` set means site `k` hosts a
//! Rydberg excitation. Sites are 0-indexed; all index arithmetic is cyclic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Smallest supported ring.
pub const MIN_SITES: usize = 3;
/// Largest supported ring; every full enumeration stays below 2^28 entries.
pub const MAX_SITES: usize = 28;

#[inline]
pub(crate) fn mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Bit `k` of the result is bit `k - l (mod n)` of `bits`.
#[inline]
pub(crate) fn rotate_bits(bits: u32, l: usize, n: usize) -> u32 {
    let l = l % n;
    if l == 0 {
        return bits;
    }
    ((bits << l) | (bits >> (n - l))) & mask(n)
}

#[inline]
pub(crate) fn reflect_bits(bits: u32, n: usize) -> u32 {
    bits.reverse_bits() >> (32 - n)
}

#[inline]
pub(crate) fn nu_bits(bits: u32, n: usize) -> u32 {
    (bits & rotate_bits(bits, 1, n)).count_ones()
}

#[inline]
pub(crate) fn blockaded_bits(bits: u32, n: usize, m: usize) -> bool {
    (1..m.min(n)).all(|d| bits & rotate_bits(bits, d, n) == 0)
}

/// Number of ordered site pairs `(k, k + l)` that are both excited.
#[inline]
pub(crate) fn pairs_at_distance(bits: u32, l: usize, n: usize) -> u32 {
    (bits & rotate_bits(bits, l, n)).count_ones()
}

/// Smallest image over the dihedral orbit together with the orbit size.
pub(crate) fn canonical_bits(bits: u32, n: usize) -> (u32, usize) {
    let mut images = [0u32; 2 * MAX_SITES];
    let reflected = reflect_bits(bits, n);
    for l in 0..n {
        images[2 * l] = rotate_bits(bits, l, n);
        images[2 * l + 1] = rotate_bits(reflected, l, n);
    }
    let images = &mut images[..2 * n];
    images.sort_unstable();
    let mut distinct = 1;
    for w in images.windows(2) {
        if w[0] != w[1] {
            distinct += 1;
        }
    }
    (images[0], distinct)
}

/// True when no dihedral image of `bits` is numerically smaller.
pub(crate) fn is_canonical_bits(bits: u32, n: usize) -> bool {
    let reflected = reflect_bits(bits, n);
    if reflected < bits {
        return false;
    }
    for l in 1..n {
        if rotate_bits(bits, l, n) < bits || rotate_bits(reflected, l, n) < bits {
            return false;
        }
    }
    true
}

/// All distinct images of `bits` under rotations and reflections.
pub(crate) fn orbit_bits(bits: u32, n: usize) -> Vec<u32> {
    let reflected = reflect_bits(bits, n);
    let mut images: Vec<u32> = (0..n)
        .flat_map(|l| [rotate_bits(bits, l, n), rotate_bits(reflected, l, n)])
        .collect();
    images.sort_unstable();
    images.dedup();
    images
}

fn check_sites(n: usize) -> Result<()> {
    if !(MIN_SITES..=MAX_SITES).contains(&n) {
        return Err(invalid(format!(
            "ring size {n} outside supported range {MIN_SITES}..={MAX_SITES}"
        )));
    }
    Ok(())
}

/// Cyclic occupation pattern of a ring with `n_sites` sites.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    bits: u32,
    n_sites: u8,
}

impl Configuration {
    pub fn new(bits: u32, n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        if bits & !mask(n_sites) != 0 {
            return Err(invalid(format!(
                "bitmask {bits:#b} has bits above site {}",
                n_sites - 1
            )));
        }
        Ok(Self {
            bits,
            n_sites: n_sites as u8,
        })
    }

    pub fn vacuum(n_sites: usize) -> Result<Self> {
        Self::new(0, n_sites)
    }

    /// Parses a string such as `"0101"` where the leftmost character is the
    /// highest site index, matching the usual binary notation.
    pub fn from_binary(s: &str) -> Result<Self> {
        let bits = u32::from_str_radix(s, 2).map_err(|e| invalid(format!("{s:?}: {e}")))?;
        Self::new(bits, s.len())
    }

    #[inline]
    pub(crate) fn from_raw(bits: u32, n_sites: usize) -> Self {
        debug_assert!(bits & !mask(n_sites) == 0);
        Self {
            bits,
            n_sites: n_sites as u8,
        }
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn n_sites(self) -> usize {
        self.n_sites as usize
    }

    #[inline]
    pub fn is_excited(self, site: usize) -> bool {
        self.bits >> (site % self.n_sites()) & 1 == 1
    }

    #[inline]
    pub fn excitation_count(self) -> u32 {
        self.bits.count_ones()
    }

    /// Cyclic shift by `l` sites: site `k` moves to site `k + l`.
    pub fn rotate(self, l: usize) -> Self {
        Self::from_raw(rotate_bits(self.bits, l, self.n_sites()), self.n_sites())
    }

    /// Parity: site `k` maps to site `N - 1 - k`.
    pub fn reflect(self) -> Self {
        Self::from_raw(reflect_bits(self.bits, self.n_sites()), self.n_sites())
    }

    /// Number of cyclically adjacent excited pairs.
    pub fn nu(self) -> u32 {
        nu_bits(self.bits, self.n_sites())
    }

    /// No two excitations closer than `m` sites (cyclic distance).
    pub fn blockaded(self, m: usize) -> bool {
        blockaded_bits(self.bits, self.n_sites(), m)
    }

    /// Dihedral-orbit representative (smallest bitmask) and orbit size.
    pub fn canonical(self) -> (Self, usize) {
        let (rep, size) = canonical_bits(self.bits, self.n_sites());
        (Self::from_raw(rep, self.n_sites()), size)
    }

    pub fn orbit(self) -> Vec<Self> {
        orbit_bits(self.bits, self.n_sites())
            .into_iter()
            .map(|b| Self::from_raw(b, self.n_sites()))
            .collect()
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({self})")
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.n_sites())
    }
}

/// Dimensionless nearest-neighbour interaction strength in units of the
/// collective Rabi energy.
///
/// Serialised as a number, or as the string `"infinite"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "InteractionRepr", try_from = "InteractionRepr")]
pub enum Interaction {
    /// Perfect blockade.
    Infinite,
    Finite(f64),
}

impl Interaction {
    pub fn finite(self) -> Option<f64> {
        match self {
            Interaction::Infinite => None,
            Interaction::Finite(d) => Some(d),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum InteractionRepr {
    Number(f64),
    Text(String),
}

impl From<Interaction> for InteractionRepr {
    fn from(i: Interaction) -> Self {
        match i {
            Interaction::Infinite => InteractionRepr::Text("infinite".into()),
            Interaction::Finite(d) => InteractionRepr::Number(d),
        }
    }
}

impl TryFrom<InteractionRepr> for Interaction {
    type Error = crate::Error;

    fn try_from(r: InteractionRepr) -> Result<Self> {
        match r {
            InteractionRepr::Number(d) => Ok(Interaction::Finite(d)),
            InteractionRepr::Text(s) => s.parse(),
        }
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interaction::Infinite => f.write_str("infinite"),
            Interaction::Finite(d) => write!(f, "{d}"),
        }
    }
}

impl std::str::FromStr for Interaction {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("infinite") || s.eq_ignore_ascii_case("inf") {
            return Ok(Interaction::Infinite);
        }
        let d: f64 = s
            .parse()
            .map_err(|_| invalid(format!("interaction strength {s:?} is not a number")))?;
        if d.is_infinite() && d > 0.0 {
            Ok(Interaction::Infinite)
        } else {
            Ok(Interaction::Finite(d))
        }
    }
}

/// Model definition. Energies are in units of the collective Rabi energy,
/// so times are in units of its inverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub n_sites: usize,
    /// Blockade range: excitations closer than `m` sites interact.
    pub m: usize,
    pub delta: Interaction,
}

impl ModelParams {
    pub fn new(n_sites: usize, m: usize, delta: Interaction) -> Result<Self> {
        let p = Self { n_sites, m, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn perfect(n_sites: usize, m: usize) -> Result<Self> {
        Self::new(n_sites, m, Interaction::Infinite)
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.n_sites)?;
        if !(2..=4).contains(&self.m) {
            return Err(invalid(format!("blockade range m={} not in 2..=4", self.m)));
        }
        if let Interaction::Finite(d) = self.delta {
            if !(d.is_finite() && d > 0.0) {
                return Err(invalid(format!("interaction strength {d} must be positive")));
            }
        }
        Ok(())
    }

    /// Interaction strength at distance `l`, following the van der Waals
    /// `1/l^6` law. `None` in the perfect-blockade limit.
    pub fn delta_at(&self, l: usize) -> Option<f64> {
        self.delta.finite().map(|d| d / (l as f64).powi(6))
    }
}

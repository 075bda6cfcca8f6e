//! Exact dynamics of laser-driven Rydberg excitations on a ring lattice.
//!
//! The crate works in the fully symmetric (dihedral-invariant) sector that
//! contains the vacuum. In the perfect-blockade limit the dynamics is
//! propagated inside the blockaded bracelet basis; at finite interaction
//! strength an effective Hamiltonian obtained by adiabatic elimination of the
//! first two interaction manifolds is used instead. A brute-force full-space
//! reference implementation validates both at small ring sizes.

// `!(x > 0.0)` is meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod effective;
pub mod error;
pub mod hamiltonian;
pub mod observables;
pub mod oracle;
pub mod propagator;
pub mod ring_config;
pub mod simulation;
pub mod sparse;
pub mod symmetric_basis;

pub use error::{Error, Result};
pub use hamiltonian::{HermitianMatrix, SectorBlock};
pub use num_complex::Complex64;
pub use observables::{Series, TwoSiteDM};
pub use propagator::{Propagator, PropagatorKind, TimeGrid, Wavefunction};
pub use ring_config::{Configuration, Interaction, ModelParams};
pub use symmetric_basis::{Sector, SymmetricBasis, SymmetricState};

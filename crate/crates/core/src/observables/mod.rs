//! Observables of the ring state: two-site reduced state, densities,
//! correlation and entanglement measures, time-series statistics and
//! spectral summaries.

mod density;
mod entanglement;
mod graph;
mod series;
mod spectrum;

pub use density::{
    g2, rydberg_density, two_site_dm, ExpandedState, Matrix2, Matrix4, SiteOperators, TwoSiteDM, G2_MIN_DENSITY,
};
pub use entanglement::{
    concurrence, correlation_of_matrix, entanglement_of_formation, kron2, trace_first, trace_second,
    two_party_correlation, two_party_correlation_classical, wootters_concurrence,
};
pub(crate) use entanglement::hermitian_eigenvalues4;
pub use graph::{export_coupling_graph, CouplingGraph, GraphNode};
pub use series::{ExponentialFit, Peak, Series};
pub use spectrum::{dos_histogram, manifold_near, manifolds, Histogram, Manifold, DOS_MAX_DIM};

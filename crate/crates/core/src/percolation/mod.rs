//! Bernoulli bond percolation on the Delaunay graph and its coarse-grained
//! site process on boxes of side `R`.

mod bonds;
mod events;
mod inclusion;
mod sep;
mod study;
mod zd;

pub use bonds::{
    bond_uniforms, bond_uniforms_labeled, bonds_at, clusters, clusters_in, default_core, diameter, sample_bonds,
    BondConfiguration, ClusterDecomposition, DisjointSets,
};
pub use events::{check_events_a123, estimate_phi, ipa1_check, phi_study, phi_window, EventsA123, PhiRow, PhiStudy};
pub use inclusion::{inclusion_check, InclusionReport};
pub use sep::{sep_check, sep_thin, SepRow, SepSample};
pub use study::{locality_check, zd_study, LocalityReport, ZdRow};
pub use zd::{
    box_open, eta_field, field_from_sites, lattice_core, lattice_geometry_window, lattice_sites, BoxOpen,
    CrossingGraph, LatticeField, OpenVia, PercolationGeometry, SiteGeometry,
};

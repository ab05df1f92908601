//! Delaunay/Voronoi geometry over sampled stationary point processes, Palm
//! moment estimators and Bernoulli bond percolation on the Delaunay graph.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! the command line or threads lives in the companion `palmdt-cli` crate;
//! estimators here take an [`exec::Executor`] so callers decide how
//! replicates are scheduled.
//!
//! Layout:
//! - [`geom`]: points, boxes, balls, the exact 2-D Delaunay complex, the
//!   fundamental region and the deterministic lattice-box lemmas.
//! - [`process`]: seeded samplers (Poisson, Matérn cluster/hard-core, Gibbs)
//!   and the two Palm routes (origin adjoining for Poisson, Campbell
//!   spatial averages for anything stationary).
//! - [`conductance`]: random edge weights and the rooted weighted-degree
//!   statistics.
//! - [`moments`]: Monte Carlo estimators and verifiers for box-count
//!   moments, void probabilities, level events and the degree chain.
//! - [`percolation`]: bond marks, clusters, the coarse-grained lattice
//!   process and the thinning (SEP) checker.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod conductance;
pub mod error;
pub mod exec;
pub mod geom;
pub mod moments;
pub mod percolation;
pub mod process;
pub mod rng;
pub mod selftest;
pub mod stats;

pub use error::{Error, Result};

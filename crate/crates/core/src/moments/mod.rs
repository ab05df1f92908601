//! Monte Carlo estimators for box-count moments, void probabilities and
//! Palm moments of the rooted Delaunay neighbourhood, plus the exact
//! per-sample checks of the level-event chain.

mod inequalities;
mod levels;
mod mgf;
mod palm_count;
mod palm_moment;
mod rho;
mod void;

pub use inequalities::{check_moment_inequalities, InequalityRow, MomentInequality};
pub use levels::{chain_study, level_events, level_events_at, verify_degree_chain, ChainOutcome, ChainReport, ChainStudy, LevelEvents};
pub use mgf::{check_mgf_bound, MgfReport};
pub use palm_count::estimate_palm_box_count;
pub use palm_moment::{estimate_palm_moment, PalmMomentSettings, PalmQuantity, Route};
pub use rho::{box_moment_samples, estimate_rho_gamma};
pub use void::{estimate_void_probability, AlphaFit, VoidPoint};

use crate::geom::{AxisBox, PointConfiguration};
use crate::process::{sample, ProcessSpec};
use crate::rng::RngStream;
use crate::Result;

/// Extra sampling margin so that boxes near the window centre see the
/// stationary law: Gibbs chains feel the empty boundary condition.
pub(crate) fn edge_margin(spec: &ProcessSpec) -> f64 {
    match spec {
        ProcessSpec::Gibbs(g) => (2.0 * g.potential.range()).max(1.0),
        _ => 0.0,
    }
}

pub(crate) fn sample_rep(spec: &ProcessSpec, window: &AxisBox, seed: u64, rep: usize, purpose: &str) -> Result<PointConfiguration> {
    sample(spec, window, &RngStream::new(seed, rep as u64, purpose))
}

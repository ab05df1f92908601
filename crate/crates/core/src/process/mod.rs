//! Seeded samplers for stationary point processes and the two Palm routes.

mod gibbs;
mod matern;
mod palm;
mod poisson;
mod potential;

use alloc::format;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use gibbs::{sample_gibbs_chain, GibbsSpec};
pub use matern::{hardcore_retention_mc, sample_matern_cluster, sample_matern_hardcore};
pub use palm::{
    campbell_palm_average, campbell_sum_in, palm_root_slivnyak, BoxCount, CampbellSum, DelaunayDegree, PalmContext,
    PalmFunctional, Provenance,
    RootedConfiguration, RootedView,
};
pub use poisson::sample_poisson;
pub use potential::PairPotential;

use crate::geom::{AxisBox, PointConfiguration};
use crate::rng::RngStream;
use crate::{Error, Result};

/// Which stationary process to sample, with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum ProcessSpec {
    Poisson { intensity: f64 },
    MaternCluster { parent_intensity: f64, mean_offspring: f64, radius: f64 },
    MaternHardcore { proposal_intensity: f64, radius: f64 },
    Gibbs(GibbsSpec),
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {x}")))
    }
}

impl ProcessSpec {
    pub fn poisson(intensity: f64) -> Self {
        ProcessSpec::Poisson { intensity }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ProcessSpec::Poisson { .. } => "poisson",
            ProcessSpec::MaternCluster { .. } => "matern_cluster",
            ProcessSpec::MaternHardcore { .. } => "matern_hardcore",
            ProcessSpec::Gibbs(_) => "gibbs",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::Poisson { intensity } => positive("intensity", *intensity),
            ProcessSpec::MaternCluster { parent_intensity, mean_offspring, radius } => {
                positive("parent intensity", *parent_intensity)?;
                positive("mean offspring", *mean_offspring)?;
                positive("cluster radius", *radius)
            }
            ProcessSpec::MaternHardcore { proposal_intensity, radius } => {
                positive("proposal intensity", *proposal_intensity)?;
                positive("hard-core radius", *radius)
            }
            ProcessSpec::Gibbs(g) => g.validate(),
        }
    }

    /// Mean number of points per unit volume, when known in closed form.
    pub fn intensity(&self, dim: usize) -> Option<f64> {
        match self {
            ProcessSpec::Poisson { intensity } => Some(*intensity),
            ProcessSpec::MaternCluster { parent_intensity, mean_offspring, .. } => {
                Some(parent_intensity * mean_offspring)
            }
            ProcessSpec::MaternHardcore { proposal_intensity, radius } => {
                let a = proposal_intensity * unit_ball_volume(dim) * radius.powi(dim as i32);
                Some(proposal_intensity * (1.0 - (-a).exp()) / a)
            }
            ProcessSpec::Gibbs(_) => None,
        }
    }
}

/// Draws one configuration of `spec` in `window`.
pub fn sample(spec: &ProcessSpec, window: &AxisBox, rng: &RngStream) -> Result<PointConfiguration> {
    spec.validate()?;
    let mut r = rng.rng();
    match spec {
        ProcessSpec::Poisson { intensity } => Ok(sample_poisson(*intensity, window, &mut r)),
        ProcessSpec::MaternCluster { parent_intensity, mean_offspring, radius } => {
            Ok(sample_matern_cluster(*parent_intensity, *mean_offspring, *radius, window, &mut r))
        }
        ProcessSpec::MaternHardcore { proposal_intensity, radius } => {
            Ok(sample_matern_hardcore(*proposal_intensity, *radius, window, &mut r))
        }
        ProcessSpec::Gibbs(g) => {
            let mut chain = sample_gibbs_chain(g, window, &mut r, 1)?;
            Ok(chain.pop().expect("one sample requested"))
        }
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * core::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Uniform point of the box, written into `out`.
pub(crate) fn uniform_in_box(window: &AxisBox, r: &mut ChaCha8Rng, out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = window.lo(k) + window.side() * r.random::<f64>();
    }
}

/// Uniform point of the ball of radius `rad` around `c`, by rejection from the cube.
pub(crate) fn uniform_in_ball(c: &[f64], rad: f64, r: &mut ChaCha8Rng, out: &mut [f64]) {
    loop {
        let mut n2 = 0.0;
        for (k, o) in out.iter_mut().enumerate() {
            let u = 2.0 * r.random::<f64>() - 1.0;
            n2 += u * u;
            *o = c[k] + rad * u;
        }
        if n2 <= 1.0 {
            return;
        }
    }
}

pub(crate) fn poisson_count(mean: f64, r: &mut ChaCha8Rng) -> usize {
    use rand_distr::{Distribution, Poisson};
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(r) as usize
}

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::rho::box_moment_samples;
use crate::exec::Executor;
use crate::geom::AxisBox;
use crate::process::ProcessSpec;
use crate::stats::Moments;
use crate::{Error, Result};

/// `E[e^{α ξ(Λ)}]` against `exp(vol(Λ)(e^t − 1))`, `t = ln z + βC + α`.
#[derive(Clone, Debug, PartialEq)]
pub struct MgfReport {
    pub alpha: f64,
    pub half_side: f64,
    pub volume: f64,
    pub activity: f64,
    pub beta: f64,
    pub stability: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    /// `exp(vol(Λ) e^t)`: what the Poisson comparison gives before the
    /// partition-function factor is dropped; never smaller than `bound`.
    pub bound_unreduced: f64,
    /// `estimate − bound ≤ 3` standard errors.
    pub holds: bool,
    pub replicates: usize,
    pub seed: u64,
}

/// Activity, inverse temperature and local-stability constant of a process
/// the bound applies to: Poisson (as `β = 0`) or a locally stable Gibbs.
fn stability_data(spec: &ProcessSpec) -> Result<(f64, f64, f64)> {
    match spec {
        ProcessSpec::Poisson { intensity } => Ok((*intensity, 0.0, 0.0)),
        ProcessSpec::Gibbs(g) => match g.potential.local_stability_constant() {
            Some(c) => Ok((g.activity, g.beta, c)),
            None => Err(Error::UnsupportedProcess("locally stable gibbs")),
        },
        _ => Err(Error::UnsupportedProcess("poisson or gibbs")),
    }
}

/// Monte Carlo check of the exponential-moment bound on the centred box
/// `Λ` of half-side `half_side`.
pub fn check_mgf_bound<E: Executor>(
    spec: &ProcessSpec,
    dim: usize,
    half_side: f64,
    alpha: f64,
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<MgfReport> {
    let (z, beta, c) = stability_data(spec)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    let lambda = AxisBox::centered(dim, half_side)?;
    let counts = box_moment_samples(spec, core::slice::from_ref(&lambda), replicates, seed, "mgf", exec)?;
    let vals: Vec<f64> = counts.iter().map(|n| (alpha * n[0] as f64).exp()).collect();
    let m: Moments = vals.iter().copied().collect();
    let vol = lambda.volume();
    let et = (z.ln() + beta * c + alpha).exp();
    let bound = (vol * (et - 1.0)).exp();
    Ok(MgfReport {
        alpha,
        half_side,
        volume: vol,
        activity: z,
        beta,
        stability: c,
        estimate: m.mean(),
        std_error: m.std_error(),
        bound,
        bound_unreduced: (vol * et).exp(),
        holds: m.mean() - bound <= 3.0 * m.std_error(),
        replicates,
        seed,
    })
}

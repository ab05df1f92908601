use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::{edge_margin, sample_rep};
use crate::exec::Executor;
use crate::geom::AxisBox;
use crate::process::ProcessSpec;
use crate::stats::{EstimateReport, Moments};
use crate::{Error, Result};

/// Counts `ξ(B)` for each box in `boxes`, one sample per replicate. The
/// sampling window is the smallest centred cube holding every box, plus the
/// process' edge margin.
pub fn box_moment_samples<E: Executor>(
    spec: &ProcessSpec,
    boxes: &[AxisBox],
    replicates: usize,
    seed: u64,
    purpose: &str,
    exec: &E,
) -> Result<Vec<Vec<usize>>> {
    spec.validate()?;
    let d = boxes.first().map_or(2, AxisBox::dim);
    let reach = boxes
        .iter()
        .flat_map(|b| (0..d).map(move |i| b.lo(i).abs().max(b.hi(i).abs())))
        .fold(0.0, f64::max);
    let window = AxisBox::centered(d, reach + edge_margin(spec))?;
    let rows = exec.map(replicates, |k| -> Result<Vec<usize>> {
        let cfg = sample_rep(spec, &window, seed, k, purpose)?;
        Ok(boxes.iter().map(|b| cfg.count_in(b)).collect())
    });
    rows.into_iter().collect()
}

/// `ρ_γ = E[ξ([0,1]^d)^γ]` from one unit cube per replicate, centred in the
/// sampling window.
pub fn estimate_rho_gamma<E: Executor>(
    spec: &ProcessSpec,
    dim: usize,
    gamma: f64,
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<EstimateReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("gamma must be positive, got {gamma}")));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    let cube = AxisBox::centered(dim, 0.5)?;
    let counts = box_moment_samples(spec, &[cube], replicates, seed, "rho", exec)?;
    let vals: Vec<f64> = counts.iter().map(|c| (c[0] as f64).powf(gamma)).collect();
    let m: Moments = vals.iter().copied().collect();
    let mut r = EstimateReport::new("rho_gamma", m.mean(), m.std_error(), replicates, seed).with_param("gamma", gamma);
    r.trace = crate::stats::running_mean_trace(&vals);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn poisson_moments() {
        let spec = ProcessSpec::poisson(1.0);
        for (g, target) in [(1.0, 1.0), (2.0, 2.0), (3.0, 5.0)] {
            let r = estimate_rho_gamma(&spec, 2, g, 20_000, 5, &Sequential).unwrap();
            assert!(r.within(target, 4.0), "gamma {g}: {} ± {}", r.estimate, r.std_error);
        }
    }
}

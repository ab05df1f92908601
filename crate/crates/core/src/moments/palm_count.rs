use alloc::format;
use alloc::vec::Vec;

use super::{edge_margin, sample_rep};
use crate::exec::Executor;
use crate::geom::AxisBox;
use crate::moments::Route;
use crate::process::{campbell_palm_average, palm_root_slivnyak, BoxCount, ProcessSpec};
use crate::rng::RngStream;
use crate::stats::{ratio_estimate, running_mean_trace, EstimateReport, Moments};
use crate::{Error, Result};

/// Roots for the Campbell route are the points of this centred core.
const CORE_HALF: f64 = 1.0;

/// `𝔼₀[ξ(Λ_h)]`, the Palm mean count of the box of half-side `h` around the
/// typical point, by origin adjoining (Poisson only) or by Campbell
/// averaging over the points of a core box.
pub fn estimate_palm_box_count<E: Executor>(
    spec: &ProcessSpec,
    dim: usize,
    half_side: f64,
    route: Route,
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<EstimateReport> {
    spec.validate()?;
    if !(half_side > 0.0 && half_side.is_finite()) {
        return Err(Error::InvalidParameter(format!("box half-side must be positive, got {half_side}")));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    let f = BoxCount { half_side };
    let name = format!("palm_box_count_{}", route.tag());
    let mut rep = match route {
        Route::Slivnyak => {
            let window = AxisBox::centered(dim, half_side)?;
            let vals = exec.map(replicates, |k| -> Result<f64> {
                palm_root_slivnyak(spec, &window, &RngStream::new(seed, k as u64, "palm-count"))?.evaluate(&f)
            });
            let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
            let m: Moments = vals.iter().copied().collect();
            let mut r = EstimateReport::new(&name, m.mean(), m.std_error(), replicates, seed);
            r.trace = running_mean_trace(&vals);
            r.intensity = spec.intensity(dim);
            r
        }
        Route::Campbell => {
            let core = AxisBox::centered(dim, CORE_HALF)?;
            let window = AxisBox::centered(dim, CORE_HALF + half_side + edge_margin(spec))?;
            let sums = exec.map(replicates, |k| -> Result<(f64, f64)> {
                let cfg = sample_rep(spec, &window, seed, k, "palm-count")?;
                let s = campbell_palm_average(&f, &cfg, &core)?;
                Ok((s.sum, s.count as f64))
            });
            let sums: Vec<(f64, f64)> = sums.into_iter().collect::<Result<_>>()?;
            let (s, c): (Vec<f64>, Vec<f64>) = sums.into_iter().unzip();
            let (est, se) = ratio_estimate(&s, &c);
            let total: f64 = c.iter().sum();
            let mut r = EstimateReport::new(&name, est, se, replicates, seed);
            r.intensity = Some(total / (replicates as f64 * core.volume()));
            r
        }
    };
    rep.params.push(("half_side".into(), half_side));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::stats::agree;

    #[test]
    fn routes_agree_on_poisson() {
        // Slivnyak: 1 + m (2h)^d
        let s = ProcessSpec::poisson(1.0);
        let a = estimate_palm_box_count(&s, 2, 1.0, Route::Slivnyak, 4000, 3, &Sequential).unwrap();
        let b = estimate_palm_box_count(&s, 2, 1.0, Route::Campbell, 4000, 3, &Sequential).unwrap();
        assert!(a.within(5.0, 3.0) && b.within(5.0, 3.0), "{a:?} {b:?}");
        assert!(agree(a.estimate, a.std_error, b.estimate, b.std_error, 3.0));
    }

    #[test]
    fn slivnyak_needs_poisson() {
        let hc = ProcessSpec::MaternHardcore { proposal_intensity: 1.0, radius: 0.1 };
        assert!(matches!(
            estimate_palm_box_count(&hc, 2, 1.0, Route::Slivnyak, 1, 0, &Sequential),
            Err(Error::UnsupportedProcess(_))
        ));
        assert!(estimate_palm_box_count(&hc, 2, 1.0, Route::Campbell, 5, 0, &Sequential).is_ok());
    }
}

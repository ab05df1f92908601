use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::sample_rep;
use crate::conductance::{assign_conductances, rooted_local_stats, ConductanceField, ConductanceLaw, RootedLocalStats};
use crate::exec::Executor;
use crate::geom::{AxisBox, DelaunayComplex};
use crate::process::{campbell_sum_in, palm_root_slivnyak, PalmContext, PalmFunctional, ProcessSpec, RootedView};
use crate::rng::RngStream;
use crate::stats::{ratio_estimate, running_mean_trace, EstimateReport, Moments};
use crate::{Error, Result};

/// A Palm moment of the rooted Delaunay neighbourhood.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PalmQuantity {
    /// `Σ_{x∼0} |x|^ζ`
    ZetaSum(f64),
    Lambda0,
    Lambda2,
    /// `deg(0)^p`
    DegP(f64),
    /// `μ(0)^p`
    MuP(f64),
    /// `ν(0)^p`
    NuP(f64),
}

impl PalmQuantity {
    /// From a tag and its exponent (`ζ` or `p`; ignored for `lambda0`/`lambda2`).
    pub fn parse(tag: &str, exponent: f64) -> Result<Self> {
        let q = match tag {
            "zeta_sum" => PalmQuantity::ZetaSum(exponent),
            "lambda0" => PalmQuantity::Lambda0,
            "lambda2" => PalmQuantity::Lambda2,
            "deg_p" => PalmQuantity::DegP(exponent),
            "mu_p" => PalmQuantity::MuP(exponent),
            "nu_p" => PalmQuantity::NuP(exponent),
            _ => return Err(Error::InvalidParameter(format!("unknown Palm quantity {tag:?}"))),
        };
        match q {
            PalmQuantity::ZetaSum(z) if !(z >= 0.0 && z.is_finite()) => {
                Err(Error::InvalidParameter(format!("zeta must be >= 0, got {z}")))
            }
            PalmQuantity::DegP(p) | PalmQuantity::MuP(p) | PalmQuantity::NuP(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::InvalidParameter(format!("moment order p must be >= 1, got {p}")))
            }
            q => Ok(q),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            PalmQuantity::ZetaSum(_) => "zeta_sum",
            PalmQuantity::Lambda0 => "lambda0",
            PalmQuantity::Lambda2 => "lambda2",
            PalmQuantity::DegP(_) => "deg_p",
            PalmQuantity::MuP(_) => "mu_p",
            PalmQuantity::NuP(_) => "nu_p",
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match *self {
            PalmQuantity::ZetaSum(x) | PalmQuantity::DegP(x) | PalmQuantity::MuP(x) | PalmQuantity::NuP(x) => Some(x),
            _ => None,
        }
    }

    fn zeta(&self) -> f64 {
        match *self {
            PalmQuantity::ZetaSum(z) => z,
            _ => 2.0,
        }
    }

    pub fn value(&self, s: &RootedLocalStats) -> f64 {
        match *self {
            PalmQuantity::ZetaSum(_) => s.zeta_sum,
            PalmQuantity::Lambda0 => s.lambda0,
            PalmQuantity::Lambda2 => s.lambda2,
            PalmQuantity::DegP(p) => (s.degree as f64).powf(p),
            PalmQuantity::MuP(p) => s.mu0.powf(p),
            PalmQuantity::NuP(p) => s.nu0.powf(p),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Poisson only: adjoin the origin to an independent sample.
    Slivnyak,
    /// Any stationary process: average over the points of a core box.
    Campbell,
}

impl Route {
    pub fn tag(self) -> &'static str {
        match self {
            Route::Slivnyak => "slivnyak",
            Route::Campbell => "campbell",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PalmMomentSettings {
    /// Half-side of the sampling window, centred at the origin.
    pub window_half: f64,
    /// Half-side of the Campbell core box; the gap to the window is the margin.
    pub core_half: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for PalmMomentSettings {
    fn default() -> Self {
        PalmMomentSettings { window_half: 7.0, core_half: 3.0, replicates: 1000, seed: 0 }
    }
}

struct LocalValue<'f, 'c> {
    field: &'f ConductanceField<'c>,
    q: PalmQuantity,
}

impl PalmFunctional for LocalValue<'_, '_> {
    fn reach(&self) -> f64 {
        0.0
    }
    fn needs_complex(&self) -> bool {
        true
    }
    fn eval(&self, view: &RootedView<'_>) -> Result<f64> {
        Ok(self.q.value(&rooted_local_stats(self.field, view.root(), self.q.zeta())?))
    }
}

enum RepOutcome {
    Value(f64),
    Discarded,
    Campbell { sum: f64, count: usize, skipped: usize },
}

/// Monte Carlo estimate of `𝔼₀[q]` with conductances drawn from `law`.
pub fn estimate_palm_moment<E: Executor>(
    q: PalmQuantity,
    spec: &ProcessSpec,
    law: &ConductanceLaw,
    route: Route,
    settings: &PalmMomentSettings,
    exec: &E,
) -> Result<EstimateReport> {
    spec.validate()?;
    law.validate()?;
    if matches!(q, PalmQuantity::NuP(_)) && law.admits_zero() {
        return Err(Error::InvalidCombination(format!(
            "nu_p needs strictly positive conductances; the {} law admits zero",
            law.tag()
        )));
    }
    if route == Route::Slivnyak && !matches!(spec, ProcessSpec::Poisson { .. }) {
        return Err(Error::UnsupportedProcess("poisson"));
    }
    if settings.replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    let (seed, n) = (settings.seed, settings.replicates);
    let window = AxisBox::centered(2, settings.window_half)?;
    let core = AxisBox::centered(2, settings.core_half)?;
    let outcomes = exec.map(n, |k| -> Result<RepOutcome> {
        let stream = RngStream::new(seed, k as u64, "palm");
        match route {
            Route::Slivnyak => {
                let rooted = palm_root_slivnyak(spec, &window, &stream)?;
                let cx = DelaunayComplex::new(rooted.config().clone())?;
                if !cx.is_interior_valid(rooted.root()) {
                    return Ok(RepOutcome::Discarded);
                }
                let field = assign_conductances(&cx, law, &stream.with_purpose("conductance"))?;
                let s = rooted_local_stats(&field, rooted.root(), q.zeta())?;
                Ok(RepOutcome::Value(q.value(&s)))
            }
            Route::Campbell => {
                let cfg = sample_rep(spec, &window, seed, k, "palm")?;
                let ctx = PalmContext::new(&cfg, true)?;
                let cx = ctx.complex().expect("built with complex");
                let field = assign_conductances(cx, law, &stream.with_purpose("conductance"))?;
                let s = campbell_sum_in(&ctx, &LocalValue { field: &field, q }, &core)?;
                Ok(RepOutcome::Campbell { sum: s.sum, count: s.count, skipped: s.skipped })
            }
        }
    });
    let outcomes: Vec<RepOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    let name = format!("{}_{}", q.tag(), route.tag());
    let mut rep = match route {
        Route::Slivnyak => {
            let vals: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| match o {
                    RepOutcome::Value(v) => Some(*v),
                    _ => None,
                })
                .collect();
            let m: Moments = vals.iter().copied().collect();
            let mut r = EstimateReport::new(&name, m.mean(), m.std_error(), n, seed);
            r.discard_fraction = (n - vals.len()) as f64 / n as f64;
            r.trace = running_mean_trace(&vals);
            r.intensity = spec.intensity(2);
            r
        }
        Route::Campbell => {
            let (mut sums, mut counts, mut skipped) = (Vec::new(), Vec::new(), 0usize);
            for o in &outcomes {
                if let RepOutcome::Campbell { sum, count, skipped: s } = o {
                    sums.push(*sum);
                    counts.push(*count as f64);
                    skipped += s;
                }
            }
            let (est, se) = ratio_estimate(&sums, &counts);
            let total: f64 = counts.iter().sum();
            let mut r = EstimateReport::new(&name, est, se, n, seed);
            r.discard_fraction = skipped as f64 / (total + skipped as f64).max(1.0);
            r.intensity = Some(total / (n as f64 * core.volume()));
            let (mut cs, mut cc) = (0.0, 0.0);
            let running: Vec<f64> = sums
                .iter()
                .zip(&counts)
                .map(|(s, c)| {
                    cs += s;
                    cc += c;
                    if cc > 0.0 {
                        cs / cc
                    } else {
                        f64::NAN
                    }
                })
                .collect();
            r.trace = running_mean_trace(&running)
                .into_iter()
                .map(|(k, _)| (k, running[k - 1]))
                .collect();
            r
        }
    };
    if let Some(x) = q.exponent() {
        rep = rep.with_param(if matches!(q, PalmQuantity::ZetaSum(_)) { "zeta" } else { "p" }, x);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    fn settings(n: usize) -> PalmMomentSettings {
        PalmMomentSettings { window_half: 4.0, core_half: 2.0, replicates: n, seed: 9 }
    }

    #[test]
    fn unit_lambda0_and_zeta0_equal_degree() {
        let spec = ProcessSpec::poisson(1.0);
        let s = settings(200);
        let deg = estimate_palm_moment(PalmQuantity::DegP(1.0), &spec, &ConductanceLaw::Unit, Route::Slivnyak, &s, &Sequential).unwrap();
        let l0 = estimate_palm_moment(PalmQuantity::Lambda0, &spec, &ConductanceLaw::Unit, Route::Slivnyak, &s, &Sequential).unwrap();
        let z0 = estimate_palm_moment(PalmQuantity::ZetaSum(0.0), &spec, &ConductanceLaw::Unit, Route::Slivnyak, &s, &Sequential).unwrap();
        assert_eq!(deg.trace, l0.trace);
        assert_eq!(deg.trace, z0.trace);
        assert_eq!(deg.estimate, l0.estimate);
    }

    #[test]
    fn degree_routes_agree() {
        let spec = ProcessSpec::poisson(1.0);
        let a = estimate_palm_moment(PalmQuantity::DegP(1.0), &spec, &ConductanceLaw::Unit, Route::Slivnyak, &settings(3000), &Sequential).unwrap();
        let b = estimate_palm_moment(PalmQuantity::DegP(1.0), &spec, &ConductanceLaw::Unit, Route::Campbell, &settings(300), &Sequential).unwrap();
        assert!(a.within(6.0, 4.0), "{a:?}");
        assert!(b.within(6.0, 4.0), "{b:?}");
        assert!(crate::stats::agree(a.estimate, a.std_error, b.estimate, b.std_error, 4.0));
    }

    #[test]
    fn rejected_combinations() {
        let spec = ProcessSpec::poisson(1.0);
        let zero = ConductanceLaw::Uniform { lo: 0.0, hi: 1.0 };
        let e = estimate_palm_moment(PalmQuantity::NuP(1.0), &spec, &zero, Route::Campbell, &settings(1), &Sequential);
        assert!(matches!(e, Err(Error::InvalidCombination(_))));
        let hc = ProcessSpec::MaternHardcore { proposal_intensity: 1.0, radius: 0.2 };
        let e = estimate_palm_moment(PalmQuantity::Lambda0, &hc, &ConductanceLaw::Unit, Route::Slivnyak, &settings(1), &Sequential);
        assert!(matches!(e, Err(Error::UnsupportedProcess(_))));
    }
}

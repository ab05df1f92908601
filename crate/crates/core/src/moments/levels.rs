use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use crate::geom::lemmas::index_set;
use super::sample_rep;
use crate::exec::Executor;
use crate::geom::{AxisBox, DelaunayComplex, Vec2};
use crate::process::{palm_root_slivnyak, PalmContext, ProcessSpec, RootedConfiguration, RootedView};
use crate::rng::RngStream;
use crate::{Error, Result};

/// `A_n = {ξ(K^n(z)) > 0 for all z ∈ I}` with `K^n(z) = Λ_{β^n/2}(β^n z)`
/// and `I = {z ∈ ℤ^d : |z|_∞ = d}`, for the levels the window can decide.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelEvents {
    pub beta: f64,
    /// `A_0, A_1, …` up to the last level whose boxes fit in the window.
    pub levels: Vec<bool>,
    /// First `n` with `A_n`, i.e. the `n` with `T_n`.
    pub t_index: Option<usize>,
    /// Some requested level was skipped because its boxes leave the window.
    pub truncated: bool,
}

impl LevelEvents {
    pub fn a(&self, n: usize) -> Option<bool> {
        self.levels.get(n).copied()
    }

    /// `T_n = A_n \ A_{n−1}` (with `T_0 = A_0`).
    pub fn t(&self, n: usize) -> Option<bool> {
        let a = self.a(n)?;
        Some(if n == 0 { a } else { a && !self.levels[n - 1] })
    }
}

/// Level events around the root of a rooted configuration.
pub fn level_events(rooted: &RootedConfiguration, beta: f64, n_max: usize) -> Result<LevelEvents> {
    let ctx = PalmContext::new(rooted.config(), false)?;
    level_events_at(&ctx.view(rooted.root()), beta, n_max)
}

/// Level events around the root of `view`.
pub fn level_events_at(view: &RootedView<'_>, beta: f64, n_max: usize) -> Result<LevelEvents> {
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("level ratio beta must exceed 1, got {beta}")));
    }
    let cfg = view.config();
    let d = cfg.dim();
    let index = index_set(d);
    let root = view.anchor().to_vec();
    let mut out = LevelEvents { beta, levels: Vec::new(), t_index: None, truncated: false };
    let mut offset = alloc::vec![0.0; d];
    for n in 0..=n_max {
        let scale = beta.powi(n as i32);
        // every K^n(z) sits inside Λ_{β^n (d + 1/2)} around the root
        let hull = AxisBox::new(root.clone(), scale * (d as f64 + 0.5))?;
        if !cfg.window().contains_box(&hull) {
            out.truncated = true;
            break;
        }
        let a = index.iter().all(|z| {
            for (o, zi) in offset.iter_mut().zip(z) {
                *o = scale * *zi as f64;
            }
            view.occupied_at(&offset, scale / 2.0)
        });
        if a && out.t_index.is_none() {
            out.t_index = Some(n);
        }
        out.levels.push(a);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainOutcome {
    Pass,
    Fail,
    /// No decided level has `A_n`, so the chain asserts nothing.
    Vacuous,
}

impl ChainOutcome {
    pub fn tag(self) -> &'static str {
        match self {
            ChainOutcome::Pass => "pass",
            ChainOutcome::Fail => "fail",
            ChainOutcome::Vacuous => "vacuous",
        }
    }
}

/// The degree chain at the first level `n` with `A_n`:
/// neighbours ⊂ `D(0|ξ)` ⊂ `Γ^n = B_{6β^n d²}(0)`, hence
/// `deg(0) ≤ ξ(Γ^n)` and `max |x| ≤ 6β^n d²`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainReport {
    pub level: Option<usize>,
    pub degree: usize,
    /// Points of the window in `Γ^n`; a lower bound for `ξ(Γ^n)`.
    pub gamma_count: usize,
    pub max_neighbor_distance: f64,
    pub gamma_radius: f64,
    /// Every neighbour lies in the fundamental region.
    pub neighbors_in_region: bool,
    /// The fundamental region lies in `Γ^n`.
    pub region_in_gamma: bool,
    pub outcome: ChainOutcome,
    pub events: LevelEvents,
}

/// Checks the chain at `root` of `complex`. Counting `ξ(Γ^n)` inside the
/// window only makes the degree bound harder to pass.
pub fn verify_degree_chain(complex: &DelaunayComplex, root: u32, beta: f64, n_max: usize) -> Result<ChainReport> {
    if root as usize >= complex.len() {
        return Err(Error::InvalidInput(format!("no point with index {root}")));
    }
    if !complex.is_interior_valid(root) {
        return Err(Error::BoundaryContamination(root as usize));
    }
    let cfg = complex.config();
    let d = cfg.dim() as f64;
    let ctx = PalmContext::new(cfg, false)?;
    let events = level_events_at(&ctx.view(root), beta, n_max)?;
    let o = complex.point(root);
    let degree = complex.degree(root);
    let max_neighbor_distance = complex.neighbors(root).map(|x| complex.point(x).dist(o)).fold(0.0, f64::max);
    let region = complex.fundamental_region(root)?;
    let neighbors_in_region = complex.neighbors(root).all(|x| {
        let p = complex.point(x);
        region.balls.iter().any(|b| {
            let c = b.center.to_vec2().expect("planar");
            c.dist(p) <= b.radius * (1.0 + 1e-9) + 1e-12
        })
    });
    let mut rep = ChainReport {
        level: events.t_index,
        degree,
        gamma_count: 0,
        max_neighbor_distance,
        gamma_radius: f64::NAN,
        neighbors_in_region,
        region_in_gamma: false,
        outcome: ChainOutcome::Vacuous,
        events,
    };
    if let Some(n) = rep.level {
        let r = 6.0 * beta.powi(n as i32) * d * d;
        rep.gamma_radius = r;
        rep.gamma_count = complex.points().iter().filter(|p| p.dist(o) <= r).count();
        rep.region_in_gamma = region.radius() <= r;
        let ok = degree <= rep.gamma_count && max_neighbor_distance <= r && neighbors_in_region && rep.region_in_gamma;
        rep.outcome = if ok { ChainOutcome::Pass } else { ChainOutcome::Fail };
    }
    Ok(rep)
}

/// Outcomes of the degree chain over independent rooted samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainStudy {
    pub beta: f64,
    pub n_max: usize,
    pub window_half: f64,
    pub replicates: usize,
    pub seed: u64,
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
    /// Roots that were not interior-valid (or samples without any valid point).
    pub contaminated: usize,
    /// Replicates where some neighbour fell outside the fundamental region.
    pub region_failures: usize,
    /// `a_hits[n]`: replicates with `A_n` among those deciding level `n`.
    pub a_hits: Vec<usize>,
    pub a_decided: Vec<usize>,
    /// Replicates with `A_n` at some decided level.
    pub any_a: usize,
}

/// Runs [`verify_degree_chain`] on `replicates` rooted samples in a centred
/// window of half-side `window_half`. Poisson roots come from adjoining the
/// origin; other processes are rooted at the interior-valid point nearest
/// the window centre (the chain holds at every point of every configuration).
pub fn chain_study<E: Executor>(
    spec: &ProcessSpec,
    beta: f64,
    n_max: usize,
    window_half: f64,
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<ChainStudy> {
    spec.validate()?;
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must exceed 1, got {beta}")));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    let window = AxisBox::centered(2, window_half)?;
    let reps = exec.map(replicates, |k| -> Result<Option<ChainReport>> {
        let stream = RngStream::new(seed, k as u64, "chain");
        let (cx, root) = if matches!(spec, ProcessSpec::Poisson { .. }) {
            let rooted = palm_root_slivnyak(spec, &window, &stream)?;
            (DelaunayComplex::new(rooted.config().clone())?, rooted.root())
        } else {
            let cx = DelaunayComplex::new(sample_rep(spec, &window, seed, k, "chain")?)?;
            let c = Vec2::new(0.0, 0.0);
            let root = (0..cx.len() as u32)
                .filter(|&v| cx.is_interior_valid(v))
                .min_by(|&a, &b| cx.point(a).dist(c).total_cmp(&cx.point(b).dist(c)));
            match root {
                Some(r) => (cx, r),
                None => return Ok(None),
            }
        };
        match verify_degree_chain(&cx, root, beta, n_max) {
            Ok(r) => Ok(Some(r)),
            Err(Error::BoundaryContamination(_)) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let reps: Vec<Option<ChainReport>> = reps.into_iter().collect::<Result<_>>()?;
    let mut st = ChainStudy {
        beta,
        n_max,
        window_half,
        replicates,
        seed,
        pass: 0,
        fail: 0,
        vacuous: 0,
        contaminated: 0,
        region_failures: 0,
        a_hits: vec![0; n_max + 1],
        a_decided: vec![0; n_max + 1],
        any_a: 0,
    };
    for r in &reps {
        let Some(r) = r else {
            st.contaminated += 1;
            continue;
        };
        match r.outcome {
            ChainOutcome::Pass => st.pass += 1,
            ChainOutcome::Fail => st.fail += 1,
            ChainOutcome::Vacuous => st.vacuous += 1,
        }
        st.region_failures += !r.neighbors_in_region as usize;
        for (n, &a) in r.events.levels.iter().enumerate().take(n_max + 1) {
            st.a_decided[n] += 1;
            st.a_hits[n] += a as usize;
        }
        st.any_a += r.events.levels.iter().any(|&a| a) as usize;
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{PointConfiguration, Vec2};
    use crate::process::Provenance;

    fn lattice(h: i32) -> PointConfiguration {
        let mut pts = alloc::vec::Vec::new();
        for i in -h..=h {
            for j in -h..=h {
                pts.push(Vec2::new(i as f64, j as f64));
            }
        }
        PointConfiguration::from_planar(AxisBox::centered(2, h as f64 + 0.5).unwrap(), &pts).unwrap()
    }

    #[test]
    fn lattice_level_zero() {
        let cfg = lattice(8);
        let r = RootedConfiguration::adjoin_origin(&cfg, Provenance::Slivnyak).unwrap();
        let ev = level_events(&r, 2.0, 3).unwrap();
        assert_eq!(ev.t_index, Some(0));
        assert_eq!(ev.levels, alloc::vec![true, true]);
        assert!(ev.truncated);
        assert_eq!(ev.t(1), Some(false));
        let cx = DelaunayComplex::new(cfg).unwrap();
        let rep = verify_degree_chain(&cx, cx.origin_index().unwrap(), 2.0, 3).unwrap();
        assert_eq!(rep.outcome, ChainOutcome::Pass);
        assert_eq!((rep.level, rep.degree, rep.max_neighbor_distance, rep.gamma_radius), (Some(0), 4, 1.0, 24.0));
        assert_eq!(rep.gamma_count, 17 * 17);
    }

    #[test]
    fn poisson_chain_always_passes() {
        let st = chain_study(&ProcessSpec::poisson(1.0), 2.0, 3, 22.0, 40, 3, &crate::exec::Sequential).unwrap();
        assert_eq!(st.pass + st.vacuous + st.contaminated, 40, "{st:?}");
        assert_eq!((st.fail, st.region_failures), (0, 0));
        assert!(st.pass >= 38);
    }

    #[test]
    fn lone_point_is_vacuous() {
        let w = AxisBox::centered(2, 50.0).unwrap();
        let r = RootedConfiguration::adjoin_origin(&PointConfiguration::empty(w), Provenance::Slivnyak).unwrap();
        let ev = level_events(&r, 2.0, 4).unwrap();
        assert_eq!(ev.t_index, None);
        assert!(ev.levels.iter().all(|a| !a));
        assert!(matches!(level_events(&r, 1.0, 2), Err(Error::InvalidParameter(_))));
    }
}

//! Palm sampling: the Poisson origin-adjoining route and Campbell spatial
//! averages `Σ_{x ∈ ξ ∩ core} F(ξ − x)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{sample_poisson, ProcessSpec};
use crate::geom::{AxisBox, DelaunayComplex, PointConfiguration};
use crate::rng::RngStream;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Slivnyak,
    CampbellShift,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Slivnyak => "slivnyak",
            Provenance::CampbellShift => "campbell_shift",
        }
    }
}

/// A configuration with a distinguished point at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedConfiguration {
    config: PointConfiguration,
    root: u32,
    provenance: Provenance,
}

impl RootedConfiguration {
    /// Adjoins the origin to `config` (no-op if present).
    pub fn adjoin_origin(config: &PointConfiguration, provenance: Provenance) -> Result<Self> {
        let origin = vec![0.0; config.dim()];
        let (config, root) = config.with_point(&origin)?;
        Ok(RootedConfiguration { config, root: root as u32, provenance })
    }

    /// `ξ − x` for the `i`-th point `x` of `config`.
    pub fn shift_to(config: &PointConfiguration, i: usize) -> Self {
        let x = config.point(i).to_vec();
        RootedConfiguration { config: config.shifted(&x), root: i as u32, provenance: Provenance::CampbellShift }
    }

    pub fn config(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Evaluates `f` at the root. The root must be far enough from the
    /// window boundary for `f` to be determined by the sample.
    pub fn evaluate<F: PalmFunctional + ?Sized>(&self, f: &F) -> Result<f64> {
        let ctx = PalmContext::new(&self.config, f.needs_complex())?;
        if !ctx.determined(f, self.root) {
            return Err(Error::BoundaryContamination(self.root as usize));
        }
        f.eval(&ctx.view(self.root))
    }
}

/// A real functional of a rooted configuration, evaluated through a
/// [`RootedView`] so that Campbell sums need not copy the sample per point.
pub trait PalmFunctional {
    /// ℓ∞ radius around the root that the value depends on, beyond what
    /// the Delaunay neighbourhood already needs.
    fn reach(&self) -> f64;

    fn needs_complex(&self) -> bool {
        false
    }

    fn eval(&self, view: &RootedView<'_>) -> Result<f64>;
}

impl<F: PalmFunctional + ?Sized> PalmFunctional for &F {
    fn reach(&self) -> f64 {
        (**self).reach()
    }
    fn needs_complex(&self) -> bool {
        (**self).needs_complex()
    }
    fn eval(&self, view: &RootedView<'_>) -> Result<f64> {
        (**self).eval(view)
    }
}

/// Per-sample lookup structures shared by every root of a Campbell sum.
pub struct PalmContext<'a> {
    config: &'a PointConfiguration,
    complex: Option<DelaunayComplex>,
    by_x: Vec<u32>,
}

impl<'a> PalmContext<'a> {
    pub fn new(config: &'a PointConfiguration, with_complex: bool) -> Result<Self> {
        let complex = if with_complex { Some(DelaunayComplex::new(config.clone())?) } else { None };
        Ok(Self::assemble(config, complex))
    }

    pub fn with_complex(config: &'a PointConfiguration, complex: DelaunayComplex) -> Self {
        Self::assemble(config, Some(complex))
    }

    fn assemble(config: &'a PointConfiguration, complex: Option<DelaunayComplex>) -> Self {
        let mut by_x: Vec<u32> = (0..config.len() as u32).collect();
        by_x.sort_unstable_by(|&a, &b| config.point(a as usize)[0].total_cmp(&config.point(b as usize)[0]));
        PalmContext { config, complex, by_x }
    }

    pub fn complex(&self) -> Option<&DelaunayComplex> {
        self.complex.as_ref()
    }

    pub fn view(&self, root: u32) -> RootedView<'_> {
        RootedView { ctx: self, root }
    }

    /// Whether `f` at point `i` is a function of the sample alone.
    pub fn determined<F: PalmFunctional + ?Sized>(&self, f: &F, i: u32) -> bool {
        let x = self.config.point(i as usize);
        let reach = f.reach();
        if reach > 0.0 {
            let b = match AxisBox::new(x.to_vec(), reach) {
                Ok(b) => b,
                Err(_) => return false,
            };
            if !self.config.window().contains_box(&b) {
                return false;
            }
        }
        if f.needs_complex() {
            match &self.complex {
                Some(c) => c.is_interior_valid(i),
                None => false,
            }
        } else {
            true
        }
    }
}

/// The sample seen from one of its points.
pub struct RootedView<'a> {
    ctx: &'a PalmContext<'a>,
    root: u32,
}

impl RootedView<'_> {
    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn config(&self) -> &PointConfiguration {
        self.ctx.config
    }

    pub fn complex(&self) -> Option<&DelaunayComplex> {
        self.ctx.complex.as_ref()
    }

    /// Coordinates of the root in the sample's frame.
    pub fn anchor(&self) -> &[f64] {
        self.ctx.config.point(self.root as usize)
    }

    /// Coordinates of point `i` relative to the root.
    pub fn relative(&self, i: u32) -> Vec<f64> {
        let a = self.anchor();
        self.ctx.config.point(i as usize).iter().zip(a).map(|(p, o)| p - o).collect()
    }

    /// Calls `f` with every point (root included) in the closed box of
    /// half-side `half` around the root.
    pub fn for_each_in_box(&self, half: f64, f: impl FnMut(u32)) {
        let zero = vec![0.0; self.ctx.config.dim()];
        self.for_each_in_box_at(&zero, half, f)
    }

    /// As [`RootedView::for_each_in_box`] for the box centred at `offset`
    /// relative to the root.
    pub fn for_each_in_box_at(&self, offset: &[f64], half: f64, mut f: impl FnMut(u32)) {
        let cfg = self.ctx.config;
        let a: Vec<f64> = self.anchor().iter().zip(offset).map(|(x, o)| x + o).collect();
        let by_x = &self.ctx.by_x;
        let lo = by_x.partition_point(|&i| cfg.point(i as usize)[0] < a[0] - half);
        for &i in &by_x[lo..] {
            let p = cfg.point(i as usize);
            if p[0] > a[0] + half {
                break;
            }
            if p.iter().zip(&a).all(|(x, o)| (x - o).abs() <= half) {
                f(i);
            }
        }
    }

    /// Whether the box of half-side `half` at `offset` from the root has a point.
    pub fn occupied_at(&self, offset: &[f64], half: f64) -> bool {
        let mut hit = false;
        self.for_each_in_box_at(offset, half, |_| hit = true);
        hit
    }

    /// `ξ(Λ_half)` around the root.
    pub fn count_in_box(&self, half: f64) -> usize {
        let mut n = 0;
        self.for_each_in_box(half, |_| n += 1);
        n
    }
}

/// `F(ξ) = ξ([−L, L]^d)`, root included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxCount {
    pub half_side: f64,
}

impl PalmFunctional for BoxCount {
    fn reach(&self) -> f64 {
        self.half_side
    }
    fn eval(&self, view: &RootedView<'_>) -> Result<f64> {
        Ok(view.count_in_box(self.half_side) as f64)
    }
}

/// Delaunay degree of the root.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DelaunayDegree;

impl PalmFunctional for DelaunayDegree {
    fn reach(&self) -> f64 {
        0.0
    }
    fn needs_complex(&self) -> bool {
        true
    }
    fn eval(&self, view: &RootedView<'_>) -> Result<f64> {
        let c = view.complex().ok_or_else(|| Error::InvalidInput("degree needs the Delaunay complex".into()))?;
        Ok(c.degree(view.root()) as f64)
    }
}

/// One sample's contribution to a Campbell estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CampbellSum {
    pub sum: f64,
    /// Points that contributed to `sum`.
    pub count: usize,
    /// Points of the core whose value is not determined inside the window.
    pub skipped: usize,
}

impl CampbellSum {
    pub fn merge(&mut self, o: &CampbellSum) {
        self.sum += o.sum;
        self.count += o.count;
        self.skipped += o.skipped;
    }
}

/// `Σ F(ξ − x)` over the points `x` of `core` whose value is determined by
/// the window. Dividing pooled sums by pooled counts (the sample intensity
/// times the core volume) estimates the Palm mean `𝔼₀[F]`.
pub fn campbell_palm_average<F: PalmFunctional + ?Sized>(
    f: &F,
    config: &PointConfiguration,
    core: &AxisBox,
) -> Result<CampbellSum> {
    if config.points().all(|p| !core.contains(p)) {
        return Ok(CampbellSum::default());
    }
    let ctx = PalmContext::new(config, f.needs_complex())?;
    campbell_sum_in(&ctx, f, core)
}

/// As [`campbell_palm_average`] with prebuilt lookup structures.
pub fn campbell_sum_in<F: PalmFunctional + ?Sized>(
    ctx: &PalmContext<'_>,
    f: &F,
    core: &AxisBox,
) -> Result<CampbellSum> {
    let mut out = CampbellSum::default();
    for i in 0..ctx.config.len() as u32 {
        if !core.contains(ctx.config.point(i as usize)) {
            continue;
        }
        if ctx.determined(f, i) {
            out.sum += f.eval(&ctx.view(i))?;
            out.count += 1;
        } else {
            out.skipped += 1;
        }
    }
    Ok(out)
}

/// A Poisson sample of `window` with the origin adjoined: a draw from the
/// Palm distribution of the Poisson process.
pub fn palm_root_slivnyak(spec: &ProcessSpec, window: &AxisBox, rng: &RngStream) -> Result<RootedConfiguration> {
    let intensity = match spec {
        ProcessSpec::Poisson { intensity } => *intensity,
        _ => return Err(Error::UnsupportedProcess("poisson")),
    };
    spec.validate()?;
    let origin = vec![0.0; window.dim()];
    if !window.contains(&origin) {
        return Err(Error::InvalidInput(format!("window {window:?} does not contain the origin")));
    }
    let sample = sample_poisson(intensity, window, &mut rng.rng());
    RootedConfiguration::adjoin_origin(&sample, Provenance::Slivnyak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::stats::Moments;

    struct One;
    impl PalmFunctional for One {
        fn reach(&self) -> f64 {
            0.0
        }
        fn eval(&self, _: &RootedView<'_>) -> Result<f64> {
            Ok(1.0)
        }
    }

    #[test]
    fn slivnyak_contains_origin_and_rejects_others() {
        let w = AxisBox::centered(2, 3.0).unwrap();
        let r = palm_root_slivnyak(&ProcessSpec::poisson(1.0), &w, &RngStream::new(1, 0, "s")).unwrap();
        assert_eq!(r.config().point(r.root() as usize), &[0.0, 0.0]);
        let hc = ProcessSpec::MaternHardcore { proposal_intensity: 1.0, radius: 0.1 };
        assert!(matches!(palm_root_slivnyak(&hc, &w, &RngStream::new(1, 0, "s")), Err(Error::UnsupportedProcess(_))));
    }

    #[test]
    fn constant_functional_normalizes_to_one() {
        let w = AxisBox::centered(2, 4.0).unwrap();
        let core = AxisBox::centered(2, 2.0).unwrap();
        let cfg = sample_poisson(1.0, &w, &mut RngStream::new(3, 0, "c").rng());
        let s = campbell_palm_average(&One, &cfg, &core).unwrap();
        assert_eq!(s.sum, s.count as f64);
        assert_eq!(s.skipped, 0);
        let empty = PointConfiguration::empty(w);
        assert_eq!(campbell_palm_average(&One, &empty, &core).unwrap(), CampbellSum::default());
    }

    #[test]
    fn box_count_matches_brute_force() {
        let w = AxisBox::centered(2, 4.0).unwrap();
        let cfg = sample_poisson(3.0, &w, &mut RngStream::new(7, 0, "b").rng());
        let ctx = PalmContext::new(&cfg, false).unwrap();
        for i in 0..cfg.len() as u32 {
            let x = cfg.point(i as usize);
            let brute = cfg.points().filter(|p| (p[0] - x[0]).abs() <= 0.7 && (p[1] - x[1]).abs() <= 0.7).count();
            assert_eq!(ctx.view(i).count_in_box(0.7), brute);
        }
    }

    #[test]
    fn routes_agree_on_box_count() {
        let w = AxisBox::centered(2, 4.0).unwrap();
        let core = AxisBox::centered(2, 3.0).unwrap();
        let f = BoxCount { half_side: 1.0 };
        let mut sliv = Moments::default();
        let (mut sum, mut cnt) = (Vec::new(), Vec::new());
        for k in 0..3000 {
            let s = RngStream::new(11, k, "route");
            let r = palm_root_slivnyak(&ProcessSpec::poisson(1.0), &w, &s).unwrap();
            sliv.push(r.evaluate(&f).unwrap());
            let cfg = sample_poisson(1.0, &w, &mut s.with_purpose("campbell").rng());
            let c = campbell_palm_average(&f, &cfg, &core).unwrap();
            sum.push(c.sum);
            cnt.push(c.count as f64);
        }
        let (est, se) = crate::stats::ratio_estimate(&sum, &cnt);
        assert!((sliv.mean() - 5.0).abs() < 4.0 * sliv.std_error());
        assert!((est - 5.0).abs() < 4.0 * se, "{est} ± {se}");
    }

    #[test]
    fn campbell_shift_roots_at_origin() {
        let w = AxisBox::centered(2, 2.0).unwrap();
        let cfg = PointConfiguration::new(w, &[Point::xy(1.0, 1.0).unwrap(), Point::xy(-0.5, 0.0).unwrap()]).unwrap();
        let r = RootedConfiguration::shift_to(&cfg, 1);
        assert_eq!(r.config().point(1), &[0.0, 0.0]);
        assert_eq!(r.config().point(0), &[1.5, 1.0]);
        assert_eq!(r.provenance(), Provenance::CampbellShift);
    }
}

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::bonds::{bond_uniforms, bonds_at, check_probability, clusters};
use super::zd::PercolationGeometry;
use crate::exec::Executor;
use crate::geom::{AxisBox, DelaunayComplex, GridIndex, Rect, Vec2};
use crate::moments::{edge_margin, sample_rep};
use crate::process::ProcessSpec;
use crate::rng::RngStream;
use crate::stats::{proportion, EstimateReport};
use crate::{Error, Result};

/// The three good events around `C₀ = [0, R]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct EventsA123 {
    /// Every ball of radius `R/8` centred in the closed `3R/4`-thickening
    /// of `C₀` holds a point.
    pub a1: bool,
    /// Every cell meeting the open `R/4`-thickening has degree `≤ R³`.
    pub a2: bool,
    /// At most `R³` cells meet `∂C₀`.
    pub a3: bool,
    /// `A₁` was settled by the subbox covering alone.
    pub a1_by_cover: bool,
    /// Largest empty-ball radius centred in the `3R/4`-thickening; NaN when
    /// the covering settled `A₁`.
    pub void_radius: f64,
    /// The exact `A₁` decision is within `R/512` of its threshold.
    pub a1_ambiguous: bool,
    pub max_degree: usize,
    pub boundary_cells: usize,
}

impl EventsA123 {
    pub fn all(&self) -> bool {
        self.a1 && self.a2 && self.a3
    }
}

fn rect_rect_dist(a: &Rect, b: &Rect) -> f64 {
    let dx = (a.lo.x - b.hi.x).max(b.lo.x - a.hi.x).max(0.0);
    let dy = (a.lo.y - b.hi.y).max(b.lo.y - a.hi.y).max(0.0);
    (dx * dx + dy * dy).sqrt()
}

/// Sufficient test for `A₁`: subboxes of diameter just under `R/8` that
/// meet the closed `3R/4`-thickening are all occupied.
fn a1_cover(index: &GridIndex, c0: &Rect, r: f64) -> bool {
    let s = r / (8.0 * 2f64.sqrt()) * (1.0 - 1e-9);
    let t = 0.75 * r;
    let lo = c0.lo - Vec2::new(t, t);
    let n = ((c0.hi.x - c0.lo.x + 2.0 * t) / s).ceil() as usize;
    for i in 0..n {
        for j in 0..n {
            let q = lo + Vec2::new(i as f64 * s, j as f64 * s);
            let sub = Rect::new(q, q + Vec2::new(s, s));
            if rect_rect_dist(&sub, c0) > t {
                continue;
            }
            let mut hit = false;
            index.for_each_in_rect(&sub, |_, _| hit = true);
            if !hit {
                return false;
            }
        }
    }
    true
}

fn c0_rect(geom: &PercolationGeometry<'_>, r: f64) -> Result<Rect> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("box side must be positive, got {r}")));
    }
    let c0 = AxisBox::coarse_box(&[0, 0], r)?;
    if !geom.complex().config().window().contains_box(&c0.expanded(0.875 * r)?) {
        return Err(Error::LocalityViolation(format!("window does not cover the 7R/8-neighbourhood of C0 at R = {r}")));
    }
    Ok(c0.rect())
}

pub fn check_events_a123(geom: &PercolationGeometry<'_>, r: f64) -> Result<EventsA123> {
    let c0 = c0_rect(geom, r)?;
    let cx = geom.complex();
    let bound = r * r * r;
    let index = cx.point_index();
    let a1_by_cover = a1_cover(&index, &c0, r);
    let (a1, void_radius, a1_ambiguous) = if a1_by_cover {
        (true, f64::NAN, false)
    } else {
        let v = geom.max_void_radius(&c0, 0.75 * r);
        (v < r / 8.0, v, (v - r / 8.0).abs() <= r / 512.0)
    };
    let max_degree = geom.cells_near(&c0, r / 4.0, true).into_iter().map(|v| cx.degree(v)).max().unwrap_or(0);
    let boundary_cells = geom
        .cells_near(&c0, 0.0, false)
        .into_iter()
        .filter(|&v| geom.cell(v).iter().any(|&q| !c0.contains_strictly(q)))
        .count();
    Ok(EventsA123 {
        a1,
        a2: max_degree as f64 <= bound,
        a3: boundary_cells as f64 <= bound,
        a1_by_cover,
        void_radius,
        a1_ambiguous,
        max_degree,
        boundary_cells,
    })
}

/// When `A₁` holds: cells with nucleus within `5R/8` of `C₀` have radius
/// `≤ R/8`, and cells meeting the `R/2`-thickening have their nucleus
/// within `5R/8`. `None` when `A₁` fails and there is nothing to check.
pub fn ipa1_check(geom: &PercolationGeometry<'_>, r: f64) -> Result<Option<bool>> {
    let c0 = c0_rect(geom, r)?;
    if geom.max_void_radius(&c0, 0.75 * r) >= r / 8.0 {
        return Ok(None);
    }
    let cx = geom.complex();
    let reach = 0.625 * r;
    let radii_ok = (0..cx.len() as u32).filter(|&v| c0.dist(cx.point(v)) < reach).all(|v| {
        let z = cx.point(v);
        cx.is_bounded(v) && geom.cell(v).iter().all(|q| q.dist(z) <= r / 8.0 * (1.0 + 1e-12))
    });
    let nuclei_ok = geom.cells_near(&c0, r / 2.0, true).into_iter().all(|v| c0.dist(cx.point(v)) < reach);
    Ok(Some(radii_ok && nuclei_ok))
}

/// Nearest-rank quantile of an unsorted sample.
pub(crate) fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v[((q * (v.len() - 1) as f64).round() as usize).min(v.len() - 1)]
}

/// `φ(p, R)` at one `p`, with the bound `P(A₁ᶜ ∪ A₂ᶜ ∪ A₃ᶜ) + 2pR³`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiRow {
    pub p: f64,
    pub r: f64,
    pub replicates: usize,
    pub seed: u64,
    pub phi: f64,
    pub phi_se: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// Frequency of `A₁ᶜ ∪ A₂ᶜ ∪ A₃ᶜ`.
    pub bad: f64,
    pub bad_se: f64,
    /// `pR³`; the bound is only claimed when this is at most 1/2.
    pub p_r3: f64,
    pub bound: f64,
    pub applicable: bool,
    /// `φ̂ − bound ≤ 3` combined standard errors (true when not applicable).
    pub holds: bool,
    pub spanning: f64,
    pub largest_q50: f64,
    pub largest_q90: f64,
}

/// Per-replicate detail behind a set of [`PhiRow`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiStudy {
    pub rows: Vec<PhiRow>,
    /// `open[k][j]`: origin box open in replicate `k` at `ps[j]`.
    pub open: Vec<Vec<bool>>,
    pub spanning: Vec<Vec<bool>>,
    pub largest: Vec<Vec<usize>>,
    /// Replicates whose origin-box or `A₁` decision was within `R/512`.
    pub ambiguous: usize,
    /// Replicates where `A₁` held but the cell-size consequences did not.
    pub ipa1_failures: usize,
}

struct PhiRep {
    open: Vec<bool>,
    spanning: Vec<bool>,
    largest: Vec<usize>,
    events: EventsA123,
    ambiguous: bool,
    ipa1_ok: bool,
}

/// The sampling window for the origin box: `C₀` with margin `R` (plus the
/// Gibbs margin).
pub fn phi_window(spec: &ProcessSpec, r: f64) -> Result<AxisBox> {
    AxisBox::new(alloc::vec![r / 2.0; 2], 1.5 * r + edge_margin(spec))
}

/// `φ(p, R)` and the good events over a grid of `p`, all `p` sharing the
/// same samples and bond uniforms.
pub fn phi_study<E: Executor>(
    spec: &ProcessSpec,
    ps: &[f64],
    r: f64,
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<PhiStudy> {
    spec.validate()?;
    if ps.is_empty() {
        return Err(Error::InvalidParameter("need at least one bond probability".into()));
    }
    for &p in ps {
        check_probability(p)?;
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    let window = phi_window(spec, r)?;
    let reps = exec.map(replicates, |k| -> Result<PhiRep> {
        let cfg = sample_rep(spec, &window, seed, k, "percolation")?;
        let cx = DelaunayComplex::new(cfg)?;
        let geom = PercolationGeometry::new(&cx);
        let site = geom.site([0, 0], r)?;
        let events = check_events_a123(&geom, r)?;
        let ipa1_ok = !events.a1 || ipa1_check(&geom, r)?.unwrap_or(true);
        let u = bond_uniforms(&cx, &RngStream::new(seed, k as u64, "bonds"));
        let (mut open, mut spanning, mut largest) = (Vec::new(), Vec::new(), Vec::new());
        for &p in ps {
            let w = bonds_at(&u, p)?;
            open.push(site.open(&w).open);
            let c = clusters(&cx, &w);
            spanning.push(c.spanning);
            largest.push(c.largest_size());
        }
        Ok(PhiRep { open, spanning, largest, ambiguous: site.ambiguous || events.a1_ambiguous, ipa1_ok, events })
    });
    let reps: Vec<PhiRep> = reps.into_iter().collect::<Result<_>>()?;
    let n = replicates;
    let freq = |f: &dyn Fn(&PhiRep) -> bool| reps.iter().filter(|x| f(x)).count();
    let (bad, bad_se) = proportion(freq(&|x| !x.events.all()), n);
    let rows = ps
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let (phi, phi_se) = proportion(freq(&|x| x.open[j]), n);
            let p_r3 = p * r * r * r;
            let bound = bad + 2.0 * p_r3;
            let applicable = p_r3 <= 0.5;
            let largest: Vec<f64> = reps.iter().map(|x| x.largest[j] as f64).collect();
            PhiRow {
                p,
                r,
                replicates: n,
                seed,
                phi,
                phi_se,
                a1: proportion(freq(&|x| x.events.a1), n).0,
                a2: proportion(freq(&|x| x.events.a2), n).0,
                a3: proportion(freq(&|x| x.events.a3), n).0,
                bad,
                bad_se,
                p_r3,
                bound,
                applicable,
                holds: !applicable || phi - bound <= 3.0 * (phi_se * phi_se + bad_se * bad_se).sqrt(),
                spanning: proportion(freq(&|x| x.spanning[j]), n).0,
                largest_q50: quantile(&largest, 0.5),
                largest_q90: quantile(&largest, 0.9),
            }
        })
        .collect();
    Ok(PhiStudy {
        rows,
        ambiguous: freq(&|x| x.ambiguous),
        ipa1_failures: freq(&|x| !x.ipa1_ok),
        open: reps.iter().map(|x| x.open.clone()).collect(),
        spanning: reps.iter().map(|x| x.spanning.clone()).collect(),
        largest: reps.into_iter().map(|x| x.largest).collect(),
    })
}

/// `φ̂(p, R)`; the bound and its pieces ride along as parameters.
pub fn estimate_phi<E: Executor>(
    spec: &ProcessSpec,
    p: f64,
    r: f64,
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<EstimateReport> {
    let study = phi_study(spec, &[p], r, replicates, seed, exec)?;
    let row = &study.rows[0];
    Ok(EstimateReport::new("phi", row.phi, row.phi_se, replicates, seed)
        .with_param("p", p)
        .with_param("R", r)
        .with_param("p_r3", row.p_r3)
        .with_param("bad", row.bad)
        .with_param("bad_se", row.bad_se)
        .with_param("bound", row.bound)
        .with_param("holds", if row.holds { 1.0 } else { 0.0 }))
}

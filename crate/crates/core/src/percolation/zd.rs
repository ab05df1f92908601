use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::bonds::{diameter, BondConfiguration, DisjointSets};
use crate::geom::{seg_rect_dist, AxisBox, DelaunayComplex, GridIndex, Rect, Vec2};
use crate::{Error, Result};

/// Read-only geometry shared by every box query on one complex: a point
/// index and lazily built cell polygons. Unbounded cells are clipped to a
/// rectangle far outside the window, so the artificial edges never reach
/// a region any valid query looks at.
pub struct PercolationGeometry<'a> {
    complex: &'a DelaunayComplex,
    index: GridIndex,
    cells: Vec<OnceCell<Vec<Vec2>>>,
    clip: Rect,
    reach: f64,
}

impl<'a> PercolationGeometry<'a> {
    pub fn new(complex: &'a DelaunayComplex) -> Self {
        let w = complex.config().window();
        let h = w.half_side();
        PercolationGeometry {
            complex,
            index: complex.point_index(),
            cells: (0..complex.len()).map(|_| OnceCell::new()).collect(),
            clip: w.rect().expanded(2.0 * h + 1.0),
            reach: 8.0 * h + 1.0,
        }
    }

    pub fn complex(&self) -> &'a DelaunayComplex {
        self.complex
    }

    /// Vertices of the cell of `v`, counter-clockwise.
    pub fn cell(&self, v: u32) -> &[Vec2] {
        self.cells[v as usize].get_or_init(|| {
            if self.complex.is_bounded(v) {
                self.complex.cell_vertices(v)
            } else {
                self.complex.cell_polygon(v, self.clip).verts
            }
        })
    }

    /// Cells at distance `< t` (`strict`) or `≤ t` from `rect`, found by
    /// walking the triangulation outward from the cell holding its centre.
    pub fn cells_near(&self, rect: &Rect, t: f64, strict: bool) -> Vec<u32> {
        let Some(seed) = self.index.nearest(rect.center()) else { return Vec::new() };
        let near = |v: u32| {
            let d = poly_rect_dist(self.cell(v), rect);
            if strict {
                d < t
            } else {
                d <= t
            }
        };
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(seed);
        queue.push_back(seed);
        while let Some(v) = queue.pop_front() {
            if !near(v) {
                continue;
            }
            out.push(v);
            for &u in self.complex.triangulation_neighbors(v) {
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// `max { dist(y, ξ) : dist(y, rect) ≤ t }`, exactly. On each cell the
    /// distance to ξ is the distance to the nucleus, a convex function, so
    /// its maximum over the cell's part of the region sits at a cell vertex,
    /// where a cell edge crosses the region boundary, at a junction of the
    /// boundary, or at the point of a corner arc farthest from the nucleus.
    pub fn max_void_radius(&self, rect: &Rect, t: f64) -> f64 {
        if self.complex.is_empty() {
            return f64::INFINITY;
        }
        let inside = |q: Vec2| rect.dist(q) <= t * (1.0 + 1e-12) + 1e-300;
        let corners = rect.corners();
        const SIGNS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
        let mut best = 0.0f64;
        for v in self.cells_near(rect, t, false) {
            let z = self.complex.point(v);
            let poly = self.cell(v);
            let n = poly.len();
            for (k, &q) in poly.iter().enumerate() {
                if inside(q) {
                    best = best.max(q.dist(z));
                }
                let b = poly[(k + 1) % n];
                boundary_crossings(q, b, rect, t, |x| best = best.max(x.dist(z)));
            }
            for (c, (sx, sy)) in corners.iter().zip(SIGNS) {
                let dir = *c - z;
                let len = dir.norm();
                if len == 0.0 {
                    continue;
                }
                let q = *c + dir * (t / len);
                if (q.x - c.x) * sx >= 0.0 && (q.y - c.y) * sy >= 0.0 && poly_contains(poly, q) {
                    best = best.max(q.dist(z));
                }
            }
        }
        for (c, (sx, sy)) in corners.iter().zip(SIGNS) {
            for q in [*c + Vec2::new(sx * t, 0.0), *c + Vec2::new(0.0, sy * t)] {
                let near = self.index.nearest(q).expect("nonempty");
                best = best.max(q.dist(self.complex.point(near)));
            }
        }
        best
    }

    /// The cell graph for the crossing condition around `rect` at thickness `t`.
    pub fn crossing_graph(&self, rect: &Rect, t: f64) -> CrossingGraph {
        let cells = self.cells_near(rect, t, true);
        let local: BTreeMap<u32, u32> = cells.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let mut start = Vec::with_capacity(cells.len());
        let mut goal = Vec::with_capacity(cells.len());
        let mut links = Vec::new();
        for (i, &v) in cells.iter().enumerate() {
            let poly = self.cell(v);
            start.push(poly_rect_dist(poly, rect) == 0.0 && poly.iter().any(|&q| !rect.contains_strictly(q)));
            goal.push(poly.iter().any(|&q| rect.dist(q) >= t));
            for &(u, e) in self.complex.neighbor_edges(v) {
                if u <= v {
                    continue;
                }
                let Some(&j) = local.get(&u) else { continue };
                let (a, b) = self.complex.edge(e).face.truncated(self.reach);
                if seg_rect_dist(a, b, rect) < t {
                    links.push((i as u32, j, e));
                }
            }
        }
        CrossingGraph { cells, start, goal, links }
    }

    /// Geometry of site `x` that does not depend on the bond marks.
    pub fn site(&self, x: [i64; 2], r: f64) -> Result<SiteGeometry> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("box side must be positive, got {r}")));
        }
        let cx = AxisBox::coarse_box(&x, r)?;
        let w = self.complex.config().window();
        if !w.contains_box(&cx.expanded(r / 2.0)?) {
            return Err(Error::LocalityViolation(format!(
                "window does not cover the R/2-neighbourhood of box {x:?} at R = {r}"
            )));
        }
        let rect = cx.rect();
        let void_radius = self.max_void_radius(&rect, r / 4.0);
        let ambiguous = (void_radius - r / 4.0).abs() <= r / 512.0;
        let graph = if void_radius >= r / 4.0 { None } else { Some(self.crossing_graph(&rect, r / 4.0)) };
        Ok(SiteGeometry { site: x, void_radius, ambiguous, graph })
    }
}

/// Cells meeting the open `t`-thickening of a box, with the two boundary
/// classes and the faces usable by a crossing path.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingGraph {
    pub cells: Vec<u32>,
    /// Cell meets the box boundary.
    pub start: Vec<bool>,
    /// Cell meets the outer boundary of the thickening.
    pub goal: Vec<bool>,
    /// `(local i, local j, edge id)` for faces that meet the thickening.
    pub links: Vec<(u32, u32, u32)>,
}

impl CrossingGraph {
    /// A path of cells from the box boundary to the outer boundary crossing
    /// only open faces; one cell touching both boundaries is enough.
    pub fn crosses(&self, bonds: &BondConfiguration) -> bool {
        let n = self.cells.len();
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(i, j, e) in &self.links {
            if bonds.is_open(e) {
                adj[i as usize].push(j);
                adj[j as usize].push(i);
            }
        }
        let mut seen = self.start.clone();
        let mut queue: VecDeque<u32> = (0..n as u32).filter(|&i| self.start[i as usize]).collect();
        while let Some(i) = queue.pop_front() {
            if self.goal[i as usize] {
                return true;
            }
            for &j in &adj[i as usize] {
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    queue.push_back(j);
                }
            }
        }
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpenVia {
    EmptyBall,
    OpenPath,
    Closed,
}

impl OpenVia {
    pub fn tag(self) -> &'static str {
        match self {
            OpenVia::EmptyBall => "empty_ball",
            OpenVia::OpenPath => "open_path",
            OpenVia::Closed => "closed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiteGeometry {
    pub site: [i64; 2],
    /// Largest empty-ball radius centred in the closed `R/4`-thickening.
    pub void_radius: f64,
    /// The empty-ball decision is within `R/512` of its threshold.
    pub ambiguous: bool,
    /// Present when the empty-ball condition fails.
    pub graph: Option<CrossingGraph>,
}

impl SiteGeometry {
    pub fn open(&self, bonds: &BondConfiguration) -> BoxOpen {
        let via = match &self.graph {
            None => OpenVia::EmptyBall,
            Some(g) if g.crosses(bonds) => OpenVia::OpenPath,
            Some(_) => OpenVia::Closed,
        };
        BoxOpen { open: via != OpenVia::Closed, via, void_radius: self.void_radius, ambiguous: self.ambiguous }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxOpen {
    pub open: bool,
    pub via: OpenVia,
    pub void_radius: f64,
    pub ambiguous: bool,
}

/// Whether `C_x = xR + [0, R]²` is open: some ball of radius `R/4` centred
/// within `R/4` of the box is empty, or a path from the box boundary to
/// distance `R/4` stays inside cells except where it crosses open faces.
pub fn box_open(geom: &PercolationGeometry<'_>, bonds: &BondConfiguration, x: [i64; 2], r: f64) -> Result<BoxOpen> {
    Ok(geom.site(x, r)?.open(bonds))
}

/// A sampling window centred on the lattice block that covers the
/// `R/2`-neighbourhood of every box `C_x` with `|x|_∞ ≤ half`.
pub fn lattice_geometry_window(r: f64, half: i64) -> Result<AxisBox> {
    AxisBox::new(alloc::vec![r / 2.0; 2], (half as f64 + 1.25) * r)
}

/// The union of the boxes `C_x`, `|x|_∞ ≤ half`.
pub fn lattice_core(r: f64, half: i64) -> Result<AxisBox> {
    AxisBox::new(alloc::vec![r / 2.0; 2], (half as f64 + 0.5) * r)
}

/// The open/closed state of the boxes `C_x`, `|x|_∞ ≤ half`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    pub side: f64,
    pub half: i64,
    /// Row-major over `y`, then `x`, both from `-half`.
    pub eta: Vec<bool>,
}

impl LatticeField {
    pub fn width(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    pub fn sites(&self) -> impl Iterator<Item = [i64; 2]> + '_ {
        let h = self.half;
        (-h..=h).flat_map(move |y| (-h..=h).map(move |x| [x, y]))
    }

    pub fn index(&self, x: [i64; 2]) -> Option<usize> {
        let h = self.half;
        if x[0].abs() > h || x[1].abs() > h {
            return None;
        }
        Some(((x[1] + h) as usize) * self.width() + (x[0] + h) as usize)
    }

    pub fn get(&self, x: [i64; 2]) -> Option<bool> {
        self.index(x).map(|i| self.eta[i])
    }

    pub fn open_count(&self) -> usize {
        self.eta.iter().filter(|&&e| e).count()
    }

    /// Nearest-neighbour components of open sites: label per site
    /// (`u32::MAX` for closed sites) and component sizes.
    pub fn components(&self) -> (Vec<u32>, Vec<usize>) {
        let w = self.width();
        let mut dsu = DisjointSets::new(self.eta.len());
        for i in 0..self.eta.len() {
            if !self.eta[i] {
                continue;
            }
            if i % w + 1 < w && self.eta[i + 1] {
                dsu.union(i as u32, i as u32 + 1);
            }
            if i + w < self.eta.len() && self.eta[i + w] {
                dsu.union(i as u32, (i + w) as u32);
            }
        }
        let (ids, _) = dsu.labels();
        // relabel open components densely
        let mut map = BTreeMap::new();
        let mut sizes = Vec::new();
        let labels = ids
            .iter()
            .zip(&self.eta)
            .map(|(&c, &open)| {
                if !open {
                    return u32::MAX;
                }
                let k = *map.entry(c).or_insert_with(|| {
                    sizes.push(0);
                    sizes.len() as u32 - 1
                });
                sizes[k as usize] += 1;
                k
            })
            .collect();
        (labels, sizes)
    }

    /// Euclidean diameter, in lattice units, of each open component.
    pub fn component_diameters(&self) -> Vec<f64> {
        let (labels, sizes) = self.components();
        let mut groups: Vec<Vec<Vec2>> = vec![Vec::new(); sizes.len()];
        for (x, &c) in self.sites().zip(&labels) {
            if c != u32::MAX {
                groups[c as usize].push(Vec2::new(x[0] as f64, x[1] as f64));
            }
        }
        groups.iter().map(|g| diameter(g).0).collect()
    }

    /// Some open component meets two opposite sides of the lattice block.
    pub fn spans(&self) -> bool {
        let (labels, sizes) = self.components();
        let h = self.half;
        let mut touch = vec![0u8; sizes.len()];
        for (x, &c) in self.sites().zip(&labels) {
            if c == u32::MAX {
                continue;
            }
            let t = &mut touch[c as usize];
            *t |= (x[0] == -h) as u8 | ((x[0] == h) as u8) << 1 | ((x[1] == -h) as u8) << 2 | ((x[1] == h) as u8) << 3;
        }
        touch.iter().any(|&t| t & 3 == 3 || t & 12 == 12)
    }
}

/// Mark-independent geometry of every site of the block `|x|_∞ ≤ half`.
pub fn lattice_sites(geom: &PercolationGeometry<'_>, r: f64, half: i64) -> Result<Vec<SiteGeometry>> {
    if half < 0 {
        return Err(Error::InvalidParameter(format!("lattice half-width must be >= 0, got {half}")));
    }
    let mut out = Vec::new();
    for y in -half..=half {
        for x in -half..=half {
            out.push(geom.site([x, y], r)?);
        }
    }
    Ok(out)
}

pub fn field_from_sites(sites: &[SiteGeometry], bonds: &BondConfiguration, r: f64, half: i64) -> LatticeField {
    LatticeField { side: r, half, eta: sites.iter().map(|s| s.open(bonds).open).collect() }
}

/// `η_x` for every site of the block `|x|_∞ ≤ half`.
pub fn eta_field(geom: &PercolationGeometry<'_>, bonds: &BondConfiguration, r: f64, half: i64) -> Result<LatticeField> {
    Ok(field_from_sites(&lattice_sites(geom, r, half)?, bonds, r, half))
}

pub(crate) fn poly_contains(poly: &[Vec2], p: Vec2) -> bool {
    let n = poly.len();
    n >= 3 && (0..n).all(|i| (poly[(i + 1) % n] - poly[i]).cross(p - poly[i]) >= 0.0)
}

/// Distance between a closed convex polygon and a closed rectangle.
pub(crate) fn poly_rect_dist(poly: &[Vec2], r: &Rect) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => r.dist(poly[0]),
        n => {
            if poly.iter().any(|&q| r.contains(q)) || r.corners().iter().any(|&c| poly_contains(poly, c)) {
                return 0.0;
            }
            (0..n).map(|i| seg_rect_dist(poly[i], poly[(i + 1) % n], r)).fold(f64::INFINITY, f64::min)
        }
    }
}

/// Calls `f` at every point where segment `ab` meets the boundary of the
/// closed `t`-thickening of `rect` (endpoints of overlaps for collinear
/// pieces).
fn boundary_crossings(a: Vec2, b: Vec2, rect: &Rect, t: f64, mut f: impl FnMut(Vec2)) {
    let (lo, hi) = (rect.lo, rect.hi);
    // horizontal sides: y = const, x in [lo.x, hi.x]
    for y in [lo.y - t, hi.y + t] {
        line_hits(a.y, b.y, y, |s| {
            let x = a.x + s * (b.x - a.x);
            if x >= lo.x && x <= hi.x {
                f(Vec2::new(x, y));
            }
        });
        if a.y == y && b.y == y {
            for x in [a.x, b.x] {
                f(Vec2::new(x.clamp(lo.x, hi.x), y));
            }
        }
    }
    for x in [lo.x - t, hi.x + t] {
        line_hits(a.x, b.x, x, |s| {
            let y = a.y + s * (b.y - a.y);
            if y >= lo.y && y <= hi.y {
                f(Vec2::new(x, y));
            }
        });
        if a.x == x && b.x == x {
            for y in [a.y, b.y] {
                f(Vec2::new(x, y.clamp(lo.y, hi.y)));
            }
        }
    }
    const SIGNS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
    for (c, (sx, sy)) in rect.corners().iter().zip(SIGNS) {
        let d = b - a;
        let m = a - *c;
        let qa = d.norm2();
        if qa == 0.0 {
            continue;
        }
        let qb = 2.0 * m.dot(d);
        let qc = m.norm2() - t * t;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        for s in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if (0.0..=1.0).contains(&s) {
                let q = a + d * s;
                if (q.x - c.x) * sx >= 0.0 && (q.y - c.y) * sy >= 0.0 {
                    f(q);
                }
            }
        }
    }
}

/// Parameter `s ∈ [0, 1]` where `u + s (v − u)` equals `level`, if unique.
fn line_hits(u: f64, v: f64, level: f64, mut f: impl FnMut(f64)) {
    if u == v {
        return;
    }
    if (u - level) * (v - level) <= 0.0 {
        f(((level - u) / (v - u)).clamp(0.0, 1.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PointConfiguration;

    /// Square grid with the given spacing, offset by half a step so no point
    /// sits on a box boundary.
    pub(crate) fn grid_complex(window: AxisBox, step: f64) -> DelaunayComplex {
        let mut pts = Vec::new();
        let (lo, hi) = (window.lo(0), window.hi(0));
        let n = ((hi - lo) / step) as i64;
        for i in 0..n {
            for j in 0..n {
                // a tiny shear breaks the cocircular squares
                let x = lo + (i as f64 + 0.5) * step + j as f64 * step * 1e-4;
                let y = lo + (j as f64 + 0.5) * step + i as f64 * step * 1.3e-4;
                if x < hi && y < hi {
                    pts.push(Vec2::new(x, y));
                }
            }
        }
        DelaunayComplex::new(PointConfiguration::from_planar(window, &pts).unwrap()).unwrap()
    }

    /// Brute-force maximum of the distance to ξ over a fine sample of the
    /// closed thickening.
    fn brute_void(cx: &DelaunayComplex, rect: &Rect, t: f64, n: usize) -> f64 {
        let pts = cx.points();
        let big = rect.expanded(t);
        let mut best = 0.0f64;
        for i in 0..=n {
            for j in 0..=n {
                let q = Vec2::new(
                    big.lo.x + (big.hi.x - big.lo.x) * i as f64 / n as f64,
                    big.lo.y + (big.hi.y - big.lo.y) * j as f64 / n as f64,
                );
                if rect.dist(q) <= t {
                    best = best.max(pts.iter().map(|p| p.dist(q)).fold(f64::INFINITY, f64::min));
                }
            }
        }
        best
    }

    #[test]
    fn void_radius_matches_brute_force() {
        let w = AxisBox::centered(2, 6.0).unwrap();
        for seed in 0..8 {
            let cfg = crate::process::sample_poisson(1.0, &w, &mut crate::rng::RngStream::new(seed, 0, "t").rng());
            let cx = DelaunayComplex::new(cfg).unwrap();
            let geom = PercolationGeometry::new(&cx);
            let rect = Rect::new(Vec2::new(-1.0, -1.5), Vec2::new(1.5, 1.0));
            let exact = geom.max_void_radius(&rect, 1.0);
            let brute = brute_void(&cx, &rect, 1.0, 300);
            // the sample can only undershoot, by at most the grid step
            assert!(exact >= brute - 1e-12 && exact <= brute + 0.03, "{seed}: {exact} vs {brute}");
        }
    }

    #[test]
    fn empty_neighbourhood_is_an_empty_ball() {
        let w = AxisBox::centered(2, 20.0).unwrap();
        let pts = [Vec2::new(-18.0, -18.0), Vec2::new(18.0, 17.0), Vec2::new(-17.0, 18.0)];
        let cx = DelaunayComplex::new(PointConfiguration::from_planar(w.clone(), &pts).unwrap()).unwrap();
        let geom = PercolationGeometry::new(&cx);
        let b = box_open(&geom, &BondConfiguration::all(&cx, false), [0, 0], 8.0).unwrap();
        assert_eq!((b.open, b.via), (true, OpenVia::EmptyBall));
        let empty = DelaunayComplex::new(PointConfiguration::empty(w)).unwrap();
        let geom = PercolationGeometry::new(&empty);
        let f = eta_field(&geom, &BondConfiguration::all(&empty, true), 4.0, 1).unwrap();
        assert!(f.eta.iter().all(|&e| e));
    }

    #[test]
    fn fine_grid_needs_open_bonds() {
        let r = 8.0;
        let w = lattice_geometry_window(r, 0).unwrap();
        let cx = grid_complex(w, r / 20.0);
        let geom = PercolationGeometry::new(&cx);
        let closed = box_open(&geom, &BondConfiguration::all(&cx, false), [0, 0], r).unwrap();
        assert_eq!((closed.open, closed.via), (false, OpenVia::Closed));
        assert!(closed.void_radius < r / 8.0);
        let open = box_open(&geom, &BondConfiguration::all(&cx, true), [0, 0], r).unwrap();
        assert_eq!((open.open, open.via), (true, OpenVia::OpenPath));
    }

    #[test]
    fn window_must_cover_neighbourhood() {
        let w = AxisBox::centered(2, 5.0).unwrap();
        let cx = grid_complex(w, 1.0);
        let geom = PercolationGeometry::new(&cx);
        let e = box_open(&geom, &BondConfiguration::all(&cx, true), [0, 0], 8.0);
        assert!(matches!(e, Err(Error::LocalityViolation(_))));
    }

    #[test]
    fn tall_cell_crosses_alone() {
        // 0.2 × 3.6 rectangular cells: no empty ball of radius 2, and the row
        // at y = −1 has cells reaching from inside the box to y = −2.8
        let r = 8.0;
        let w = lattice_geometry_window(r, 0).unwrap();
        let mut pts = Vec::new();
        for i in 0..100 {
            for j in 0..6 {
                pts.push(Vec2::new(-5.9 + 0.2 * i as f64 + 1e-5 * j as f64, -4.6 + 3.6 * j as f64 + 1e-5 * i as f64));
            }
        }
        let cx = DelaunayComplex::new(PointConfiguration::from_planar(w, &pts).unwrap()).unwrap();
        let geom = PercolationGeometry::new(&cx);
        let s = geom.site([0, 0], r).unwrap();
        assert!(s.void_radius < 1.9, "void {}", s.void_radius);
        let b = s.open(&BondConfiguration::all(&cx, false));
        assert_eq!(b.via, OpenVia::OpenPath);
    }

    #[test]
    fn lattice_components() {
        let f = LatticeField { side: 1.0, half: 1, eta: alloc::vec![true, true, false, false, true, false, true, false, true] };
        let (labels, sizes) = f.components();
        assert_eq!(sizes, alloc::vec![3, 1, 1]);
        assert_eq!(labels[2], u32::MAX);
        assert!(!f.spans());
        let col = LatticeField { side: 1.0, half: 1, eta: alloc::vec![false, true, false, false, true, false, false, true, false] };
        assert!(col.spans());
        let d = f.component_diameters();
        assert!((d[0] - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(f.get([1, 1]), Some(true));
        assert_eq!(f.get([2, 0]), None);
    }
}

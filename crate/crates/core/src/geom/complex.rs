use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::config::PointConfiguration;
use super::grid::GridIndex;
use super::point::{Ball, Point, Rect, Vec2};
use super::polygon::{Polygon, Side};
use super::triangulation::{triangulate, Layout, Triangulation, GHOST};
use crate::{Error, Result};

/// Relative face-length threshold: a shared Voronoi face shorter than
/// `FACE_TOLERANCE * window half-side` does not make an edge.
pub const FACE_TOLERANCE: f64 = 1e-9;

/// The Voronoi face dual to a Delaunay edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Face {
    Segment(Vec2, Vec2),
    /// Half-line from `origin` along `dir` (unit).
    Ray { origin: Vec2, dir: Vec2 },
    /// Full line through `point` along `dir` (unit); only for collinear inputs.
    Line { point: Vec2, dir: Vec2 },
}

impl Face {
    pub fn length(&self) -> f64 {
        match self {
            Face::Segment(a, b) => a.dist(*b),
            _ => f64::INFINITY,
        }
    }

    /// The face as a finite segment, cut at `reach` along infinite directions.
    pub fn truncated(&self, reach: f64) -> (Vec2, Vec2) {
        match *self {
            Face::Segment(a, b) => (a, b),
            Face::Ray { origin, dir } => (origin, origin + dir * reach),
            Face::Line { point, dir } => (point - dir * reach, point + dir * reach),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub face: Face,
}

impl Edge {
    pub fn other(&self, v: u32) -> u32 {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoronoiCell {
    pub nucleus: Vec2,
    /// Counter-clockwise. For unbounded cells this is the cell clipped to
    /// the sampling window.
    pub vertices: Vec<Vec2>,
    pub bounded: bool,
    /// `(neighbor index, face endpoints)`; unbounded faces are cut at the window.
    pub faces: Vec<(u32, Vec2, Vec2)>,
}

/// `D(x|ξ)`: union of closed balls centred at the Voronoi vertices of `x`'s
/// cell, each reaching `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalRegion {
    pub center: Point,
    pub balls: Vec<Ball>,
}

impl FundamentalRegion {
    pub fn contains(&self, p: &[f64]) -> bool {
        self.balls.iter().any(|b| b.contains(p))
    }

    /// Radius of the smallest ball around the center holding the region.
    pub fn radius(&self) -> f64 {
        self.balls.iter().map(|b| b.radius * 2.0).fold(0.0, f64::max)
    }
}

/// Voronoi cells and Delaunay adjacency of a planar configuration.
#[derive(Clone, Debug)]
pub struct DelaunayComplex {
    config: PointConfiguration,
    pts: Vec<Vec2>,
    tr: Triangulation,
    circum: Vec<Vec2>,
    tri_nbr_start: Vec<u32>,
    tri_nbr: Vec<u32>,
    edges: Vec<Edge>,
    adj_start: Vec<u32>,
    adj: Vec<(u32, u32)>,
    hull: Vec<bool>,
    fr_radius: Vec<f64>,
    interior_valid: Vec<bool>,
    eps_face: f64,
}

fn circumcenter(a: Vec2, b: Vec2, c: Vec2) -> Vec2 {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * b.cross(c);
    let (bb, cc) = (b.norm2(), c.norm2());
    a + Vec2::new((c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d)
}

/// Builds the Delaunay complex of a planar configuration.
pub fn build_delaunay(config: &PointConfiguration) -> Result<DelaunayComplex> {
    DelaunayComplex::new(config.clone())
}

impl DelaunayComplex {
    pub fn new(config: PointConfiguration) -> Result<Self> {
        if config.dim() != 2 {
            return Err(Error::UnsupportedDimension(config.dim()));
        }
        config.validate()?;
        let pts = config.planar_points();
        let n = pts.len();
        let tr = triangulate(&pts);
        let eps_face = FACE_TOLERANCE * config.window().half_side();

        let circum: Vec<Vec2> = tr
            .tris
            .iter()
            .map(|t| {
                if t[2] == GHOST {
                    Vec2::new(f64::NAN, f64::NAN)
                } else {
                    circumcenter(pts[t[0] as usize], pts[t[1] as usize], pts[t[2] as usize])
                }
            })
            .collect();

        let mut pairs: Vec<(u32, u32, Face)> = Vec::new();
        match &tr.layout {
            Layout::Collinear(line) => {
                for w in line.windows(2) {
                    let (p, q) = (pts[w[0] as usize], pts[w[1] as usize]);
                    let dir = (q - p).perp() * (1.0 / p.dist(q));
                    let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                    pairs.push((a, b, Face::Line { point: p.midpoint(q), dir }));
                }
            }
            Layout::Full => {
                for (t, tri) in tr.tris.iter().enumerate() {
                    for i in 0..3 {
                        let (u, w) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                        if u == GHOST || w == GHOST || u > w {
                            continue;
                        }
                        let nb = tr.adj[t][i] as usize;
                        let face = match (tri[2] == GHOST, tr.tris[nb][2] == GHOST) {
                            (false, false) => Face::Segment(circum[t], circum[nb]),
                            (g1, _) => {
                                let real = if g1 { nb } else { t };
                                let rt = tr.tris[real];
                                let third = rt.iter().copied().find(|&x| x != u && x != w).expect("third vertex");
                                let (pu, pw) = (pts[u as usize], pts[w as usize]);
                                let mut dir = (pw - pu).perp() * (1.0 / pu.dist(pw));
                                if dir.dot(pts[third as usize] - pu) > 0.0 {
                                    dir = -dir;
                                }
                                Face::Ray { origin: circum[real], dir }
                            }
                        };
                        pairs.push((u, w, face));
                    }
                }
            }
            _ => {}
        }
        pairs.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));

        let mut tri_deg = vec![0u32; n + 1];
        for &(a, b, _) in &pairs {
            tri_deg[a as usize + 1] += 1;
            tri_deg[b as usize + 1] += 1;
        }
        let edges: Vec<Edge> = pairs
            .iter()
            .filter(|(_, _, f)| f.length() > eps_face)
            .map(|&(a, b, face)| Edge { a, b, face })
            .collect();
        let mut deg = vec![0u32; n + 1];
        for e in &edges {
            deg[e.a as usize + 1] += 1;
            deg[e.b as usize + 1] += 1;
        }
        for k in 1..=n {
            tri_deg[k] += tri_deg[k - 1];
            deg[k] += deg[k - 1];
        }
        let mut tri_nbr = vec![0u32; tri_deg[n] as usize];
        let mut fill = tri_deg.clone();
        for &(a, b, _) in &pairs {
            tri_nbr[fill[a as usize] as usize] = b;
            fill[a as usize] += 1;
            tri_nbr[fill[b as usize] as usize] = a;
            fill[b as usize] += 1;
        }
        let mut adj = vec![(0u32, 0u32); deg[n] as usize];
        let mut fill = deg.clone();
        for (id, e) in edges.iter().enumerate() {
            adj[fill[e.a as usize] as usize] = (e.b, id as u32);
            fill[e.a as usize] += 1;
            adj[fill[e.b as usize] as usize] = (e.a, id as u32);
            fill[e.b as usize] += 1;
        }

        let mut hull = vec![true; n];
        let mut fr_radius = vec![f64::INFINITY; n];
        let mut interior_valid = vec![false; n];
        if tr.layout == Layout::Full {
            let window = config.window();
            for v in 0..n {
                let star = tr.star(v as u32);
                if star.iter().any(|&(t, _)| tr.tris[t as usize][2] == GHOST) {
                    continue;
                }
                hull[v] = false;
                let p = pts[v];
                let mut r = 0.0f64;
                let mut inside = true;
                for &(t, _) in &star {
                    let c = circum[t as usize];
                    let rad = c.dist(p);
                    r = r.max(rad);
                    inside &= window.contains_ball(&[c.x, c.y], rad);
                }
                fr_radius[v] = r;
                interior_valid[v] = inside;
            }
        }

        Ok(DelaunayComplex {
            config,
            pts,
            tr,
            circum,
            tri_nbr_start: tri_deg,
            tri_nbr,
            edges,
            adj_start: deg,
            adj,
            hull,
            fr_radius,
            interior_valid,
            eps_face,
        })
    }

    pub fn config(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    #[inline]
    pub fn point(&self, v: u32) -> Vec2 {
        self.pts[v as usize]
    }

    pub fn points(&self) -> &[Vec2] {
        &self.pts
    }

    pub fn eps_face(&self) -> f64 {
        self.eps_face
    }

    /// Delaunay edges (shared face longer than the tolerance), sorted by
    /// `(a, b)` with `a < b`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: u32) -> &Edge {
        &self.edges[id as usize]
    }

    /// `(neighbor, edge id)` pairs of `v`, neighbors increasing.
    pub fn neighbor_edges(&self, v: u32) -> &[(u32, u32)] {
        &self.adj[self.adj_start[v as usize] as usize..self.adj_start[v as usize + 1] as usize]
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.neighbor_edges(v).iter().map(|&(u, _)| u)
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbor_edges(v).len()
    }

    pub fn are_adjacent(&self, u: u32, v: u32) -> bool {
        self.neighbor_edges(u).binary_search_by_key(&v, |&(w, _)| w).is_ok()
    }

    /// Edge id of `{u, v}`, if they are adjacent.
    pub fn edge_between(&self, u: u32, v: u32) -> Option<u32> {
        let nb = self.neighbor_edges(u);
        nb.binary_search_by_key(&v, |&(w, _)| w).ok().map(|k| nb[k].1)
    }

    /// All triangulation neighbors, including pairs whose shared face is
    /// degenerate; their bisectors cut out the cell exactly.
    pub fn triangulation_neighbors(&self, v: u32) -> &[u32] {
        &self.tri_nbr[self.tri_nbr_start[v as usize] as usize..self.tri_nbr_start[v as usize + 1] as usize]
    }

    pub fn is_hull(&self, v: u32) -> bool {
        self.hull[v as usize]
    }

    pub fn is_bounded(&self, v: u32) -> bool {
        !self.hull[v as usize]
    }

    pub fn is_interior_valid(&self, v: u32) -> bool {
        self.interior_valid[v as usize]
    }

    pub fn interior_valid(&self) -> &[bool] {
        &self.interior_valid
    }

    /// Largest distance from the nucleus to a vertex of its cell; infinite
    /// for unbounded cells. The fundamental region lies within twice this.
    pub fn cell_radius(&self, v: u32) -> f64 {
        self.fr_radius[v as usize]
    }

    /// Circumcenters of all finite triangles: the Voronoi vertices, with
    /// repetitions for cocircular configurations.
    pub fn voronoi_vertices(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.tr
            .tris
            .iter()
            .zip(&self.circum)
            .filter(|(t, _)| t[2] != GHOST)
            .map(|(_, &c)| c)
    }

    /// Voronoi vertices of the cell of `v`, counter-clockwise, without
    /// repeats closer than the face tolerance. Empty for unbounded cells.
    pub fn cell_vertices(&self, v: u32) -> Vec<Vec2> {
        if self.hull[v as usize] {
            return Vec::new();
        }
        let mut out: Vec<Vec2> = Vec::new();
        for (t, _) in self.tr.star(v) {
            let c = self.circum[t as usize];
            if out.last().map_or(true, |&l| l.dist(c) > self.eps_face) {
                out.push(c);
            }
        }
        while out.len() > 1 && out[0].dist(out[out.len() - 1]) <= self.eps_face {
            out.pop();
        }
        out
    }

    /// The cell of `v` intersected with `rect`, with edges labelled by the
    /// neighbor whose bisector produced them.
    pub fn cell_polygon(&self, v: u32, rect: Rect) -> Polygon {
        let mut poly = Polygon::from_rect(rect);
        let p = self.pts[v as usize];
        for &u in self.triangulation_neighbors(v) {
            poly.clip_bisector(p, self.pts[u as usize], Side::Neighbor(u));
            if poly.is_empty() {
                break;
            }
        }
        poly
    }

    /// A rectangle containing the whole cell when it is bounded, otherwise
    /// the window.
    pub fn cell_rect(&self, v: u32) -> Rect {
        let r = self.fr_radius[v as usize];
        let p = self.pts[v as usize];
        if r.is_finite() {
            let pad = r * (1.0 + 1e-9) + self.eps_face;
            Rect::new(p - Vec2::new(pad, pad), p + Vec2::new(pad, pad))
        } else {
            self.config.window().rect()
        }
    }

    pub fn cell(&self, v: u32) -> VoronoiCell {
        let nucleus = self.pts[v as usize];
        let bounded = !self.hull[v as usize];
        let window = self.config.window().rect();
        let vertices = if bounded { self.cell_vertices(v) } else { self.cell_polygon(v, window).verts };
        let reach = 4.0 * self.config.window().half_side();
        let faces = self
            .neighbor_edges(v)
            .iter()
            .map(|&(u, e)| {
                let (a, b) = self.edges[e as usize].face.truncated(reach);
                (u, a, b)
            })
            .collect();
        VoronoiCell { nucleus, vertices, bounded, faces }
    }

    pub fn fundamental_region(&self, v: u32) -> Result<FundamentalRegion> {
        if v as usize >= self.len() {
            return Err(Error::InvalidInput(format!("no point with index {v}")));
        }
        if self.hull[v as usize] {
            return Err(Error::UnboundedCell(v as usize));
        }
        let p = self.pts[v as usize];
        let balls = self
            .cell_vertices(v)
            .into_iter()
            .map(|c| Ball { center: Point::from(c), radius: c.dist(p), closed: true })
            .collect();
        Ok(FundamentalRegion { center: Point::from(p), balls })
    }

    pub fn point_index(&self) -> GridIndex {
        GridIndex::new(self.pts.clone(), 2.0)
    }

    pub fn vertex_index(&self) -> GridIndex {
        GridIndex::new(self.voronoi_vertices().collect(), 2.0)
    }

    /// Index of the point at the origin, if present.
    pub fn origin_index(&self) -> Option<u32> {
        self.pts.iter().position(|p| p.x == 0.0 && p.y == 0.0).map(|i| i as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::AxisBox;

    fn lattice(r: i32, half: f64) -> PointConfiguration {
        let mut c = Vec::new();
        for i in -r..=r {
            for j in -r..=r {
                c.push(i as f64);
                c.push(j as f64);
            }
        }
        PointConfiguration::from_flat(AxisBox::centered(2, half).unwrap(), c).unwrap()
    }

    #[test]
    fn lattice_degree_four() {
        let cx = build_delaunay(&lattice(5, 5.0)).unwrap();
        for v in 0..cx.len() as u32 {
            let p = cx.point(v);
            if p.x.abs().max(p.y.abs()) <= 3.0 {
                assert_eq!(cx.degree(v), 4, "point {p:?}");
                assert!(cx.is_interior_valid(v));
            }
        }
    }

    #[test]
    fn plus_shape() {
        let cfg = PointConfiguration::from_flat(
            AxisBox::centered(2, 3.0).unwrap(),
            alloc::vec![0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0],
        )
        .unwrap();
        let cx = build_delaunay(&cfg).unwrap();
        assert_eq!(cx.degree(0), 4);
        let cell = cx.cell(0);
        assert!(cell.bounded);
        assert_eq!(cell.vertices.len(), 4);
        for v in &cell.vertices {
            assert!((v.x.abs() - 0.5).abs() < 1e-12 && (v.y.abs() - 0.5).abs() < 1e-12);
        }
        // Outer cells share the diagonal rays beyond the square's corners.
        assert!(cx.are_adjacent(1, 3));
        assert!(!cx.are_adjacent(1, 2));
        assert_eq!(cx.degree(1), 3);
        let fr = cx.fundamental_region(0).unwrap();
        for u in 1..5 {
            assert!(fr.contains(cfg.point(u)));
        }
    }

    #[test]
    fn single_and_errors() {
        let w = AxisBox::centered(2, 1.0).unwrap();
        let one = PointConfiguration::from_flat(w.clone(), alloc::vec![0.0, 0.0]).unwrap();
        let cx = build_delaunay(&one).unwrap();
        assert!(cx.edges().is_empty());
        assert!(!cx.is_interior_valid(0));
        assert_eq!(cx.fundamental_region(0), Err(Error::UnboundedCell(0)));
        let w3 = AxisBox::centered(3, 1.0).unwrap();
        let c3 = PointConfiguration::from_flat(w3, alloc::vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(build_delaunay(&c3).unwrap_err(), Error::UnsupportedDimension(3));
    }

    #[test]
    fn collinear_chain() {
        let w = AxisBox::centered(2, 5.0).unwrap();
        let cfg = PointConfiguration::from_flat(w, alloc::vec![0.0, 0.0, 2.0, 2.0, 1.0, 1.0]).unwrap();
        let cx = build_delaunay(&cfg).unwrap();
        assert_eq!(cx.edges().len(), 2);
        assert!(cx.are_adjacent(0, 2) && cx.are_adjacent(1, 2) && !cx.are_adjacent(0, 1));
    }
}

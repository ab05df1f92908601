use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use crate::conductance::edge_uniform;
use crate::geom::{AxisBox, DelaunayComplex, Vec2};
use crate::rng::RngStream;
use crate::{Error, Result};

/// Open/closed marks on the Delaunay edges, indexed by edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BondConfiguration {
    open: Vec<bool>,
}

impl BondConfiguration {
    pub fn from_marks(open: Vec<bool>) -> Self {
        BondConfiguration { open }
    }

    pub fn all(complex: &DelaunayComplex, open: bool) -> Self {
        BondConfiguration { open: vec![open; complex.edges().len()] }
    }

    pub fn is_open(&self, edge: u32) -> bool {
        self.open[edge as usize]
    }

    pub fn marks(&self) -> &[bool] {
        &self.open
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    /// `self ≤ other` edgewise.
    pub fn is_below(&self, other: &BondConfiguration) -> bool {
        self.open.len() == other.open.len() && self.open.iter().zip(&other.open).all(|(&a, &b)| !a || b)
    }
}

/// One uniform in `(0, 1)` per edge, keyed by the unordered pair of point
/// indices. Thresholding these at different `p` gives the monotone coupling.
pub fn bond_uniforms(complex: &DelaunayComplex, rng: &RngStream) -> Vec<f64> {
    bond_uniforms_labeled(complex, rng, |v| v as u64)
}

/// As [`bond_uniforms`], keyed by caller-supplied point labels so that a
/// sub-configuration sees the same marks on the edges it keeps.
pub fn bond_uniforms_labeled(complex: &DelaunayComplex, rng: &RngStream, label: impl Fn(u32) -> u64) -> Vec<f64> {
    complex.edges().iter().map(|e| edge_uniform(rng, label(e.a), label(e.b))).collect()
}

/// Edge open iff its uniform is below `p`.
pub fn bonds_at(uniforms: &[f64], p: f64) -> Result<BondConfiguration> {
    check_probability(p)?;
    Ok(BondConfiguration { open: uniforms.iter().map(|&u| u < p).collect() })
}

pub fn sample_bonds(complex: &DelaunayComplex, p: f64, rng: &RngStream) -> Result<BondConfiguration> {
    check_probability(p)?;
    bonds_at(&bond_uniforms(complex, rng), p)
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("bond probability must lie in [0, 1], got {p}")))
    }
}

/// Union–find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let g = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = g;
            x = g;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }

    /// Dense component labels `0..k` in order of first appearance, and sizes.
    pub fn labels(&mut self) -> (Vec<u32>, Vec<usize>) {
        let n = self.parent.len();
        let mut map = vec![u32::MAX; n];
        let mut ids = Vec::with_capacity(n);
        let mut sizes = Vec::new();
        for v in 0..n as u32 {
            let r = self.find(v) as usize;
            if map[r] == u32::MAX {
                map[r] = sizes.len() as u32;
                sizes.push(0);
            }
            ids.push(map[r]);
            sizes[map[r] as usize] += 1;
        }
        (ids, sizes)
    }
}

/// Connected components of the graph of open edges.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterDecomposition {
    pub component: Vec<u32>,
    pub sizes: Vec<usize>,
    /// Some component has points on both sides of the core in one axis.
    pub spanning: bool,
}

impl ClusterDecomposition {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest(&self) -> Option<u32> {
        (0..self.sizes.len() as u32).max_by_key(|&c| (self.sizes[c as usize], core::cmp::Reverse(c)))
    }

    pub fn largest_size(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn members(&self, c: u32) -> impl Iterator<Item = u32> + '_ {
        self.component.iter().enumerate().filter(move |(_, &k)| k == c).map(|(v, _)| v as u32)
    }

    /// Euclidean diameter of component `c`.
    pub fn diameter(&self, complex: &DelaunayComplex, c: u32) -> f64 {
        let pts: Vec<Vec2> = self.members(c).map(|v| complex.point(v)).collect();
        diameter(&pts).0
    }

    /// Largest Euclidean diameter over all components.
    pub fn largest_diameter(&self, complex: &DelaunayComplex) -> f64 {
        let mut groups: Vec<Vec<Vec2>> = vec![Vec::new(); self.sizes.len()];
        for (v, &c) in self.component.iter().enumerate() {
            if self.sizes[c as usize] > 1 {
                groups[c as usize].push(complex.point(v as u32));
            }
        }
        groups.iter().map(|g| diameter(g).0).fold(0.0, f64::max)
    }
}

/// The core used for the spanning flag when none is given: the window
/// shrunk by 10% of its side on every face.
pub fn default_core(window: &AxisBox) -> AxisBox {
    AxisBox::new(window.center().to_vec(), window.half_side() * 0.8).expect("positive half-side")
}

pub fn clusters(complex: &DelaunayComplex, bonds: &BondConfiguration) -> ClusterDecomposition {
    clusters_in(complex, bonds, &default_core(complex.config().window()))
}

/// Components of the open-edge graph; spanning means some component has a
/// point at or beyond both opposite faces of `core` in the same axis.
pub fn clusters_in(complex: &DelaunayComplex, bonds: &BondConfiguration, core: &AxisBox) -> ClusterDecomposition {
    let mut dsu = DisjointSets::new(complex.len());
    for (id, e) in complex.edges().iter().enumerate() {
        if bonds.is_open(id as u32) {
            dsu.union(e.a, e.b);
        }
    }
    let (component, sizes) = dsu.labels();
    // bit 0: below lo in x, bit 1: above hi in x, bits 2, 3: same in y
    let mut touch = vec![0u8; sizes.len()];
    for (v, &c) in component.iter().enumerate() {
        let p = complex.point(v as u32);
        let t = &mut touch[c as usize];
        if p.x <= core.lo(0) {
            *t |= 1;
        }
        if p.x >= core.hi(0) {
            *t |= 2;
        }
        if p.y <= core.lo(1) {
            *t |= 4;
        }
        if p.y >= core.hi(1) {
            *t |= 8;
        }
    }
    let spanning = touch.iter().any(|&t| t & 3 == 3 || t & 12 == 12);
    ClusterDecomposition { component, sizes, spanning }
}

/// Exact diameter of a planar point set and a pair realising it, via the
/// convex hull.
pub fn diameter(pts: &[Vec2]) -> (f64, Option<(usize, usize)>) {
    if pts.len() < 2 {
        return (0.0, None);
    }
    let hull = convex_hull(pts);
    let mut best = (0.0, Some((hull[0], hull[0])));
    for (k, &i) in hull.iter().enumerate() {
        for &j in &hull[k + 1..] {
            let d = pts[i].dist(pts[j]);
            if d > best.0 {
                best = (d, Some((i.min(j), i.max(j))));
            }
        }
    }
    best
}

/// Indices of the convex hull vertices (monotone chain).
fn convex_hull(pts: &[Vec2]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x).then(pts[a].y.total_cmp(&pts[b].y)));
    let turn = |o: usize, a: usize, b: usize| (pts[a] - pts[o]).cross(pts[b] - pts[o]);
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let seq: Vec<usize> = if pass == 0 { idx.clone() } else { idx.iter().rev().copied().collect() };
        for i in seq {
            while hull.len() >= start + 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) <= 0.0 {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    if hull.is_empty() {
        hull.push(idx[0]);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PointConfiguration;

    fn star() -> DelaunayComplex {
        let pts = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.1), Vec2::new(-0.1, 1.0), Vec2::new(-1.0, -0.1), Vec2::new(0.1, -1.0)];
        let w = AxisBox::centered(2, 2.0).unwrap();
        DelaunayComplex::new(PointConfiguration::from_planar(w, &pts).unwrap()).unwrap()
    }

    #[test]
    fn extremes_and_range() {
        let cx = star();
        let s = RngStream::new(1, 0, "bonds");
        assert_eq!(sample_bonds(&cx, 0.0, &s).unwrap().open_count(), 0);
        assert_eq!(sample_bonds(&cx, 1.0, &s).unwrap().open_count(), cx.edges().len());
        assert!(matches!(sample_bonds(&cx, 1.5, &s), Err(Error::InvalidParameter(_))));
        assert!(matches!(sample_bonds(&cx, -0.1, &s), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn star_edges_join_all_five() {
        let cx = star();
        let marks = cx.edges().iter().map(|e| e.a == 0 || e.b == 0).collect();
        let c = clusters(&cx, &BondConfiguration::from_marks(marks));
        assert_eq!(c.count(), 1);
        assert_eq!(c.sizes, vec![5]);
        let none = clusters(&cx, &BondConfiguration::all(&cx, false));
        assert_eq!(none.sizes, vec![1; 5]);
        assert!(!none.spanning);
    }

    #[test]
    fn coupling_is_monotone() {
        let cx = star();
        let u = bond_uniforms(&cx, &RngStream::new(4, 0, "bonds"));
        let a = bonds_at(&u, 0.3).unwrap();
        let b = bonds_at(&u, 0.7).unwrap();
        assert!(a.is_below(&b));
    }

    #[test]
    fn hull_diameter() {
        let pts = [Vec2::new(0.0, 0.0), Vec2::new(3.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 4.0), Vec2::new(1.0, 2.0)];
        let (d, pair) = diameter(&pts);
        assert_eq!(d, 5.0);
        assert_eq!(pair, Some((1, 3)));
        assert_eq!(diameter(&pts[..1]).0, 0.0);
        let line = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)];
        assert_eq!(diameter(&line).0, 2.0);
    }
}

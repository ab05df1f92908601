//! Incremental Delaunay triangulation (Bowyer–Watson) with ghost triangles.
//!
//! Every hull edge carries a ghost triangle `[u, v, GHOST]` whose outside lies
//! to the left of `u -> v`. A ghost is in conflict with `p` when `p` is strictly
//! left of `u -> v`, or on the edge line strictly between `u` and `v`. With that
//! rule the cavity is star-shaped from `p` in every case, including points
//! landing outside the current hull.

use alloc::vec;
use alloc::vec::Vec;

use robust::Coord;

use super::point::Vec2;

pub(crate) const GHOST: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

#[inline]
pub(crate) fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    robust::orient2d(Coord { x: a.x, y: a.y }, Coord { x: b.x, y: b.y }, Coord { x: c.x, y: c.y })
}

/// Positive when `d` is strictly inside the circle through the
/// counter-clockwise triangle `a, b, c`.
#[inline]
pub(crate) fn incircle(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    robust::incircle(
        Coord { x: a.x, y: a.y },
        Coord { x: b.x, y: b.y },
        Coord { x: c.x, y: c.y },
        Coord { x: d.x, y: d.y },
    )
}

/// `p` lies strictly between `u` and `v`; assumes the three are collinear.
#[inline]
fn strictly_between(u: Vec2, v: Vec2, p: Vec2) -> bool {
    if u.x != v.x {
        (u.x < p.x && p.x < v.x) || (v.x < p.x && p.x < u.x)
    } else {
        (u.y < p.y && p.y < v.y) || (v.y < p.y && p.y < u.y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Layout {
    Empty,
    Single,
    /// All points on one line, listed in order along it.
    Collinear(Vec<u32>),
    Full,
}

/// Final triangulation: live triangles only, ghost vertex always in slot 2.
#[derive(Clone, Debug)]
pub(crate) struct Triangulation {
    pub layout: Layout,
    pub tris: Vec<[u32; 3]>,
    /// `adj[t][i]` is the triangle across the edge opposite `tris[t][i]`.
    pub adj: Vec<[u32; 3]>,
    pub vert_tri: Vec<u32>,
}

impl Triangulation {
    /// Triangles around `v` in counter-clockwise order, with the slot of `v`
    /// in each. Ghosts are included for hull vertices.
    pub fn star(&self, v: u32) -> Vec<(u32, usize)> {
        let mut out = Vec::new();
        let start = self.vert_tri[v as usize];
        if start == NONE {
            return out;
        }
        let mut t = start;
        loop {
            let slot = self.tris[t as usize].iter().position(|&w| w == v).expect("vertex in its star");
            out.push((t, slot));
            t = self.adj[t as usize][(slot + 1) % 3];
            if t == start || out.len() > self.tris.len() {
                break;
            }
        }
        out
    }
}

pub(crate) fn triangulate(pts: &[Vec2]) -> Triangulation {
    let n = pts.len();
    match n {
        0 => return degenerate(Layout::Empty, n),
        1 => return degenerate(Layout::Single, n),
        _ => {}
    }
    let mut order = hilbert_order(pts);
    let (a, b) = (order[0], order[1]);
    let Some(k) = (2..n).find(|&k| orient(pts[a as usize], pts[b as usize], pts[order[k] as usize]) != 0.0)
    else {
        let mut line: Vec<u32> = (0..n as u32).collect();
        line.sort_unstable_by(|&i, &j| {
            let (p, q) = (pts[i as usize], pts[j as usize]);
            p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
        });
        return degenerate(Layout::Collinear(line), n);
    };
    order.swap(2, k);
    let mut b = Builder::new(pts);
    b.seed(order[0], order[1], order[2]);
    for &p in &order[3..] {
        b.insert(p);
    }
    b.finish()
}

fn degenerate(layout: Layout, n: usize) -> Triangulation {
    Triangulation { layout, tris: Vec::new(), adj: Vec::new(), vert_tri: vec![NONE; n] }
}

/// Insertion order along a Hilbert curve over the bounding box, so that
/// consecutive points are close and the walk from the last triangle is short.
fn hilbert_order(pts: &[Vec2]) -> Vec<u32> {
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in pts {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    const SIDE: u32 = 1 << 16;
    let span = (hi.x - lo.x).max(hi.y - lo.y);
    let scale = if span > 0.0 { (SIDE - 1) as f64 / span } else { 0.0 };
    let mut keyed: Vec<(u64, u32)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x = ((p.x - lo.x) * scale) as u32;
            let y = ((p.y - lo.y) * scale) as u32;
            (hilbert_index(SIDE, x.min(SIDE - 1), y.min(SIDE - 1)), i as u32)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

fn hilbert_index(side: u32, mut x: u32, mut y: u32) -> u64 {
    let mut d = 0u64;
    let mut s = side / 2;
    while s > 0 {
        let rx = (x & s > 0) as u32;
        let ry = (y & s > 0) as u32;
        d += s as u64 * s as u64 * ((3 * rx) ^ ry) as u64;
        if ry == 0 {
            if rx == 1 {
                x = side - 1 - x;
                y = side - 1 - y;
            }
            core::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

struct Builder<'a> {
    pts: &'a [Vec2],
    tris: Vec<[u32; 3]>,
    adj: Vec<[u32; 3]>,
    dead: Vec<bool>,
    free: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
    last: u32,
    walk_state: u64,
    // Indexed by vertex id, the ghost vertex mapped to `pts.len()`.
    by_first: Vec<u32>,
    by_second: Vec<u32>,
    cavity: Vec<u32>,
    stack: Vec<u32>,
    boundary: Vec<(u32, u32, u32, usize)>,
    created: Vec<u32>,
}

impl<'a> Builder<'a> {
    fn new(pts: &'a [Vec2]) -> Self {
        let cap = 2 * pts.len() + 8;
        Builder {
            pts,
            tris: Vec::with_capacity(cap),
            adj: Vec::with_capacity(cap),
            dead: Vec::with_capacity(cap),
            free: Vec::new(),
            mark: Vec::with_capacity(cap),
            epoch: 0,
            last: 0,
            walk_state: 0x9E37_79B9_7F4A_7C15,
            by_first: vec![NONE; pts.len() + 1],
            by_second: vec![NONE; pts.len() + 1],
            cavity: Vec::new(),
            stack: Vec::new(),
            boundary: Vec::new(),
            created: Vec::new(),
        }
    }

    #[inline]
    fn p(&self, v: u32) -> Vec2 {
        self.pts[v as usize]
    }

    #[inline]
    fn slot_key(&self, v: u32) -> usize {
        if v == GHOST {
            self.pts.len()
        } else {
            v as usize
        }
    }

    fn alloc(&mut self, t: [u32; 3]) -> u32 {
        if let Some(id) = self.free.pop() {
            self.tris[id as usize] = t;
            self.adj[id as usize] = [NONE; 3];
            self.dead[id as usize] = false;
            id
        } else {
            self.tris.push(t);
            self.adj.push([NONE; 3]);
            self.dead.push(false);
            self.mark.push(0);
            (self.tris.len() - 1) as u32
        }
    }

    fn seed(&mut self, a: u32, b: u32, c: u32) {
        let (a, b) = if orient(self.p(a), self.p(b), self.p(c)) > 0.0 { (a, b) } else { (b, a) };
        let t0 = self.alloc([a, b, c]);
        let ga = self.alloc([c, b, GHOST]);
        let gb = self.alloc([a, c, GHOST]);
        let gc = self.alloc([b, a, GHOST]);
        self.adj[t0 as usize] = [ga, gb, gc];
        self.adj[ga as usize] = [gc, gb, t0];
        self.adj[gb as usize] = [ga, gc, t0];
        self.adj[gc as usize] = [gb, ga, t0];
        self.last = t0;
    }

    fn conflict(&self, t: u32, p: Vec2) -> bool {
        let [a, b, c] = self.tris[t as usize];
        if c == GHOST {
            let (u, v) = (self.p(a), self.p(b));
            let o = orient(u, v, p);
            o > 0.0 || (o == 0.0 && strictly_between(u, v, p))
        } else {
            incircle(self.p(a), self.p(b), self.p(c), p) > 0.0
        }
    }

    fn next_rand(&mut self) -> u64 {
        self.walk_state ^= self.walk_state << 13;
        self.walk_state ^= self.walk_state >> 7;
        self.walk_state ^= self.walk_state << 17;
        self.walk_state
    }

    /// Visibility walk towards `p`; falls back to a scan if the walk stalls.
    fn locate(&mut self, p: Vec2) -> u32 {
        let mut t = self.last;
        let cap = 64 + 4 * self.tris.len();
        for _ in 0..cap {
            let tri = self.tris[t as usize];
            if tri[2] == GHOST {
                if self.conflict(t, p) {
                    return t;
                }
                t = self.adj[t as usize][2];
                continue;
            }
            let s = (self.next_rand() % 3) as usize;
            let mut moved = false;
            for k in 0..3 {
                let i = (s + k) % 3;
                let (u, v) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                if orient(self.p(u), self.p(v), p) < 0.0 {
                    t = self.adj[t as usize][i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                if self.conflict(t, p) {
                    return t;
                }
                break;
            }
        }
        (0..self.tris.len() as u32)
            .find(|&t| !self.dead[t as usize] && self.conflict(t, p))
            .expect("some triangle conflicts with a new distinct point")
    }

    fn insert(&mut self, pv: u32) {
        let p = self.p(pv);
        let t0 = self.locate(p);
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.cavity.clear();
        self.boundary.clear();
        self.stack.clear();
        self.mark[t0 as usize] = epoch;
        self.stack.push(t0);
        while let Some(t) = self.stack.pop() {
            self.cavity.push(t);
            for i in 0..3 {
                let nb = self.adj[t as usize][i];
                if self.mark[nb as usize] == epoch {
                    continue;
                }
                if self.conflict(nb, p) {
                    self.mark[nb as usize] = epoch;
                    self.stack.push(nb);
                } else {
                    let tri = self.tris[t as usize];
                    let back = self.adj[nb as usize].iter().position(|&x| x == t).expect("symmetric adjacency");
                    self.boundary.push((tri[(i + 1) % 3], tri[(i + 2) % 3], nb, back));
                }
            }
        }
        for k in 0..self.cavity.len() {
            let t = self.cavity[k];
            self.dead[t as usize] = true;
            self.free.push(t);
        }
        self.created.clear();
        for k in 0..self.boundary.len() {
            let (a, b, _, _) = self.boundary[k];
            let id = self.alloc([a, b, pv]);
            let (ka, kb) = (self.slot_key(a), self.slot_key(b));
            self.by_first[ka] = id;
            self.by_second[kb] = id;
            self.created.push(id);
        }
        for k in 0..self.boundary.len() {
            let (a, b, outer, back) = self.boundary[k];
            let id = self.created[k];
            let opp_a = self.by_first[self.slot_key(b)];
            let opp_b = self.by_second[self.slot_key(a)];
            self.adj[id as usize] = [opp_a, opp_b, outer];
            self.adj[outer as usize][back] = id;
        }
        for k in 0..self.created.len() {
            let id = self.created[k] as usize;
            let t = self.tris[id];
            let rot = if t[0] == GHOST {
                1
            } else if t[1] == GHOST {
                2
            } else {
                0
            };
            if rot != 0 {
                let (tv, ta) = (t, self.adj[id]);
                for i in 0..3 {
                    self.tris[id][i] = tv[(i + rot) % 3];
                    self.adj[id][i] = ta[(i + rot) % 3];
                }
            } else {
                self.last = id as u32;
            }
        }
    }

    fn finish(self) -> Triangulation {
        let mut remap = vec![NONE; self.tris.len()];
        let mut tris = Vec::with_capacity(self.tris.len());
        for (t, tri) in self.tris.iter().enumerate() {
            if !self.dead[t] {
                remap[t] = tris.len() as u32;
                tris.push(*tri);
            }
        }
        let mut adj = Vec::with_capacity(tris.len());
        for (t, a) in self.adj.iter().enumerate() {
            if !self.dead[t] {
                adj.push([remap[a[0] as usize], remap[a[1] as usize], remap[a[2] as usize]]);
            }
        }
        let mut vert_tri = vec![NONE; self.pts.len()];
        for (t, tri) in tris.iter().enumerate() {
            for &v in tri {
                if v != GHOST && vert_tri[v as usize] == NONE {
                    vert_tri[v as usize] = t as u32;
                }
            }
        }
        Triangulation { layout: Layout::Full, tris, adj, vert_tri }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_structure(tr: &Triangulation, pts: &[Vec2]) {
        for (t, tri) in tr.tris.iter().enumerate() {
            assert_ne!(tri[0], GHOST);
            assert_ne!(tri[1], GHOST);
            if tri[2] != GHOST {
                let o = orient(pts[tri[0] as usize], pts[tri[1] as usize], pts[tri[2] as usize]);
                assert!(o > 0.0, "triangle {t} not counter-clockwise");
            }
            for i in 0..3 {
                let nb = tr.adj[t][i] as usize;
                let (u, v) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                let j = tr.adj[nb].iter().position(|&x| x as usize == t).expect("back pointer");
                let nt = tr.tris[nb];
                assert_eq!((nt[(j + 1) % 3], nt[(j + 2) % 3]), (v, u), "edge twin mismatch");
            }
        }
    }

    fn check_delaunay(tr: &Triangulation, pts: &[Vec2]) {
        for tri in tr.tris.iter().filter(|t| t[2] != GHOST) {
            let [a, b, c] = tri.map(|v| pts[v as usize]);
            for (k, &q) in pts.iter().enumerate() {
                if tri.contains(&(k as u32)) {
                    continue;
                }
                assert!(incircle(a, b, c, q) <= 0.0, "point {k} inside a circumcircle");
            }
        }
    }

    fn lcg_points(n: usize, seed: u64) -> Vec<Vec2> {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..n).map(|_| Vec2::new(next() * 10.0, next() * 10.0)).collect()
    }

    #[test]
    fn random_points_are_delaunay() {
        for seed in 0..20 {
            let pts = lcg_points(60, seed);
            let tr = triangulate(&pts);
            assert_eq!(tr.layout, Layout::Full);
            check_structure(&tr, &pts);
            check_delaunay(&tr, &pts);
            let real = tr.tris.iter().filter(|t| t[2] != GHOST).count();
            let ghosts = tr.tris.len() - real;
            // Euler: 2n - 2 - h triangles with h hull vertices.
            assert_eq!(real, 2 * pts.len() - 2 - ghosts);
        }
    }

    #[test]
    fn lattice_and_collinear_hull() {
        let mut pts = Vec::new();
        for i in 0..7 {
            for j in 0..7 {
                pts.push(Vec2::new(i as f64, j as f64));
            }
        }
        let tr = triangulate(&pts);
        check_structure(&tr, &pts);
        check_delaunay(&tr, &pts);
        assert_eq!(tr.tris.iter().filter(|t| t[2] == GHOST).count(), 24);
    }

    #[test]
    fn degenerate_layouts() {
        assert_eq!(triangulate(&[]).layout, Layout::Empty);
        assert_eq!(triangulate(&[Vec2::new(1.0, 2.0)]).layout, Layout::Single);
        let line = [Vec2::new(2.0, 2.0), Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)];
        assert_eq!(triangulate(&line).layout, Layout::Collinear(vec![1, 2, 0]));
    }

    #[test]
    fn stars_close_up() {
        let pts = lcg_points(40, 99);
        let tr = triangulate(&pts);
        for v in 0..pts.len() as u32 {
            let star = tr.star(v);
            assert!(star.len() >= 3);
            let (t, s) = star[star.len() - 1];
            assert_eq!(tr.adj[t as usize][(s + 1) % 3], star[0].0);
        }
    }
}

use alloc::vec::Vec;

use super::point::{Rect, Vec2};

/// Which line produced an edge of a clipped cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Bisector with this nucleus.
    Neighbor(u32),
    /// Edge of the clipping rectangle (0 bottom, 1 right, 2 top, 3 left).
    Clip(u8),
}

/// Convex polygon with counter-clockwise vertices; `sides[i]` labels the
/// edge `verts[i] -> verts[i + 1]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polygon {
    pub verts: Vec<Vec2>,
    pub sides: Vec<Side>,
}

impl Polygon {
    pub fn from_rect(r: Rect) -> Self {
        Polygon {
            verts: r.corners().to_vec(),
            sides: alloc::vec![Side::Clip(0), Side::Clip(1), Side::Clip(2), Side::Clip(3)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() < 3
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        (self.verts[i], self.verts[(i + 1) % self.verts.len()])
    }

    /// Keep the part where `normal . (y - anchor) <= 0`; new edges get `label`.
    pub fn clip(&mut self, normal: Vec2, anchor: Vec2, label: Side) {
        let n = self.verts.len();
        if n == 0 {
            return;
        }
        let f: Vec<f64> = self.verts.iter().map(|&v| normal.dot(v - anchor)).collect();
        if f.iter().all(|&x| x <= 0.0) {
            return;
        }
        let mut verts = Vec::with_capacity(n + 1);
        let mut sides = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (p, q, fp, fq, l) = (self.verts[i], self.verts[j], f[i], f[j], self.sides[i]);
            let cut = || p + (q - p) * (fp / (fp - fq));
            match (fp <= 0.0, fq <= 0.0) {
                (true, true) => {
                    verts.push(p);
                    sides.push(l);
                }
                (true, false) => {
                    if fp < 0.0 {
                        verts.push(p);
                        sides.push(l);
                        verts.push(cut());
                        sides.push(label);
                    } else {
                        verts.push(p);
                        sides.push(label);
                    }
                }
                (false, true) => {
                    if fq < 0.0 {
                        verts.push(cut());
                        sides.push(l);
                    }
                }
                (false, false) => {}
            }
        }
        self.verts = verts;
        self.sides = sides;
    }

    /// Keep the points at least as close to `site` as to `other`.
    pub fn clip_bisector(&mut self, site: Vec2, other: Vec2, label: Side) {
        self.clip(other - site, site.midpoint(other), label);
    }

    pub fn area(&self) -> f64 {
        let n = self.verts.len();
        (0..n).map(|i| self.verts[i].cross(self.verts[(i + 1) % n])).sum::<f64>() / 2.0
    }

    /// Closed-polygon membership for a convex counter-clockwise polygon.
    pub fn contains(&self, p: Vec2) -> bool {
        if self.is_empty() {
            return false;
        }
        (0..self.verts.len()).all(|i| {
            let (a, b) = self.edge(i);
            (b - a).cross(p - a) >= 0.0
        })
    }

    pub fn dist_to_point(&self, p: Vec2) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        (0..self.verts.len()).map(|i| {
            let (a, b) = self.edge(i);
            seg_point_dist(a, b, p)
        })
        .fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance between the polygon and a rectangle (both closed).
    pub fn dist_to_rect(&self, r: &Rect) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        if self.verts.iter().any(|&v| r.contains(v)) {
            return 0.0;
        }
        let rp = Polygon::from_rect(*r);
        if rp.verts.iter().any(|&c| self.contains(c)) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for i in 0..self.verts.len() {
            let (a, b) = self.edge(i);
            for k in 0..4 {
                let (c, d) = rp.edge(k);
                best = best.min(seg_seg_dist(a, b, c, d));
            }
        }
        best
    }

    /// Largest distance from `q` to a point of the polygon (attained at a vertex).
    pub fn max_dist(&self, q: Vec2) -> f64 {
        self.verts.iter().map(|v| v.dist(q)).fold(0.0, f64::max)
    }
}

pub fn seg_point_dist(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    let ab = b - a;
    let l2 = ab.norm2();
    if l2 == 0.0 {
        return a.dist(p);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    (a + ab * t).dist(p)
}

pub fn seg_seg_dist(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    seg_point_dist(a, b, c)
        .min(seg_point_dist(a, b, d))
        .min(seg_point_dist(c, d, a))
        .min(seg_point_dist(c, d, b))
}

fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
}

/// Distance from a segment to a closed rectangle.
pub fn seg_rect_dist(a: Vec2, b: Vec2, r: &Rect) -> f64 {
    if r.contains(a) || r.contains(b) {
        return 0.0;
    }
    let rp = Polygon::from_rect(*r);
    (0..4).map(|k| {
        let (c, d) = rp.edge(k);
        seg_seg_dist(a, b, c, d)
    })
    .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_cell_from_bisectors() {
        let mut p = Polygon::from_rect(Rect::new(Vec2::new(-5.0, -5.0), Vec2::new(5.0, 5.0)));
        let o = Vec2::ZERO;
        for (k, q) in [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)].iter().enumerate() {
            p.clip_bisector(o, Vec2::new(q.0, q.1), Side::Neighbor(k as u32));
        }
        assert_eq!(p.len(), 4);
        assert!((p.area() - 1.0).abs() < 1e-12);
        assert!(p.sides.iter().all(|s| matches!(s, Side::Neighbor(_))));
        assert!((p.max_dist(o) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distances() {
        let mut p = Polygon::from_rect(Rect::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)));
        p.clip(Vec2::new(1.0, 1.0), Vec2::new(0.5, 0.5), Side::Neighbor(9));
        assert_eq!(p.len(), 3);
        let r = Rect::new(Vec2::new(2.0, 0.0), Vec2::new(3.0, 1.0));
        assert!((p.dist_to_rect(&r) - 1.0).abs() < 1e-12);
        assert!((p.dist_to_point(Vec2::new(1.0, 1.0)) - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(seg_rect_dist(Vec2::new(-1.0, 0.5), Vec2::new(5.0, 0.5), &r), 0.0);
    }
}

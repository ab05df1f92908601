use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::point::{Rect, Vec2};

/// Static bucket grid over a set of planar points.
#[derive(Clone, Debug)]
pub struct GridIndex {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    start: Vec<u32>,
    items: Vec<u32>,
    pts: Vec<Vec2>,
}

impl GridIndex {
    /// `target` is the mean number of points per bucket.
    pub fn new(pts: Vec<Vec2>, target: f64) -> Self {
        let (mut lo, mut hi) = (Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0));
        if let Some(&p0) = pts.first() {
            lo = p0;
            hi = p0;
            for p in &pts {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        let w = (hi.x - lo.x).max(1e-12);
        let h = (hi.y - lo.y).max(1e-12);
        let n = pts.len().max(1) as f64;
        let mut cell = (w * h * target.max(0.5) / n).sqrt();
        if !(cell > 0.0) || !cell.is_finite() {
            cell = w.max(h);
        }
        let nx = ((w / cell).floor() as usize + 1).min(4096);
        let ny = ((h / cell).floor() as usize + 1).min(4096);
        let cell = cell.max(w / nx as f64).max(h / ny as f64) * (1.0 + 1e-12);
        let mut counts = vec![0u32; nx * ny + 1];
        let key = |p: Vec2| {
            let i = (((p.x - lo.x) / cell) as usize).min(nx - 1);
            let j = (((p.y - lo.y) / cell) as usize).min(ny - 1);
            j * nx + i
        };
        for &p in &pts {
            counts[key(p) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; pts.len()];
        for (idx, &p) in pts.iter().enumerate() {
            let k = key(p);
            items[fill[k] as usize] = idx as u32;
            fill[k] += 1;
        }
        GridIndex { origin: lo, cell, nx, ny, start: counts, items, pts }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn point(&self, i: u32) -> Vec2 {
        self.pts[i as usize]
    }

    fn bucket_range(&self, lo: f64, hi: f64, origin: f64, n: usize) -> Option<(usize, usize)> {
        let a = ((lo - origin) / self.cell).floor();
        let b = ((hi - origin) / self.cell).floor();
        if b < 0.0 || a > (n - 1) as f64 {
            return None;
        }
        Some((a.max(0.0) as usize, (b as usize).min(n - 1)))
    }

    /// Calls `f` for every point inside the closed rectangle.
    pub fn for_each_in_rect(&self, r: &Rect, mut f: impl FnMut(u32, Vec2)) {
        let Some((i0, i1)) = self.bucket_range(r.lo.x, r.hi.x, self.origin.x, self.nx) else { return };
        let Some((j0, j1)) = self.bucket_range(r.lo.y, r.hi.y, self.origin.y, self.ny) else { return };
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * self.nx + i;
                for &idx in &self.items[self.start[k] as usize..self.start[k + 1] as usize] {
                    let p = self.pts[idx as usize];
                    if r.contains(p) {
                        f(idx, p);
                    }
                }
            }
        }
    }

    /// Points with `|p - q| <= r`.
    pub fn within(&self, q: Vec2, r: f64) -> Vec<u32> {
        let mut out = Vec::new();
        let rect = Rect::new(q - Vec2::new(r, r), q + Vec2::new(r, r));
        self.for_each_in_rect(&rect, |i, p| {
            if p.dist(q) <= r {
                out.push(i);
            }
        });
        out.sort_unstable();
        out
    }

    /// Nearest point to `q`, ties broken by the smaller index.
    pub fn nearest(&self, q: Vec2) -> Option<u32> {
        if self.pts.is_empty() {
            return None;
        }
        let mut best: Option<(f64, u32)> = None;
        let mut ring = 0usize;
        let ci = (((q.x - self.origin.x) / self.cell).floor() as i64).clamp(0, self.nx as i64 - 1);
        let cj = (((q.y - self.origin.y) / self.cell).floor() as i64).clamp(0, self.ny as i64 - 1);
        let max_ring = self.nx.max(self.ny);
        loop {
            let r = ring as i64;
            for j in (cj - r)..=(cj + r) {
                for i in (ci - r)..=(ci + r) {
                    if (j - cj).abs() != r && (i - ci).abs() != r {
                        continue;
                    }
                    if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                        continue;
                    }
                    let k = j as usize * self.nx + i as usize;
                    for &idx in &self.items[self.start[k] as usize..self.start[k + 1] as usize] {
                        let d = self.pts[idx as usize].dist(q);
                        if best.map_or(true, |(bd, bi)| d < bd || (d == bd && idx < bi)) {
                            best = Some((d, idx));
                        }
                    }
                }
            }
            if let Some((bd, _)) = best {
                // Everything outside the scanned rings is farther than the
                // distance from q to the ring boundary.
                let reach = self.ring_clearance(q, ci, cj, ring);
                if bd < reach || ring >= max_ring {
                    return best.map(|b| b.1);
                }
            } else if ring >= max_ring {
                return None;
            }
            ring += 1;
        }
    }

    fn ring_clearance(&self, q: Vec2, ci: i64, cj: i64, ring: usize) -> f64 {
        let r = ring as f64;
        let x0 = self.origin.x + (ci as f64 - r) * self.cell;
        let x1 = self.origin.x + (ci as f64 + r + 1.0) * self.cell;
        let y0 = self.origin.y + (cj as f64 - r) * self.cell;
        let y1 = self.origin.y + (cj as f64 + r + 1.0) * self.cell;
        (q.x - x0).min(x1 - q.x).min(q.y - y0).min(y1 - q.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_matches_scan() {
        let mut s = 12345u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let pts: Vec<Vec2> = (0..500).map(|_| Vec2::new(next() * 20.0, next() * 5.0)).collect();
        let g = GridIndex::new(pts.clone(), 2.0);
        for _ in 0..300 {
            let q = Vec2::new(next() * 30.0 - 5.0, next() * 15.0 - 5.0);
            let brute = (0..pts.len())
                .min_by(|&a, &b| pts[a].dist(q).total_cmp(&pts[b].dist(q)).then(a.cmp(&b)))
                .unwrap();
            assert_eq!(g.nearest(q), Some(brute as u32));
            let r = next() * 3.0;
            let w: Vec<u32> = (0..pts.len() as u32).filter(|&i| pts[i as usize].dist(q) <= r).collect();
            assert_eq!(g.within(q, r), w);
        }
    }
}

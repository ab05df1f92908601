//! Deterministic geometry checks: boxes inside balls through the origin,
//! the square-lattice degree, and Delaunay adjacency against an independent
//! half-plane oracle.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;
use rand::Rng;

use crate::geom::{cube_in_ball_witness, AxisBox, Ball, DelaunayComplex, Point, PointConfiguration, Vec2};
use crate::rng::RngStream;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelftestCheck {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
}

impl SelftestCheck {
    pub fn pass(&self) -> bool {
        self.cases > 0 && self.passed == self.cases
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<SelftestCheck>,
}

impl SelftestReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(SelftestCheck::pass)
    }
}

/// Runs the suite with the default case counts.
pub fn run_selftest(seed: u64) -> Result<SelftestReport> {
    let mut checks = Vec::new();
    for d in 1..=3 {
        checks.push(cube_witness_check(seed, d, 1000)?);
    }
    checks.push(lattice_degree_check(10)?);
    checks.push(duality_check(seed, 200, 20)?);
    Ok(SelftestReport { seed, checks })
}

/// Random balls through the origin with radius in `[3ℓd², 10ℓd²]`; every one
/// must contain some `K_ℓ(z)`, `z ∈ I`.
pub fn cube_witness_check(seed: u64, d: usize, cases: usize) -> Result<SelftestCheck> {
    let mut rng = RngStream::new(seed, d as u64, "selftest-cube").rng();
    let mut passed = 0;
    for _ in 0..cases {
        let ell = 0.1 + 4.9 * rng.random::<f64>();
        let r = 3.0 * ell * (d * d) as f64 * (1.0 + 2.0 * rng.random::<f64>()) * (1.0 + 1e-9);
        let dir = loop {
            let v: Vec<f64> = (0..d).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n > 1e-3 && n <= 1.0 {
                break v.into_iter().map(|c| c / n).collect::<Vec<_>>();
            }
        };
        let ball = Ball::new(Point::new(dir.iter().map(|c| c * r).collect())?, r, true)?;
        if cube_in_ball_witness(&ball, ell, d)?.is_some() {
            passed += 1;
        }
    }
    Ok(SelftestCheck { name: alloc::format!("cube-witness-d{d}"), cases, passed })
}

/// `Z²` restricted to `[-n, n]²`: every interior-valid point has degree 4
/// (the cocircular diagonals have zero-length faces).
pub fn lattice_degree_check(n: i64) -> Result<SelftestCheck> {
    let mut pts = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            pts.push(Vec2::new(i as f64, j as f64));
        }
    }
    let w = AxisBox::centered(2, n as f64 + 0.5)?;
    let cx = DelaunayComplex::new(PointConfiguration::from_planar(w, &pts)?)?;
    let mut cases = 0;
    let mut passed = 0;
    for v in 0..cx.len() as u32 {
        if cx.is_interior_valid(v) {
            cases += 1;
            if cx.degree(v) == 4 {
                passed += 1;
            }
        }
    }
    Ok(SelftestCheck { name: "lattice-degree".into(), cases, passed })
}

/// Random configurations of 3 to `max_points` points: the complex's
/// adjacency equals [`oracle_adjacent`] on every pair.
pub fn duality_check(seed: u64, cases: usize, max_points: usize) -> Result<SelftestCheck> {
    let w = AxisBox::centered(2, 1.0)?;
    let mut passed = 0;
    for k in 0..cases {
        let mut rng = RngStream::new(seed, k as u64, "selftest-duality").rng();
        let n = rng.random_range(3..=max_points.max(3));
        let pts: Vec<Vec2> = (0..n).map(|_| Vec2::new(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0)).collect();
        let cx = DelaunayComplex::new(PointConfiguration::from_planar(w.clone(), &pts)?)?;
        let eps = cx.eps_face();
        let ok = (0..n).all(|i| {
            (i + 1..n).all(|j| cx.are_adjacent(i as u32, j as u32) == oracle_adjacent(&pts, i, j, eps))
        });
        if ok {
            passed += 1;
        }
    }
    Ok(SelftestCheck { name: "delaunay-duality".into(), cases, passed })
}

/// Length of the common face of the Voronoi cells of `pts[i]` and `pts[j]`
/// exceeds `eps`, found by clipping their bisector with every other
/// half-plane `{y : |y − pᵢ| ≤ |y − pₖ|}`.
pub fn oracle_adjacent(pts: &[Vec2], i: usize, j: usize, eps: f64) -> bool {
    let (a, b) = (pts[i], pts[j]);
    let m = a.midpoint(b);
    let dir = (b - a).perp();
    let len = dir.norm();
    let dir = Vec2::new(dir.x / len, dir.y / len);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (k, &c) in pts.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        // |y−a|² ≤ |y−c|²  ⇔  2 y·(c − a) ≤ |c|² − |a|², with y = m + s·dir
        let g = c - a;
        let lhs = 2.0 * g.dot(dir);
        let rhs = c.norm2() - a.norm2() - 2.0 * g.dot(m);
        if lhs.abs() < 1e-300 {
            if rhs < 0.0 {
                return false;
            }
        } else if lhs > 0.0 {
            hi = hi.min(rhs / lhs);
        } else {
            lo = lo.max(rhs / lhs);
        }
    }
    hi - lo > eps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_on_plus_shape() {
        let pts = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(0.0, -1.0)];
        for j in 1..5 {
            assert!(oracle_adjacent(&pts, 0, j, 1e-9));
        }
        // the centre cell separates opposite arms
        assert!(!oracle_adjacent(&pts, 1, 2, 1e-9));
        // (1,0) and (0,1) share an unbounded face
        assert!(oracle_adjacent(&pts, 1, 3, 1e-9));
    }

    #[test]
    fn suite_passes() {
        let rep = run_selftest(2024).unwrap();
        for c in &rep.checks {
            assert!(c.pass(), "{c:?}");
        }
    }
}

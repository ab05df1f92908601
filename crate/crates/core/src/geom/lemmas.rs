//! Deterministic lattice-box statements: orthant occupation, boxes inside
//! balls through the origin, and the bound on the fundamental region.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::complex::DelaunayComplex;
use super::config::PointConfiguration;
use super::point::{norm, AxisBox, Ball, Rect, Vec2};
use crate::{Error, Result};

/// Calls `f` on every integer vector in `[-r, r]^d`, lexicographically.
pub fn for_each_lattice_point(d: usize, r: i64, mut f: impl FnMut(&[i64])) {
    let mut z = vec![-r; d];
    loop {
        f(&z);
        let mut k = d;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if z[k] < r {
                z[k] += 1;
                break;
            }
            z[k] = -r;
        }
    }
}

/// `I = {z ∈ Z^d : |z|_∞ = d}` in lexicographic order.
pub fn index_set(d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let r = d as i64;
    for_each_lattice_point(d, r, |z| {
        if z.iter().map(|c| c.abs()).max() == Some(r) {
            out.push(z.to_vec());
        }
    });
    out
}

/// True iff for every lattice point `x` with `|x|_∞ <= range` inside the
/// window, each open orthant `x + Q_σ` holds a point of the configuration.
pub fn orthant_criterion(config: &PointConfiguration, range: u32) -> bool {
    let d = config.dim();
    if d > 16 {
        return false;
    }
    let orthants = 1u32 << d;
    let mut ok = true;
    for_each_lattice_point(d, range as i64, |x| {
        if !ok {
            return;
        }
        let xf: Vec<f64> = x.iter().map(|&c| c as f64).collect();
        if !config.window().contains(&xf) {
            return;
        }
        let mut seen = vec![false; 1usize << d];
        let mut hits = 0u32;
        for p in config.points() {
            let mut mask = 0usize;
            let mut open = true;
            for k in 0..d {
                let s = p[k] - xf[k];
                if s == 0.0 {
                    open = false;
                    break;
                }
                if s > 0.0 {
                    mask |= 1 << k;
                }
            }
            if open && !seen[mask] {
                seen[mask] = true;
                hits += 1;
                if hits == orthants {
                    break;
                }
            }
        }
        ok = hits == orthants;
    });
    ok
}

/// Closed box strictly inside the open ball.
fn box_in_open_ball(b: &AxisBox, ball: &Ball) -> bool {
    let c = ball.center.coords();
    let far2: f64 = (0..b.dim())
        .map(|i| {
            let e = (b.lo(i) - c[i]).abs().max((b.hi(i) - c[i]).abs());
            e * e
        })
        .sum();
    far2 < ball.radius * ball.radius
}

/// Searches `I` for `z` with `K_ℓ(z)` strictly inside `ball`, whose boundary
/// must pass through the origin. A witness always exists once the radius
/// reaches `3ℓd²`.
pub fn cube_in_ball_witness(ball: &Ball, ell: f64, d: usize) -> Result<Option<Vec<i64>>> {
    if ball.center.dim() != d {
        return Err(Error::InvalidInput(format!(
            "ball of dimension {} for d = {d}",
            ball.center.dim()
        )));
    }
    if !(ell > 0.0) {
        return Err(Error::InvalidInput(format!("box side must be positive, got {ell}")));
    }
    let c = norm(ball.center.coords());
    if (c - ball.radius).abs() > 1e-9 * ball.radius.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "origin is not on the ball boundary (|center| = {c}, radius = {})",
            ball.radius
        )));
    }
    for z in index_set(d) {
        let b = AxisBox::lattice_cell(&z, ell)?;
        if box_in_open_ball(&b, ball) {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

/// Every `K_ℓ(z) + x`, `z ∈ I`, holds a point of the complex.
pub fn boxes_occupied(complex: &DelaunayComplex, v: u32, ell: f64) -> bool {
    let x = complex.point(v);
    let idx = complex.point_index();
    index_set(2).iter().all(|z| {
        let c = Vec2::new(x.x + z[0] as f64 * ell, x.y + z[1] as f64 * ell);
        let h = Vec2::new(ell / 2.0, ell / 2.0);
        let r = Rect::new(c - h, c + h);
        let mut any = false;
        idx.for_each_in_rect(&r, |_, _| any = true);
        any
    })
}

/// When every box `K_ℓ(z)` around `v` is occupied, returns whether the
/// fundamental region of `v` lies inside `B_{6ℓd²}(v)` (always expected);
/// `None` when the hypothesis fails or the cell is unbounded.
pub fn star_bound_check(complex: &DelaunayComplex, v: u32, ell: f64) -> Option<bool> {
    if complex.is_hull(v) || !boxes_occupied(complex, v, ell) {
        return None;
    }
    let bound = 6.0 * ell * 4.0;
    let p = complex.point(v);
    Some(complex.cell_vertices(v).iter().all(|c| 2.0 * c.dist(p) <= bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    #[test]
    fn index_set_sizes() {
        assert_eq!(index_set(1), vec![vec![-1], vec![1]]);
        assert_eq!(index_set(2).len(), 16);
        assert_eq!(index_set(3).len(), 7 * 7 * 7 - 5 * 5 * 5);
    }

    #[test]
    fn witness_examples() {
        let ball = Ball::new(Point::new(vec![3.0]).unwrap(), 3.0, true).unwrap();
        assert_eq!(cube_in_ball_witness(&ball, 1.0, 1).unwrap(), Some(vec![1]));
        let ball = Ball::new(Point::new(vec![12.0, 0.0]).unwrap(), 12.0, true).unwrap();
        let z = cube_in_ball_witness(&ball, 1.0, 2).unwrap().unwrap();
        assert_eq!(z.iter().map(|c| c.abs()).max(), Some(2));
        let off = Ball::new(Point::new(vec![5.0, 0.0]).unwrap(), 3.0, true).unwrap();
        assert!(cube_in_ball_witness(&off, 1.0, 2).is_err());
    }

    #[test]
    fn shifted_lattice_orthants() {
        let mut c = Vec::new();
        for i in -6..6 {
            for j in -6..6 {
                c.push(i as f64 + 0.5);
                c.push(j as f64 + 0.5);
            }
        }
        let cfg = PointConfiguration::from_flat(AxisBox::centered(2, 6.0).unwrap(), c).unwrap();
        assert!(orthant_criterion(&cfg, 3));
        let empty = PointConfiguration::empty(AxisBox::centered(2, 6.0).unwrap());
        assert!(!orthant_criterion(&empty, 3));
    }
}

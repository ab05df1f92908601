use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Plain 2-D vector used by the planar geometry code.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn midpoint(self, o: Vec2) -> Vec2 {
        Vec2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A point of `R^d` with finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("a point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(Point { coords })
    }

    pub fn origin(dim: usize) -> Self {
        Point { coords: alloc::vec![0.0; dim.max(1)] }
    }

    pub fn xy(x: f64, y: f64) -> Result<Self> {
        Point::new(alloc::vec![x, y])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn to_vec2(&self) -> Option<Vec2> {
        match self.coords[..] {
            [x, y] => Some(Vec2::new(x, y)),
            _ => None,
        }
    }
}

impl From<Vec2> for Point {
    fn from(v: Vec2) -> Self {
        Point { coords: alloc::vec![v.x, v.y] }
    }
}

pub(crate) fn norm(c: &[f64]) -> f64 {
    c.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Axis-aligned cube `center + [-h, h]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisBox {
    center: Vec<f64>,
    half_side: f64,
}

impl AxisBox {
    pub fn new(center: Vec<f64>, half_side: f64) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("bad box center {center:?}")));
        }
        if !(half_side > 0.0) || !half_side.is_finite() {
            return Err(Error::InvalidInput(format!("box half-side must be positive, got {half_side}")));
        }
        Ok(AxisBox { center, half_side })
    }

    /// `Λ_r = [-r, r]^d`.
    pub fn centered(dim: usize, half_side: f64) -> Result<Self> {
        AxisBox::new(alloc::vec![0.0; dim.max(1)], half_side)
    }

    /// `K_ℓ(z) = zℓ + [-ℓ/2, ℓ/2]^d`.
    pub fn lattice_cell(z: &[i64], ell: f64) -> Result<Self> {
        AxisBox::new(z.iter().map(|&k| k as f64 * ell).collect(), ell / 2.0)
    }

    /// `C_x = xR + [0, R]^d`.
    pub fn coarse_box(x: &[i64], side: f64) -> Result<Self> {
        AxisBox::new(x.iter().map(|&k| (k as f64 + 0.5) * side).collect(), side / 2.0)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn half_side(&self) -> f64 {
        self.half_side
    }

    pub fn side(&self) -> f64 {
        2.0 * self.half_side
    }

    pub fn lo(&self, i: usize) -> f64 {
        self.center[i] - self.half_side
    }

    pub fn hi(&self, i: usize) -> f64 {
        self.center[i] + self.half_side
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.dim() as i32)
    }

    /// Closed-box membership.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter().enumerate().all(|(i, &x)| x >= self.lo(i) && x <= self.hi(i))
    }

    pub fn contains_strictly(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter().enumerate().all(|(i, &x)| x > self.lo(i) && x < self.hi(i))
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        other.dim() == self.dim()
            && (0..self.dim()).all(|i| other.lo(i) >= self.lo(i) && other.hi(i) <= self.hi(i))
    }

    /// Closed ball inside the closed box.
    pub fn contains_ball(&self, center: &[f64], radius: f64) -> bool {
        center.len() == self.dim()
            && center
                .iter()
                .enumerate()
                .all(|(i, &c)| c - radius >= self.lo(i) && c + radius <= self.hi(i))
    }

    /// Euclidean distance from `p` to the box (zero inside).
    pub fn dist(&self, p: &[f64]) -> f64 {
        p.iter()
            .enumerate()
            .map(|(i, &x)| {
                let e = (self.lo(i) - x).max(x - self.hi(i)).max(0.0);
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn expanded(&self, by: f64) -> Result<AxisBox> {
        AxisBox::new(self.center.clone(), self.half_side + by)
    }

    pub fn translated(&self, shift: &[f64]) -> AxisBox {
        AxisBox {
            center: self.center.iter().zip(shift).map(|(c, s)| c + s).collect(),
            half_side: self.half_side,
        }
    }

    pub(crate) fn rect(&self) -> Rect {
        Rect::new(Vec2::new(self.lo(0), self.lo(1)), Vec2::new(self.hi(0), self.hi(1)))
    }
}

/// Planar axis-aligned rectangle; used internally for clipping and index
/// queries where the two sides may differ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub lo: Vec2,
    pub hi: Vec2,
}

impl Rect {
    pub fn new(lo: Vec2, hi: Vec2) -> Self {
        Rect { lo, hi }
    }

    pub fn expanded(self, by: f64) -> Rect {
        Rect::new(self.lo - Vec2::new(by, by), self.hi + Vec2::new(by, by))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }

    pub fn contains_strictly(&self, p: Vec2) -> bool {
        p.x > self.lo.x && p.x < self.hi.x && p.y > self.lo.y && p.y < self.hi.y
    }

    pub fn dist(&self, p: Vec2) -> f64 {
        let dx = (self.lo.x - p.x).max(p.x - self.hi.x).max(0.0);
        let dy = (self.lo.y - p.y).max(p.y - self.hi.y).max(0.0);
        (dx * dx + dy * dy).sqrt()
    }

    /// Corners in counter-clockwise order starting at `lo`.
    pub fn corners(&self) -> [Vec2; 4] {
        [
            self.lo,
            Vec2::new(self.hi.x, self.lo.y),
            self.hi,
            Vec2::new(self.lo.x, self.hi.y),
        ]
    }

    pub fn center(&self) -> Vec2 {
        self.lo.midpoint(self.hi)
    }
}

/// Closed (or open) Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    pub closed: bool,
}

impl Ball {
    pub fn new(center: Point, radius: f64, closed: bool) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("ball radius must be >= 0, got {radius}")));
        }
        Ok(Ball { center, radius, closed })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let d = dist(self.center.coords(), p);
        if self.closed {
            d <= self.radius
        } else {
            d < self.radius
        }
    }

    /// The whole box lies in the open ball: its farthest corner is closer
    /// than the radius.
    pub fn interior_contains_box(&self, b: &AxisBox) -> bool {
        let c = self.center.coords();
        let far2: f64 = (0..b.dim())
            .map(|i| {
                let e = (b.lo(i) - c[i]).abs().max((b.hi(i) - c[i]).abs());
                e * e
            })
            .sum();
        far2.sqrt() < self.radius
    }
}

/// `B_r(A) = {x : dist(x, A) < r}` for a box `A`: a box with rounded corners.
#[derive(Clone, Debug, PartialEq)]
pub struct ThickenedSet {
    pub core: AxisBox,
    pub thickness: f64,
}

impl ThickenedSet {
    pub fn new(core: AxisBox, thickness: f64) -> Result<Self> {
        if !(thickness > 0.0) {
            return Err(Error::InvalidInput(format!("thickness must be positive, got {thickness}")));
        }
        Ok(ThickenedSet { core, thickness })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.core.dist(p) < self.thickness
    }

    pub fn closure_contains(&self, p: &[f64]) -> bool {
        self.core.dist(p) <= self.thickness
    }

    /// Smallest axis box containing the set.
    pub fn bounding_box(&self) -> AxisBox {
        AxisBox {
            center: self.core.center.clone(),
            half_side: self.core.half_side + self.thickness,
        }
    }
}

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::point::{AxisBox, Point, Vec2};
use crate::{Error, Result};

/// A finite simple point set inside a sampling window.
///
/// Coordinates are stored flat, `dim` values per point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfiguration {
    dim: usize,
    window: AxisBox,
    coords: Vec<f64>,
}

impl PointConfiguration {
    pub fn new(window: AxisBox, points: &[Point]) -> Result<Self> {
        let dim = window.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.dim() != dim {
                return Err(Error::InvalidConfiguration(format!(
                    "point of dimension {} in a {dim}-dimensional window",
                    p.dim()
                )));
            }
            coords.extend_from_slice(p.coords());
        }
        Self::from_flat(window, coords)
    }

    /// Validating constructor from flat coordinates.
    pub fn from_flat(window: AxisBox, coords: Vec<f64>) -> Result<Self> {
        let cfg = Self::from_flat_unchecked(window, coords)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Skips the distinctness and window checks; samplers use this when the
    /// construction already guarantees both (up to probability zero events,
    /// which `validate` can still catch).
    pub(crate) fn from_flat_unchecked(window: AxisBox, coords: Vec<f64>) -> Result<Self> {
        let dim = window.dim();
        if coords.len() % dim != 0 {
            return Err(Error::InvalidConfiguration(format!(
                "{} coordinates do not split into {dim}-dimensional points",
                coords.len()
            )));
        }
        Ok(PointConfiguration { dim, window, coords })
    }

    pub fn from_planar(window: AxisBox, pts: &[Vec2]) -> Result<Self> {
        if window.dim() != 2 {
            return Err(Error::UnsupportedDimension(window.dim()));
        }
        Self::from_flat(window, pts.iter().flat_map(|p| [p.x, p.y]).collect())
    }

    pub fn empty(window: AxisBox) -> Self {
        PointConfiguration { dim: window.dim(), window, coords: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..self.len() {
            let p = self.point(i);
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidConfiguration(format!("point {i} has a non-finite coordinate")));
            }
            if !self.window.contains(p) {
                return Err(Error::InvalidConfiguration(format!("point {i} {p:?} lies outside the window")));
            }
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_unstable_by(|&a, &b| self.cmp_points(a, b));
        for w in order.windows(2) {
            if self.point(w[0]) == self.point(w[1]) {
                return Err(Error::InvalidConfiguration(format!(
                    "duplicate point {:?} (indices {} and {})",
                    self.point(w[0]),
                    w[0].min(w[1]),
                    w[0].max(w[1])
                )));
            }
        }
        Ok(())
    }

    fn cmp_points(&self, a: usize, b: usize) -> Ordering {
        let (pa, pb) = (self.point(a), self.point(b));
        for k in 0..self.dim {
            match pa[k].total_cmp(&pb[k]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window(&self) -> &AxisBox {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Planar view of point `i`; only meaningful when `dim == 2`.
    #[inline]
    pub fn planar(&self, i: usize) -> Vec2 {
        Vec2::new(self.coords[2 * i], self.coords[2 * i + 1])
    }

    pub fn planar_points(&self) -> Vec<Vec2> {
        (0..self.len()).map(|i| self.planar(i)).collect()
    }

    /// Number of points in the closed box.
    pub fn count_in(&self, b: &AxisBox) -> usize {
        self.points().filter(|p| b.contains(p)).count()
    }

    /// Index of the point equal to `p`, if any.
    pub fn find(&self, p: &[f64]) -> Option<usize> {
        self.points().position(|q| q == p)
    }

    /// `τ_v ξ = ξ − v`, with the window shifted alongside.
    pub fn shifted(&self, v: &[f64]) -> PointConfiguration {
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(v).map(|(a, b)| a - b).collect::<Vec<_>>())
            .collect();
        PointConfiguration { dim: self.dim, window: self.window.translated(&neg), coords }
    }

    /// Keep the points satisfying `keep`, preserving order.
    pub fn filtered(&self, mut keep: impl FnMut(&[f64]) -> bool) -> PointConfiguration {
        let coords = self.points().filter(|p| keep(p)).flatten().copied().collect();
        PointConfiguration { dim: self.dim, window: self.window.clone(), coords }
    }

    /// Adds `p` unless it is already present; returns its index.
    pub fn with_point(&self, p: &[f64]) -> Result<(PointConfiguration, usize)> {
        if p.len() != self.dim || !self.window.contains(p) {
            return Err(Error::InvalidConfiguration(format!("cannot adjoin {p:?}")));
        }
        if let Some(i) = self.find(p) {
            return Ok((self.clone(), i));
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(p);
        let n = self.len();
        Ok((PointConfiguration { dim: self.dim, window: self.window.clone(), coords }, n))
    }

    pub fn with_window(&self, window: AxisBox) -> Result<PointConfiguration> {
        if window.dim() != self.dim {
            return Err(Error::InvalidConfiguration("window dimension mismatch".into()));
        }
        let cfg = PointConfiguration { dim: self.dim, window, coords: self.coords.clone() };
        if let Some(i) = (0..cfg.len()).find(|&i| !cfg.window.contains(cfg.point(i))) {
            return Err(Error::InvalidConfiguration(format!("point {i} lies outside the new window")));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn win() -> AxisBox {
        AxisBox::centered(2, 2.0).unwrap()
    }

    #[test]
    fn rejects_duplicates_and_outside() {
        let e = PointConfiguration::from_flat(win(), vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(e, Err(Error::InvalidConfiguration(_))));
        let e = PointConfiguration::from_flat(win(), vec![3.0, 0.0]);
        assert!(matches!(e, Err(Error::InvalidConfiguration(_))));
        assert!(PointConfiguration::from_flat(win(), vec![2.0, -2.0, 0.5, 0.5]).is_ok());
    }

    #[test]
    fn shift_moves_points_and_window() {
        let c = PointConfiguration::from_flat(win(), vec![1.0, 1.0, -1.0, 0.5]).unwrap();
        let s = c.shifted(&[1.0, 1.0]);
        assert_eq!(s.point(0), &[0.0, 0.0]);
        assert_eq!(s.window().center(), &[-1.0, -1.0]);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn adjoin_is_idempotent() {
        let c = PointConfiguration::from_flat(win(), vec![1.0, 1.0]).unwrap();
        let (c2, i) = c.with_point(&[0.0, 0.0]).unwrap();
        assert_eq!((c2.len(), i), (2, 1));
        let (c3, j) = c2.with_point(&[0.0, 0.0]).unwrap();
        assert_eq!((c3.len(), j), (2, 1));
    }
}

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::bonds::{diameter, BondConfiguration, DisjointSets};
use super::zd::{lattice_core, LatticeField, PercolationGeometry};
use crate::geom::{seg_rect_dist, AxisBox, Rect, Vec2};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct InclusionReport {
    pub pass: bool,
    /// No open cluster reached the diameter threshold.
    pub vacuous: bool,
    /// Cluster diameter threshold `D`.
    pub threshold: f64,
    /// Clusters at or above the threshold.
    pub clusters: usize,
    /// Boxes a cluster path enters and then leaves by at least `R/4`.
    pub crossed: usize,
    /// Crossed boxes that are closed; each one is a counterexample.
    pub closed_crossed: usize,
    /// Smallest diameter (lattice units) of the open lattice component
    /// holding most of a cluster's crossed boxes.
    pub lattice_diameter: f64,
    /// `D/R − 2`.
    pub required: f64,
}

/// Finite-window form of "an unbounded open cluster gives an unbounded open
/// lattice component". The open-edge graph is restricted to points in the
/// lattice block. For every cluster of diameter `≥ D`, a path between two
/// farthest points is traced through face midpoints, so it stays inside
/// cells except where it crosses open faces. Every box that path enters and
/// later (or earlier) leaves by `R/4` must be open, and the open component
/// holding most of those boxes must have diameter `≥ D/R − 2`.
pub fn inclusion_check(
    geom: &PercolationGeometry<'_>,
    bonds: &BondConfiguration,
    field: &LatticeField,
    threshold: Option<f64>,
) -> Result<InclusionReport> {
    let r = field.side;
    let core = lattice_core(r, field.half)?;
    if !geom.complex().config().window().contains_box(&core.expanded(r / 2.0)?) {
        return Err(Error::LocalityViolation(format!("window does not cover the lattice block at R = {r}")));
    }
    let d = threshold.unwrap_or(core.side() / 2.0);
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("diameter threshold must be positive, got {d}")));
    }
    let cx = geom.complex();
    let n = cx.len();
    let in_core: Vec<bool> = cx.points().iter().map(|&p| core.contains(&[p.x, p.y])).collect();
    let usable = |e: u32| {
        let ed = cx.edge(e);
        bonds.is_open(e) && in_core[ed.a as usize] && in_core[ed.b as usize]
    };
    let mut dsu = DisjointSets::new(n);
    for e in 0..cx.edges().len() as u32 {
        if usable(e) {
            let ed = cx.edge(e);
            dsu.union(ed.a, ed.b);
        }
    }
    let (labels, sizes) = dsu.labels();
    let mut groups: Vec<Vec<u32>> = vec![Vec::new(); sizes.len()];
    for v in 0..n as u32 {
        if in_core[v as usize] && sizes[labels[v as usize] as usize] > 1 {
            groups[labels[v as usize] as usize].push(v);
        }
    }

    let (lat_labels, lat_sizes) = field.components();
    let lat_diam = field.component_diameters();
    let boxes: Vec<([i64; 2], Rect)> =
        field.sites().map(|x| (x, AxisBox::coarse_box(&x, r).expect("positive side").rect())).collect();
    let mut rep = InclusionReport {
        pass: true,
        vacuous: true,
        threshold: d,
        clusters: 0,
        crossed: 0,
        closed_crossed: 0,
        lattice_diameter: f64::INFINITY,
        required: d / r - 2.0,
    };
    for g in groups.iter().filter(|g| !g.is_empty()) {
        let pts: Vec<Vec2> = g.iter().map(|&v| cx.point(v)).collect();
        let (diam, pair) = diameter(&pts);
        if diam < d {
            continue;
        }
        let (i, j) = pair.expect("two points");
        rep.vacuous = false;
        rep.clusters += 1;
        let path = open_path(geom, &usable, g[i], g[j]);
        let crossed: Vec<usize> = boxes
            .iter()
            .enumerate()
            .filter(|(_, (_, b))| {
                path.windows(2).any(|s| seg_rect_dist(s[0], s[1], b) == 0.0) && path.iter().any(|&q| b.dist(q) >= r / 4.0)
            })
            .map(|(k, _)| k)
            .collect();
        rep.crossed += crossed.len();
        let mut tally = vec![0usize; lat_sizes.len()];
        for &k in &crossed {
            if field.eta[k] {
                tally[lat_labels[k] as usize] += 1;
            } else {
                rep.closed_crossed += 1;
            }
        }
        let best = (0..tally.len()).max_by_key(|&c| (tally[c], core::cmp::Reverse(c)));
        let dl = match best {
            Some(c) if tally[c] > 0 => lat_diam[c],
            _ => 0.0,
        };
        rep.lattice_diameter = rep.lattice_diameter.min(dl);
        if dl < rep.required {
            rep.pass = false;
        }
    }
    if rep.closed_crossed > 0 {
        rep.pass = false;
    }
    if rep.vacuous {
        rep.lattice_diameter = f64::NAN;
    }
    Ok(rep)
}

/// Polyline from `a` to `b` along a shortest open path, through the
/// midpoint of each crossed face.
fn open_path(geom: &PercolationGeometry<'_>, usable: &dyn Fn(u32) -> bool, a: u32, b: u32) -> Vec<Vec2> {
    let cx = geom.complex();
    let mut parent: Vec<(u32, u32)> = vec![(u32::MAX, u32::MAX); cx.len()];
    parent[a as usize] = (a, u32::MAX);
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        if v == b {
            break;
        }
        for &(u, e) in cx.neighbor_edges(v) {
            if parent[u as usize].0 == u32::MAX && usable(e) {
                parent[u as usize] = (v, e);
                queue.push_back(u);
            }
        }
    }
    let mut out = vec![cx.point(b)];
    let mut v = b;
    while v != a {
        let (p, e) = parent[v as usize];
        let (s, t) = cx.edge(e).face.truncated(1.0);
        out.push(s.midpoint(t));
        out.push(cx.point(p));
        v = p;
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::DelaunayComplex;
    use crate::percolation::{bond_uniforms, bonds_at, eta_field, lattice_geometry_window};
    use crate::process::{sample, ProcessSpec};
    use crate::rng::RngStream;

    #[test]
    fn closed_bonds_are_vacuous_and_full_bonds_pass() {
        let r = 4.0;
        let w = lattice_geometry_window(r, 3).unwrap();
        let cfg = sample(&ProcessSpec::poisson(1.0), &w, &RngStream::new(3, 0, "t")).unwrap();
        let cx = DelaunayComplex::new(cfg).unwrap();
        let geom = PercolationGeometry::new(&cx);
        let u = bond_uniforms(&cx, &RngStream::new(3, 0, "bonds"));
        let closed = bonds_at(&u, 0.0).unwrap();
        let f = eta_field(&geom, &closed, r, 3).unwrap();
        let rep = inclusion_check(&geom, &closed, &f, None).unwrap();
        assert!(rep.pass && rep.vacuous);
        let open = bonds_at(&u, 1.0).unwrap();
        let f = eta_field(&geom, &open, r, 3).unwrap();
        let rep = inclusion_check(&geom, &open, &f, None).unwrap();
        assert!(rep.pass && !rep.vacuous && rep.crossed > 0, "{rep:?}");
        assert_eq!(rep.closed_crossed, 0);
    }
}

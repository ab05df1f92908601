use alloc::format;
use alloc::vec::Vec;

use super::bonds::{bond_uniforms, bond_uniforms_labeled, bonds_at};
use super::events::quantile;
use super::inclusion::inclusion_check;
use super::zd::{box_open, field_from_sites, lattice_geometry_window, lattice_sites, PercolationGeometry};
use crate::exec::Executor;
use crate::geom::{AxisBox, DelaunayComplex, PointConfiguration, Vec2};
use crate::moments::sample_rep;
use crate::process::ProcessSpec;
use crate::rng::RngStream;
use crate::stats::proportion;
use crate::{Error, Result};

fn check_grid(ps: &[f64], r: f64, replicates: usize) -> Result<()> {
    if ps.is_empty() || ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidParameter(format!("p grid must be nonempty within [0, 1], got {ps:?}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("box side must be positive, got {r}")));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    Ok(())
}

/// The lattice process and the inclusion check at one `(p, R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZdRow {
    pub p: f64,
    pub r: f64,
    pub lattice_half: i64,
    pub replicates: usize,
    pub seed: u64,
    pub inclusion_pass: usize,
    pub inclusion_vacuous: usize,
    /// Closed boxes crossed by large open clusters, summed over replicates.
    pub closed_crossed: usize,
    pub eta_open: f64,
    pub eta_open_se: f64,
    pub eta_spanning: f64,
    pub eta_largest_mean: f64,
    pub eta_largest_q90: f64,
    /// Sites whose empty-ball decision was within `R/512`.
    pub ambiguous_sites: usize,
}

/// `η` over the block `|x|_∞ ≤ half` and the inclusion check, for every `p`
/// on the same samples and bond uniforms.
pub fn zd_study<E: Executor>(
    spec: &ProcessSpec,
    ps: &[f64],
    r: f64,
    half: i64,
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<ZdRow>> {
    spec.validate()?;
    check_grid(ps, r, replicates)?;
    let window = lattice_geometry_window(r, half)?;
    // (pass, vacuous, closed_crossed, open sites, spans, largest) per p
    type Rep = (Vec<(bool, bool, usize, usize, bool, usize)>, usize);
    let reps = exec.map(replicates, |k| -> Result<Rep> {
        let cfg = sample_rep(spec, &window, seed, k, "zd")?;
        let cx = DelaunayComplex::new(cfg)?;
        let geom = PercolationGeometry::new(&cx);
        let sites = lattice_sites(&geom, r, half)?;
        let u = bond_uniforms(&cx, &RngStream::new(seed, k as u64, "bonds"));
        let mut out = Vec::with_capacity(ps.len());
        for &p in ps {
            let bonds = bonds_at(&u, p)?;
            let field = field_from_sites(&sites, &bonds, r, half);
            let inc = inclusion_check(&geom, &bonds, &field, None)?;
            let (_, sizes) = field.components();
            out.push((inc.pass, inc.vacuous, inc.closed_crossed, field.open_count(), field.spans(), sizes.into_iter().max().unwrap_or(0)));
        }
        Ok((out, sites.iter().filter(|s| s.ambiguous).count()))
    });
    let reps: Vec<Rep> = reps.into_iter().collect::<Result<_>>()?;
    let width = (2 * half + 1) as usize;
    let total_sites = replicates * width * width;
    let ambiguous_sites = reps.iter().map(|r| r.1).sum();
    Ok(ps
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let col: Vec<_> = reps.iter().map(|r| r.0[j]).collect();
            let (eta_open, eta_open_se) = proportion(col.iter().map(|c| c.3).sum(), total_sites);
            let largest: Vec<f64> = col.iter().map(|c| c.5 as f64).collect();
            ZdRow {
                p,
                r,
                lattice_half: half,
                replicates,
                seed,
                inclusion_pass: col.iter().filter(|c| c.0).count(),
                inclusion_vacuous: col.iter().filter(|c| c.1).count(),
                closed_crossed: col.iter().map(|c| c.2).sum(),
                eta_open,
                eta_open_se,
                eta_spanning: proportion(col.iter().filter(|c| c.4).count(), replicates).0,
                eta_largest_mean: largest.iter().sum::<f64>() / replicates as f64,
                eta_largest_q90: quantile(&largest, 0.9),
                ambiguous_sites,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalityReport {
    pub r: f64,
    pub samples: usize,
    pub seed: u64,
    /// Sites compared (each at every `p`).
    pub sites: usize,
    /// Sites whose answer never changed.
    pub agreed: usize,
}

/// Recomputes `box_open` for every site of the block `|x|_∞ ≤ half` after
/// deleting all points at distance `≥ R/2` from `C_x`. Edge marks are keyed
/// by the points' original indices, so surviving edges keep their marks.
pub fn locality_check<E: Executor>(
    spec: &ProcessSpec,
    ps: &[f64],
    r: f64,
    half: i64,
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<LocalityReport> {
    spec.validate()?;
    check_grid(ps, r, samples)?;
    let window = lattice_geometry_window(r, half)?;
    let per = exec.map(samples, |k| -> Result<(usize, usize)> {
        let cfg = sample_rep(spec, &window, seed, k, "locality")?;
        let cx = DelaunayComplex::new(cfg)?;
        let stream = RngStream::new(seed, k as u64, "bonds");
        let label_of = |c: &DelaunayComplex, v: u32| -> u64 { original_index(&cx, c.point(v)) };
        let u = bond_uniforms_labeled(&cx, &stream, |v| label_of(&cx, v));
        let geom = PercolationGeometry::new(&cx);
        let (mut sites, mut agreed) = (0, 0);
        for y in -half..=half {
            for x in -half..=half {
                let rect = AxisBox::coarse_box(&[x, y], r)?.rect();
                let kept: Vec<Vec2> = cx.points().iter().copied().filter(|&q| rect.dist(q) < r / 2.0).collect();
                let small = DelaunayComplex::new(PointConfiguration::from_planar(window.clone(), &kept)?)?;
                let us = bond_uniforms_labeled(&small, &stream, |v| label_of(&small, v));
                let small_geom = PercolationGeometry::new(&small);
                let mut same = true;
                for &p in ps {
                    let a = box_open(&geom, &bonds_at(&u, p)?, [x, y], r)?;
                    let b = box_open(&small_geom, &bonds_at(&us, p)?, [x, y], r)?;
                    same &= a.open == b.open;
                }
                sites += 1;
                agreed += same as usize;
            }
        }
        Ok((sites, agreed))
    });
    let per: Vec<(usize, usize)> = per.into_iter().collect::<Result<_>>()?;
    Ok(LocalityReport {
        r,
        samples,
        seed,
        sites: per.iter().map(|p| p.0).sum(),
        agreed: per.iter().map(|p| p.1).sum(),
    })
}

/// Index in `cx` of the point at exactly `q`.
fn original_index(cx: &DelaunayComplex, q: Vec2) -> u64 {
    cx.config().find(&[q.x, q.y]).expect("point comes from the full sample") as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn locality_holds_on_a_few_samples() {
        let rep = locality_check(&ProcessSpec::poisson(1.0), &[0.3, 0.7], 4.0, 1, 3, 9, &Sequential).unwrap();
        assert_eq!((rep.sites, rep.agreed), (27, 27));
    }

    #[test]
    fn zd_rows_are_monotone_in_p() {
        let rows = zd_study(&ProcessSpec::poisson(1.0), &[0.0, 0.5, 1.0], 4.0, 2, 4, 3, &Sequential).unwrap();
        assert!(rows.iter().all(|r| r.inclusion_pass == 4));
        assert_eq!(rows[0].inclusion_vacuous, 4);
        assert!(rows.windows(2).all(|w| w[0].eta_open <= w[1].eta_open));
        assert_eq!(rows[2].eta_open, 1.0);
    }
}

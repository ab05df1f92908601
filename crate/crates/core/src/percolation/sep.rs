use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::bonds::{clusters_in, default_core, BondConfiguration};
use super::events::quantile;
use crate::conductance::{assign_conductances, edge_uniform, ConductanceField, ConductanceLaw};
use crate::exec::Executor;
use crate::geom::{AxisBox, DelaunayComplex};
use crate::moments::sample_rep;
use crate::process::ProcessSpec;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Clusters left after one thinning of one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SepSample {
    pub t0: f64,
    pub kept: usize,
    pub spanning: bool,
    pub largest_size: usize,
    pub largest_diameter: f64,
    pub mean_size: f64,
}

/// Keeps each edge with probability `1 − e^{−t₀ c}`, one shared uniform per
/// edge for the whole `t₀` grid, and reports the clusters of kept edges.
/// Only edges between interior-valid points take part: near the hull the
/// window invents long edges that the unbounded process does not have.
pub fn sep_thin(field: &ConductanceField<'_>, t0s: &[f64], stream: &RngStream, core: &AxisBox) -> Vec<SepSample> {
    let cx = field.complex();
    let valid = cx.interior_valid();
    let u: Vec<f64> = cx
        .edges()
        .iter()
        .map(|e| {
            if valid[e.a as usize] && valid[e.b as usize] {
                edge_uniform(stream, e.a as u64, e.b as u64)
            } else {
                1.0
            }
        })
        .collect();
    t0s.iter()
        .map(|&t0| {
            let marks: Vec<bool> = u.iter().zip(field.weights()).map(|(&u, &c)| u < -(-t0 * c).exp_m1()).collect();
            let bonds = BondConfiguration::from_marks(marks);
            let cl = clusters_in(cx, &bonds, core);
            SepSample {
                t0,
                kept: bonds.open_count(),
                spanning: cl.spanning,
                largest_size: cl.largest_size(),
                largest_diameter: cl.largest_diameter(cx),
                mean_size: cx.len() as f64 / cl.count().max(1) as f64,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SepRow {
    pub t0: f64,
    /// Upper bound on the conductances.
    pub c_star: f64,
    /// `1 − e^{−t₀ C_*}`, the keep probability of the dominating Bernoulli field.
    pub keep_bound: f64,
    pub replicates: usize,
    pub seed: u64,
    pub window_side: f64,
    pub spanning_count: usize,
    pub spanning_frequency: f64,
    pub largest_size_mean: f64,
    pub largest_size_q50: f64,
    pub largest_size_q99: f64,
    pub largest_diameter_mean: f64,
    pub largest_diameter_max: f64,
    pub mean_cluster_size: f64,
    /// No spanning cluster, and no cluster wider than a quarter of the window.
    pub subcritical: bool,
}

/// Thinning check over fresh samples in a window of half-side
/// `window_half` centred at the origin.
pub fn sep_check<E: Executor>(
    spec: &ProcessSpec,
    law: &ConductanceLaw,
    window_half: f64,
    t0s: &[f64],
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<SepRow>> {
    spec.validate()?;
    law.validate()?;
    let Some(c_star) = law.upper_bound() else {
        return Err(Error::UnsupportedLaw(format!("the {} law has no finite upper bound", law.tag())));
    };
    if t0s.is_empty() || t0s.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(format!("t0 grid must be nonempty and nonnegative, got {t0s:?}")));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    let window = AxisBox::centered(2, window_half)?;
    let core = default_core(&window);
    let reps = exec.map(replicates, |k| -> Result<Vec<SepSample>> {
        let cfg = sample_rep(spec, &window, seed, k, "sep")?;
        let cx = DelaunayComplex::new(cfg)?;
        let stream = RngStream::new(seed, k as u64, "sep");
        let field = assign_conductances(&cx, law, &stream.with_purpose("conductance"))?;
        Ok(sep_thin(&field, t0s, &stream.with_purpose("thinning"), &core))
    });
    let reps: Vec<Vec<SepSample>> = reps.into_iter().collect::<Result<_>>()?;
    let side = window.side();
    Ok(t0s
        .iter()
        .enumerate()
        .map(|(j, &t0)| {
            let col: Vec<&SepSample> = reps.iter().map(|r| &r[j]).collect();
            let n = col.len() as f64;
            let spanning_count = col.iter().filter(|s| s.spanning).count();
            let sizes: Vec<f64> = col.iter().map(|s| s.largest_size as f64).collect();
            let diam_max = col.iter().map(|s| s.largest_diameter).fold(0.0, f64::max);
            SepRow {
                t0,
                c_star,
                keep_bound: -(-t0 * c_star).exp_m1(),
                replicates,
                seed,
                window_side: side,
                spanning_count,
                spanning_frequency: spanning_count as f64 / n,
                largest_size_mean: sizes.iter().sum::<f64>() / n,
                largest_size_q50: quantile(&sizes, 0.5),
                largest_size_q99: quantile(&sizes, 0.99),
                largest_diameter_mean: col.iter().map(|s| s.largest_diameter).sum::<f64>() / n,
                largest_diameter_max: diam_max,
                mean_cluster_size: col.iter().map(|s| s.mean_size).sum::<f64>() / n,
                subcritical: spanning_count == 0 && diam_max < 0.25 * side,
            }
        })
        .collect())
}

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::rho::box_moment_samples;
use super::{edge_margin, sample_rep};
use crate::exec::Executor;
use crate::geom::AxisBox;
use crate::process::{campbell_palm_average, palm_root_slivnyak, BoxCount, ProcessSpec};
use crate::rng::RngStream;
use crate::stats::{ratio_estimate, Moments};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentInequality {
    /// `E[ξ([0,L]^d)^γ] ≤ L^{dγ} ρ_γ`
    BoxMoment,
    /// `𝔼₀[ξ(Λ_L)^γ] ≤ m⁻¹ (2L+2)^{dγ} ρ_{1+γ}`
    PalmBoxMoment,
}

impl MomentInequality {
    pub fn tag(self) -> &'static str {
        match self {
            MomentInequality::BoxMoment => "box_moment",
            MomentInequality::PalmBoxMoment => "palm_box_moment",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityRow {
    pub kind: MomentInequality,
    pub l: u32,
    pub gamma: f64,
    pub left: f64,
    pub left_se: f64,
    pub right: f64,
    pub right_se: f64,
    /// `left − right` exceeds three combined standard errors.
    pub violated: bool,
}

fn row(kind: MomentInequality, l: u32, gamma: f64, left: (f64, f64), right: (f64, f64)) -> InequalityRow {
    let tol = 3.0 * (left.1 * left.1 + right.1 * right.1).sqrt();
    InequalityRow {
        kind,
        l,
        gamma,
        left: left.0,
        left_se: left.1,
        right: right.0,
        right_se: right.1,
        violated: left.0 - right.0 > tol,
    }
}

fn moment(counts: &[Vec<usize>], j: usize, gamma: f64) -> (f64, f64) {
    let m: Moments = counts.iter().map(|c| (c[j] as f64).powf(gamma)).collect();
    (m.mean(), m.std_error())
}

/// Estimates both sides of the two box-moment inequalities on the grid.
/// The Palm side uses origin adjoining for Poisson and Campbell averages
/// over a unit core box otherwise.
pub fn check_moment_inequalities<E: Executor>(
    spec: &ProcessSpec,
    dim: usize,
    ls: &[u32],
    gammas: &[f64],
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<InequalityRow>> {
    if ls.is_empty() || ls.contains(&0) || gammas.is_empty() || gammas.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::InvalidParameter(format!("need integer L >= 1 and gamma > 0, got {ls:?}, {gammas:?}")));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    let lmax = *ls.iter().max().expect("nonempty") as f64;
    // unit cube, then [0, L]^d for each L
    let mut boxes = alloc::vec![AxisBox::new(alloc::vec![0.5; dim], 0.5)?];
    for &l in ls {
        boxes.push(AxisBox::new(alloc::vec![l as f64 / 2.0; dim], l as f64 / 2.0)?);
    }
    let counts = box_moment_samples(spec, &boxes, replicates, seed, "inequality", exec)?;
    let m = match spec.intensity(dim) {
        Some(m) => (m, 0.0),
        None => moment(&counts, 0, 1.0),
    };

    let palm: Vec<Vec<f64>> = if matches!(spec, ProcessSpec::Poisson { .. }) {
        let window = AxisBox::centered(dim, lmax)?;
        let rows = exec.map(replicates, |k| -> Result<Vec<f64>> {
            let r = palm_root_slivnyak(spec, &window, &RngStream::new(seed, k as u64, "inequality-palm"))?;
            ls.iter().map(|&l| r.evaluate(&BoxCount { half_side: l as f64 })).collect()
        });
        rows.into_iter().collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let core = AxisBox::centered(dim, 0.5)?;
    let window = AxisBox::centered(dim, 0.5 + lmax + edge_margin(spec))?;
    let campbell: Vec<Vec<(f64, f64)>> = if palm.is_empty() {
        let rows = exec.map(replicates, |k| -> Result<Vec<(f64, f64)>> {
            let cfg = sample_rep(spec, &window, seed, k, "inequality-palm")?;
            let mut out = Vec::new();
            for &l in ls {
                for &g in gammas {
                    let f = PowBoxCount { half_side: l as f64, gamma: g };
                    let s = campbell_palm_average(&f, &cfg, &core)?;
                    out.push((s.sum, s.count as f64));
                }
            }
            Ok(out)
        });
        rows.into_iter().collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut out = Vec::new();
    for (j, &l) in ls.iter().enumerate() {
        for (gi, &g) in gammas.iter().enumerate() {
            let dg = dim as f64 * g;
            let left = moment(&counts, j + 1, g);
            let rho = moment(&counts, 0, g);
            let scale = (l as f64).powf(dg);
            out.push(row(MomentInequality::BoxMoment, l, g, left, (scale * rho.0, scale * rho.1)));

            let palm_left = if palm.is_empty() {
                let col = j * gammas.len() + gi;
                let sums: Vec<f64> = campbell.iter().map(|r| r[col].0).collect();
                let cnts: Vec<f64> = campbell.iter().map(|r| r[col].1).collect();
                ratio_estimate(&sums, &cnts)
            } else {
                let mm: Moments = palm.iter().map(|r| r[j].powf(g)).collect();
                (mm.mean(), mm.std_error())
            };
            let rho1 = moment(&counts, 0, 1.0 + g);
            let scale = (2.0 * l as f64 + 2.0).powf(dg);
            let right = scale * rho1.0 / m.0;
            let right_se = scale * ((rho1.1 / m.0).powi(2) + (rho1.0 * m.1 / (m.0 * m.0)).powi(2)).sqrt();
            out.push(row(MomentInequality::PalmBoxMoment, l, g, palm_left, (right, right_se)));
        }
    }
    Ok(out)
}

struct PowBoxCount {
    half_side: f64,
    gamma: f64,
}

impl crate::process::PalmFunctional for PowBoxCount {
    fn reach(&self) -> f64 {
        self.half_side
    }
    fn eval(&self, view: &crate::process::RootedView<'_>) -> Result<f64> {
        Ok((view.count_in_box(self.half_side) as f64).powf(self.gamma))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn poisson_grid_has_no_violations() {
        let rows = check_moment_inequalities(&ProcessSpec::poisson(1.0), 2, &[1, 2], &[1.0, 2.0], 4000, 3, &Sequential).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| !r.violated), "{rows:?}");
        let palm = rows.iter().find(|r| r.kind == MomentInequality::PalmBoxMoment && r.l == 1 && r.gamma == 1.0).unwrap();
        assert!((palm.left - 5.0).abs() < 4.0 * palm.left_se);
        assert!((palm.right - 32.0).abs() < 4.0 * palm.right_se);
    }

    #[test]
    fn hardcore_uses_campbell_route() {
        let spec = ProcessSpec::MaternHardcore { proposal_intensity: 2.0, radius: 0.3 };
        let rows = check_moment_inequalities(&spec, 2, &[1], &[1.0], 300, 4, &Sequential).unwrap();
        assert!(rows.iter().all(|r| !r.violated && r.left.is_finite()), "{rows:?}");
    }
}

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{poisson_count, uniform_in_ball, uniform_in_box, unit_ball_volume};
use crate::geom::{AxisBox, PointConfiguration};
use crate::stats::proportion;

/// Matérn cluster process. Parents live on the window enlarged by the
/// cluster radius so that clusters centred just outside still contribute.
pub fn sample_matern_cluster(
    parent_intensity: f64,
    mean_offspring: f64,
    radius: f64,
    window: &AxisBox,
    r: &mut ChaCha8Rng,
) -> PointConfiguration {
    let d = window.dim();
    let outer = window.expanded(radius).expect("positive radius");
    let parents = poisson_count(parent_intensity * outer.volume(), r);
    let mut parent = vec![0.0; d];
    let mut child = vec![0.0; d];
    let mut coords = Vec::new();
    for _ in 0..parents {
        uniform_in_box(&outer, r, &mut parent);
        let kids = poisson_count(mean_offspring, r);
        for _ in 0..kids {
            uniform_in_ball(&parent, radius, r, &mut child);
            if window.contains(&child) {
                coords.extend_from_slice(&child);
            }
        }
    }
    PointConfiguration::from_flat_unchecked(window.clone(), coords).expect("flat layout matches dimension")
}

/// Matérn type II: uniform marks on Poisson proposals; a proposal survives
/// iff no other proposal closer than `radius` carries a smaller mark.
pub fn sample_matern_hardcore(
    proposal_intensity: f64,
    radius: f64,
    window: &AxisBox,
    r: &mut ChaCha8Rng,
) -> PointConfiguration {
    let d = window.dim();
    let outer = window.expanded(radius).expect("positive radius");
    let n = poisson_count(proposal_intensity * outer.volume(), r);
    let mut pts = vec![0.0; n * d];
    let mut marks = vec![0.0; n];
    for (p, m) in pts.chunks_exact_mut(d).zip(marks.iter_mut()) {
        uniform_in_box(&outer, r, p);
        *m = r.random::<f64>();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| pts[a * d].total_cmp(&pts[b * d]));
    let mut pos = vec![0usize; n];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    let p = |i: usize| &pts[i * d..(i + 1) * d];
    let close = |i: usize, j: usize| {
        p(i).iter().zip(p(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < radius * radius
    };
    let mut coords = Vec::new();
    for i in 0..n {
        if !window.contains(p(i)) {
            continue;
        }
        let x = pts[i * d];
        let mut keep = true;
        let k = pos[i];
        for &j in order[k + 1..].iter() {
            if pts[j * d] - x >= radius {
                break;
            }
            if marks[j] < marks[i] && close(i, j) {
                keep = false;
                break;
            }
        }
        if keep {
            for &j in order[..k].iter().rev() {
                if x - pts[j * d] >= radius {
                    break;
                }
                if marks[j] < marks[i] && close(i, j) {
                    keep = false;
                    break;
                }
            }
        }
        if keep {
            coords.extend_from_slice(p(i));
        }
    }
    PointConfiguration::from_flat_unchecked(window.clone(), coords).expect("flat layout matches dimension")
}

/// Monte Carlo retention probability of a type-II proposal: draw its mark
/// `U`, then the number of smaller-marked proposals in its exclusion ball,
/// Poisson(λ·U·|B_r|); it survives when that number is zero.
pub fn hardcore_retention_mc(
    proposal_intensity: f64,
    radius: f64,
    dim: usize,
    trials: usize,
    r: &mut ChaCha8Rng,
) -> (f64, f64) {
    let vol = unit_ball_volume(dim) * radius.powi(dim as i32);
    let kept = (0..trials)
        .filter(|_| {
            let u = r.random::<f64>();
            poisson_count(proposal_intensity * u * vol, r) == 0
        })
        .count();
    proportion(kept, trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::stats::Moments;

    #[test]
    fn hardcore_spacing_and_retention() {
        let w = AxisBox::centered(2, 3.0).unwrap();
        let (lam, rad) = (2.0, 0.4);
        let mut count = Moments::default();
        for k in 0..600 {
            let c = sample_matern_hardcore(lam, rad, &w, &mut RngStream::new(3, k, "hc").rng());
            for i in 0..c.len() {
                for j in 0..i {
                    let (a, b) = (c.point(i), c.point(j));
                    let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
                    assert!(d2 >= rad * rad);
                }
            }
            count.push(c.len() as f64 / w.volume());
        }
        let (p, se) = hardcore_retention_mc(lam, rad, 2, 200_000, &mut RngStream::new(4, 0, "ret").rng());
        let target = lam * p;
        let tol = 3.0 * (count.std_error().powi(2) + (lam * se).powi(2)).sqrt();
        assert!((count.mean() - target).abs() <= tol, "{} vs {}", count.mean(), target);
    }

    #[test]
    fn cluster_mean_intensity() {
        let w = AxisBox::centered(2, 2.0).unwrap();
        let mut m = Moments::default();
        for k in 0..2000 {
            let c = sample_matern_cluster(0.5, 4.0, 0.5, &w, &mut RngStream::new(8, k, "mc").rng());
            m.push(c.len() as f64);
        }
        assert!((m.mean() - 2.0 * 16.0).abs() < 4.0 * m.std_error());
    }
}

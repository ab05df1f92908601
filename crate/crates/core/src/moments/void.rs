use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use super::rho::box_moment_samples;
use crate::exec::Executor;
use crate::geom::AxisBox;
use crate::process::ProcessSpec;
use crate::stats::proportion;
use crate::{Error, Result};

/// Grid points with fewer void events than this are left out of the fit.
pub const MIN_VOIDS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct VoidPoint {
    pub ell: f64,
    pub voids: usize,
    pub replicates: usize,
    pub frequency: f64,
    pub std_error: f64,
    pub censored: bool,
    /// One-sided upper confidence bound on `P(ξ(Λ_ℓ) = 0)`: `3/n` when no
    /// void was seen, else frequency plus three standard errors.
    pub upper_bound: f64,
}

/// Weighted log–log fit `ln P(ξ(Λ_ℓ) = 0) ≈ ln κ − α ln ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaFit {
    pub points: Vec<VoidPoint>,
    pub alpha: f64,
    pub alpha_se: f64,
    pub log_kappa: f64,
    /// Weighted RMS residual of the linear fit.
    pub residual: f64,
    /// Quadratic coefficient of the weighted fit in `ln ℓ`, and its error.
    pub curvature: f64,
    pub curvature_se: f64,
    /// The log–log curve bends down (decay faster than any power) by more
    /// than two standard errors.
    pub super_polynomial: bool,
    pub fitted: usize,
}

/// Void frequencies of the centred boxes `Λ_ℓ` over `ells`, and the fit of
/// the decay exponent over the uncensored grid points.
pub fn estimate_void_probability<E: Executor>(
    spec: &ProcessSpec,
    dim: usize,
    ells: &[f64],
    replicates: usize,
    seed: u64,
    exec: &E,
) -> Result<AlphaFit> {
    if ells.is_empty() || ells.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidParameter(format!("void grid must be nonempty and positive, got {ells:?}")));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is needed".into()));
    }
    let boxes = ells.iter().map(|&l| AxisBox::centered(dim, l)).collect::<Result<Vec<_>>>()?;
    let counts = box_moment_samples(spec, &boxes, replicates, seed, "void", exec)?;
    let points: Vec<VoidPoint> = ells
        .iter()
        .enumerate()
        .map(|(j, &ell)| {
            let voids = counts.iter().filter(|c| c[j] == 0).count();
            let (frequency, std_error) = proportion(voids, replicates);
            let upper_bound = if voids == 0 { 3.0 / replicates as f64 } else { (frequency + 3.0 * std_error).min(1.0) };
            VoidPoint { ell, voids, replicates, frequency, std_error, censored: voids < MIN_VOIDS, upper_bound }
        })
        .collect();
    Ok(fit_alpha(points))
}

/// Weighted least squares on `(ln ℓ, ln p̂)` with the delta-method weights
/// `n p̂ / (1 − p̂)`.
pub fn fit_alpha(points: Vec<VoidPoint>) -> AlphaFit {
    let used: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|p| !p.censored)
        .map(|p| {
            let q = (1.0 - p.frequency).max(1.0 / p.replicates as f64);
            (p.ell.ln(), p.frequency.ln(), p.replicates as f64 * p.frequency / q)
        })
        .collect();
    let mut fit = AlphaFit {
        points,
        alpha: f64::NAN,
        alpha_se: f64::NAN,
        log_kappa: f64::NAN,
        residual: f64::NAN,
        curvature: f64::NAN,
        curvature_se: f64::NAN,
        super_polynomial: false,
        fitted: used.len(),
    };
    if used.len() >= 2 {
        if let Some((beta, cov)) = wls(&used, 2) {
            fit.log_kappa = beta[0];
            fit.alpha = -beta[1];
            fit.alpha_se = cov[1][1].sqrt();
            let wsum: f64 = used.iter().map(|u| u.2).sum();
            let rss: f64 = used.iter().map(|&(x, y, w)| w * (y - beta[0] - beta[1] * x).powi(2)).sum();
            fit.residual = (rss / wsum).sqrt();
        }
    }
    if used.len() >= 3 {
        if let Some((beta, cov)) = wls(&used, 3) {
            fit.curvature = beta[2];
            fit.curvature_se = cov[2][2].sqrt();
            fit.super_polynomial = beta[2] + 2.0 * fit.curvature_se < 0.0;
        }
    }
    fit
}

/// Polynomial WLS of degree `k − 1` with known weights; returns the
/// coefficients and their covariance `(XᵀWX)⁻¹`.
fn wls(pts: &[(f64, f64, f64)], k: usize) -> Option<([f64; 3], [[f64; 3]; 3])> {
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for &(x, y, w) in pts {
        let basis = [1.0, x, x * x];
        for i in 0..k {
            b[i] += w * basis[i] * y;
            for j in 0..k {
                a[i][j] += w * basis[i] * basis[j];
            }
        }
    }
    let inv = invert(a, k)?;
    let mut beta = [0.0; 3];
    for i in 0..k {
        beta[i] = (0..k).map(|j| inv[i][j] * b[j]).sum();
    }
    Some((beta, inv))
}

/// Gauss–Jordan inverse of the leading `k × k` block.
fn invert(mut a: [[f64; 3]; 3], k: usize) -> Option<[[f64; 3]; 3]> {
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate().take(k) {
        row[i] = 1.0;
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        inv.swap(c, piv);
        let d = a[c][c];
        for j in 0..k {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..k {
            if r != c {
                let f = a[r][c];
                for j in 0..k {
                    a[r][j] -= f * a[c][j];
                    inv[r][j] -= f * inv[c][j];
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn poisson_void_matches_formula() {
        let ells = [0.25, 0.5, 0.75, 1.0];
        let fit = estimate_void_probability(&ProcessSpec::poisson(1.0), 2, &ells, 20_000, 1, &Sequential).unwrap();
        for p in &fit.points {
            let exact = (-4.0 * p.ell * p.ell).exp();
            assert!((p.frequency - exact).abs() <= 4.0 * p.std_error, "{p:?}");
        }
        assert!(fit.super_polynomial, "{fit:?}");
        assert!(fit.alpha > 0.0);
    }

    #[test]
    fn exact_power_law_is_not_flagged() {
        let n = 1_000_000;
        let pts = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&ell: &f64| {
                let f = 0.3 * ell.powf(-2.0);
                VoidPoint {
                    ell,
                    voids: (f * n as f64) as usize,
                    replicates: n,
                    frequency: f,
                    std_error: (f * (1.0 - f) / n as f64).sqrt(),
                    censored: false,
                    upper_bound: 1.0,
                }
            })
            .collect();
        let fit = fit_alpha(pts);
        assert!((fit.alpha - 2.0).abs() < 1e-9 && (fit.log_kappa - 0.3f64.ln()).abs() < 1e-9);
        assert!(!fit.super_polynomial);
    }

    #[test]
    fn zero_voids_are_censored() {
        let fit = estimate_void_probability(&ProcessSpec::poisson(1.0), 2, &[0.1, 3.0], 200, 2, &Sequential).unwrap();
        let big = &fit.points[1];
        assert!(big.censored && big.voids == 0 && big.upper_bound == 3.0 / 200.0);
        assert_eq!(fit.fitted, 1);
        assert!(fit.alpha.is_nan());
    }
}

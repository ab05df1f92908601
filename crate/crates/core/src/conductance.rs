//! Random edge conductances on the Delaunay graph and the rooted local
//! statistics `deg`, `λ₀`, `λ₂`, `μ`, `ν`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

use crate::geom::DelaunayComplex;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Law of the conductance of an edge of length `r`, given as a quantile
/// function of a shared uniform so laws can be coupled pointwise.
#[derive(Clone, Debug, PartialEq)]
pub enum ConductanceLaw {
    Constant(f64),
    Unit,
    Uniform { lo: f64, hi: f64 },
    /// `exp(mu + sigma·Z)` with `Z` standard normal.
    LogNormal { mu: f64, sigma: f64 },
    /// `c = g(r)·2U`: mean `g(r)`, with `g` linearly interpolated from the
    /// table and held constant outside it.
    DistanceKernel { r: Vec<f64>, g: Vec<f64> },
}

impl ConductanceLaw {
    pub fn tag(&self) -> &'static str {
        match self {
            ConductanceLaw::Constant(_) => "constant",
            ConductanceLaw::Unit => "unit",
            ConductanceLaw::Uniform { .. } => "uniform",
            ConductanceLaw::LogNormal { .. } => "lognormal",
            ConductanceLaw::DistanceKernel { .. } => "distance_kernel",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: alloc::string::String| Err(Error::InvalidLaw(m));
        match self {
            ConductanceLaw::Constant(c) if !(c.is_finite() && *c >= 0.0) => bad(format!("constant {c} must be >= 0")),
            ConductanceLaw::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && 0.0 <= *lo && lo <= hi) => {
                bad(format!("uniform bounds need 0 <= lo <= hi, got [{lo}, {hi}]"))
            }
            ConductanceLaw::LogNormal { mu, sigma } if !(mu.is_finite() && sigma.is_finite() && *sigma >= 0.0) => {
                bad(format!("lognormal needs finite mu and sigma >= 0, got ({mu}, {sigma})"))
            }
            ConductanceLaw::DistanceKernel { r, g } => {
                if r.is_empty() || r.len() != g.len() {
                    return bad("distance kernel needs matching nonempty columns".into());
                }
                if r.windows(2).any(|w| !(w[0] < w[1])) || r.iter().chain(g).any(|x| !x.is_finite()) {
                    return bad("distance kernel radii must increase and values be finite".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn kernel(r: &[f64], g: &[f64], len: f64) -> f64 {
        if len <= r[0] {
            return g[0];
        }
        let k = r.partition_point(|&x| x <= len);
        if k == r.len() {
            return g[k - 1];
        }
        g[k - 1] + (g[k] - g[k - 1]) * (len - r[k - 1]) / (r[k] - r[k - 1])
    }

    /// The conductance of an edge of length `len` driven by `u ∈ (0, 1)`.
    /// Nondecreasing in `u`.
    pub fn quantile(&self, u: f64, len: f64) -> Result<f64> {
        let c = match self {
            ConductanceLaw::Constant(c) => *c,
            ConductanceLaw::Unit => 1.0,
            ConductanceLaw::Uniform { lo, hi } => lo + (hi - lo) * u,
            ConductanceLaw::LogNormal { mu, sigma } => (mu + sigma * normal_quantile(u)).exp(),
            ConductanceLaw::DistanceKernel { r, g } => Self::kernel(r, g, len) * 2.0 * u,
        };
        if c.is_nan() || c < 0.0 {
            return Err(Error::InvalidLaw(format!("{} law produced {c} for an edge of length {len}", self.tag())));
        }
        Ok(c)
    }

    /// Whether a conductance can be zero or have an infinite negative moment
    /// (then `ν` moments are meaningless).
    pub fn admits_zero(&self) -> bool {
        match self {
            ConductanceLaw::Constant(c) => *c == 0.0,
            ConductanceLaw::Unit | ConductanceLaw::LogNormal { .. } => false,
            ConductanceLaw::Uniform { lo, .. } => *lo == 0.0,
            ConductanceLaw::DistanceKernel { g, .. } => g.iter().any(|&x| x <= 0.0),
        }
    }

    /// Almost-sure upper bound on a conductance, when one exists.
    pub fn upper_bound(&self) -> Option<f64> {
        match self {
            ConductanceLaw::Constant(c) => Some(*c),
            ConductanceLaw::Unit => Some(1.0),
            ConductanceLaw::Uniform { hi, .. } => Some(*hi),
            ConductanceLaw::LogNormal { mu, sigma } => (*sigma == 0.0).then(|| mu.exp()),
            ConductanceLaw::DistanceKernel { g, .. } => Some(2.0 * g.iter().copied().fold(0.0, f64::max)),
        }
    }

    /// Mean conductance of an edge of length `len`.
    pub fn mean(&self, len: f64) -> f64 {
        match self {
            ConductanceLaw::Constant(c) => *c,
            ConductanceLaw::Unit => 1.0,
            ConductanceLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            ConductanceLaw::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            ConductanceLaw::DistanceKernel { r, g } => Self::kernel(r, g, len),
        }
    }
}

/// Standard normal quantile (Acklam's rational approximation followed by
/// one Halley step against `erfc`).
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < 0.02425 {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - 0.02425 {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2) - p;
    let u = e * (2.0 * core::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

/// Conductances on the edges of a complex, indexed like
/// [`DelaunayComplex::edges`].
#[derive(Clone, Debug)]
pub struct ConductanceField<'a> {
    complex: &'a DelaunayComplex,
    weights: Vec<f64>,
}

/// One draw per undirected edge, keyed by the sorted pair of point indices.
pub fn assign_conductances<'a>(
    complex: &'a DelaunayComplex,
    law: &ConductanceLaw,
    rng: &RngStream,
) -> Result<ConductanceField<'a>> {
    assign_conductances_labeled(complex, law, rng, |v| v as u64)
}

/// As [`assign_conductances`] with the per-edge uniform keyed by
/// `label(u), label(v)` instead of the point indices; equal labels across
/// two complexes give equal conductances on corresponding edges.
pub fn assign_conductances_labeled<'a>(
    complex: &'a DelaunayComplex,
    law: &ConductanceLaw,
    rng: &RngStream,
    label: impl Fn(u32) -> u64,
) -> Result<ConductanceField<'a>> {
    law.validate()?;
    let weights = complex
        .edges()
        .iter()
        .map(|e| {
            let u = edge_uniform(rng, label(e.a), label(e.b));
            let len = complex.point(e.a).dist(complex.point(e.b));
            law.quantile(u, len)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConductanceField { complex, weights })
}

/// The per-edge uniform, shifted off zero so quantiles stay finite.
pub fn edge_uniform(rng: &RngStream, a: u64, b: u64) -> f64 {
    rng.pair_uniform(a, b) + 0.5 / (1u64 << 53) as f64
}

impl<'a> ConductanceField<'a> {
    pub fn complex(&self) -> &'a DelaunayComplex {
        self.complex
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `c_{u,v}`; zero when `u` and `v` are not Delaunay neighbours.
    pub fn weight(&self, u: u32, v: u32) -> f64 {
        self.complex.edge_between(u, v).map_or(0.0, |e| self.weights[e as usize])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootedLocalStats {
    pub degree: usize,
    pub lambda0: f64,
    pub lambda2: f64,
    pub mu0: f64,
    /// `Σ 1/c`; `+∞` when some incident conductance is zero.
    pub nu0: f64,
    pub nu_infinite: bool,
    pub max_neighbor_distance: f64,
    pub zeta: f64,
    pub zeta_sum: f64,
}

/// Local statistics of the Delaunay neighbourhood of `root`, in coordinates
/// relative to the root.
pub fn rooted_local_stats(field: &ConductanceField<'_>, root: u32, zeta: f64) -> Result<RootedLocalStats> {
    let cx = field.complex;
    if !(zeta >= 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidParameter(format!("zeta must be >= 0, got {zeta}")));
    }
    if !cx.is_interior_valid(root) {
        return Err(Error::BoundaryContamination(root as usize));
    }
    let o = cx.point(root);
    let mut s = RootedLocalStats {
        degree: 0,
        lambda0: 0.0,
        lambda2: 0.0,
        mu0: 0.0,
        nu0: 0.0,
        nu_infinite: false,
        max_neighbor_distance: 0.0,
        zeta,
        zeta_sum: 0.0,
    };
    for &(x, e) in cx.neighbor_edges(root) {
        let c = field.weights[e as usize];
        let r = cx.point(x).dist(o);
        s.degree += 1;
        s.lambda0 += c;
        s.lambda2 += c * r * r;
        if c > 0.0 {
            s.nu0 += 1.0 / c;
        } else {
            s.nu_infinite = true;
        }
        s.max_neighbor_distance = s.max_neighbor_distance.max(r);
        s.zeta_sum += r.powf(zeta);
    }
    s.mu0 = s.lambda0;
    if s.nu_infinite {
        s.nu0 = f64::INFINITY;
    }
    Ok(s)
}

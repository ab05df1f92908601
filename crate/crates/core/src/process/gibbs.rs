//! Birth/death/move Metropolis–Hastings for finite-volume Gibbs measures
//! with density `z^n e^{-βH}` against the unit-rate Poisson process.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::potential::PairPotential;
use super::uniform_in_box;
use crate::geom::{AxisBox, PointConfiguration};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GibbsSpec {
    pub activity: f64,
    pub beta: f64,
    pub potential: PairPotential,
    /// Frozen configuration outside the window; `None` is the empty boundary.
    pub boundary: Option<PointConfiguration>,
    pub burn_in: u32,
    /// Sweeps between recorded samples.
    pub gap: u32,
}

impl GibbsSpec {
    pub fn new(activity: f64, beta: f64, potential: PairPotential) -> Self {
        GibbsSpec { activity, beta, potential, boundary: None, burn_in: 1000, gap: 10 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.activity > 0.0 && self.activity.is_finite()) {
            return Err(Error::InvalidSpec(format!("activity must be positive, got {}", self.activity)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidSpec(format!("inverse temperature must be >= 0, got {}", self.beta)));
        }
        if self.gap == 0 {
            return Err(Error::InvalidSpec("thinning gap must be at least one sweep".into()));
        }
        self.potential.validate()
    }
}

/// Points of the current state in buckets of side `>= range` over the first
/// (up to two) coordinates, so energies only look at neighboring buckets.
struct State<'a> {
    d: usize,
    window: &'a AxisBox,
    pot: &'a PairPotential,
    range: f64,
    cell: f64,
    nb: [usize; 2],
    coords: Vec<f64>,
    bucket_of: Vec<usize>,
    buckets: Vec<Vec<u32>>,
    boundary: Vec<f64>,
}

impl<'a> State<'a> {
    fn new(window: &'a AxisBox, pot: &'a PairPotential, boundary: Option<&PointConfiguration>) -> Self {
        let d = window.dim();
        let range = pot.range();
        let side = window.side();
        let per = ((side / range).floor() as usize).clamp(1, 256);
        let kd = d.min(2);
        let nb = [per, if kd == 2 { per } else { 1 }];
        let mut bnd = Vec::new();
        if let Some(b) = boundary {
            for p in b.points() {
                if window.dist(p) < range && !window.contains_strictly(p) {
                    bnd.extend_from_slice(p);
                }
            }
        }
        State {
            d,
            window,
            pot,
            range,
            cell: side / per as f64,
            nb,
            coords: Vec::new(),
            bucket_of: Vec::new(),
            buckets: vec![Vec::new(); nb[0] * nb[1]],
            boundary: bnd,
        }
    }

    fn len(&self) -> usize {
        self.bucket_of.len()
    }

    fn bucket_xy(&self, p: &[f64]) -> [usize; 2] {
        let mut out = [0usize; 2];
        for k in 0..self.d.min(2) {
            let i = ((p[k] - self.window.lo(k)) / self.cell).floor();
            out[k] = (i.max(0.0) as usize).min(self.nb[k] - 1);
        }
        out
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    fn pair(&self, a: &[f64], b: &[f64]) -> f64 {
        let r = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        if r < self.range {
            self.pot.eval(r)
        } else {
            0.0
        }
    }

    /// Interaction energy of a point at `p` with the state (minus `skip`)
    /// and the boundary.
    fn energy(&self, p: &[f64], skip: Option<usize>) -> f64 {
        let mut e = 0.0;
        let [bx, by] = self.bucket_xy(p);
        let ys = if self.d >= 2 { by.saturating_sub(1)..=(by + 1).min(self.nb[1] - 1) } else { 0..=0 };
        for j in ys {
            for i in bx.saturating_sub(1)..=(bx + 1).min(self.nb[0] - 1) {
                for &q in &self.buckets[j * self.nb[0] + i] {
                    if Some(q as usize) != skip {
                        e += self.pair(p, self.point(q as usize));
                    }
                }
            }
        }
        for b in self.boundary.chunks_exact(self.d) {
            e += self.pair(p, b);
        }
        e
    }

    fn add(&mut self, p: &[f64]) {
        let [bx, by] = self.bucket_xy(p);
        let k = by * self.nb[0] + bx;
        let id = self.len() as u32;
        self.coords.extend_from_slice(p);
        self.bucket_of.push(k);
        self.buckets[k].push(id);
    }

    fn remove(&mut self, i: usize) {
        let last = self.len() - 1;
        let k = self.bucket_of[i];
        let pos = self.buckets[k].iter().position(|&q| q as usize == i).expect("indexed point");
        self.buckets[k].swap_remove(pos);
        if i != last {
            let kl = self.bucket_of[last];
            let pl = self.buckets[kl].iter().position(|&q| q as usize == last).expect("indexed point");
            self.buckets[kl][pl] = i as u32;
            for c in 0..self.d {
                self.coords[i * self.d + c] = self.coords[last * self.d + c];
            }
            self.bucket_of[i] = kl;
        }
        self.coords.truncate(last * self.d);
        self.bucket_of.pop();
    }

    fn snapshot(&self) -> PointConfiguration {
        PointConfiguration::from_flat_unchecked(self.window.clone(), self.coords.clone())
            .expect("flat layout matches dimension")
    }
}

/// `e^{-β e}` with the convention `0 · ∞ = 0` at infinite temperature.
fn boltzmann(beta: f64, e: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else {
        (-beta * e).exp()
    }
}

/// Runs the chain from the empty state: `burn_in` sweeps, then `samples`
/// recorded states separated by `gap` sweeps. A sweep is
/// `max(1, ⌈z·vol⌉)` proposals, each birth, death or move with probability ⅓.
pub fn sample_gibbs_chain(
    spec: &GibbsSpec,
    window: &AxisBox,
    r: &mut ChaCha8Rng,
    samples: usize,
) -> Result<Vec<PointConfiguration>> {
    spec.validate()?;
    let vol = window.volume();
    let zv = spec.activity * vol;
    let per_sweep = (zv.ceil() as usize).max(1);
    let mut st = State::new(window, &spec.potential, spec.boundary.as_ref());
    let mut cand = vec![0.0; window.dim()];
    let beta = spec.beta;
    let mut step = |st: &mut State, r: &mut ChaCha8Rng| {
        let kind = r.random_range(0..3u32);
        let n = st.len();
        match kind {
            0 => {
                uniform_in_box(window, r, &mut cand);
                let e = st.energy(&cand, None);
                let a = zv / (n + 1) as f64 * boltzmann(beta, e);
                if r.random::<f64>() < a {
                    st.add(&cand);
                }
            }
            1 => {
                if n == 0 {
                    return;
                }
                let y = r.random_range(0..n);
                let e = st.energy(st.point(y), Some(y));
                let a = n as f64 / zv * if beta == 0.0 { 1.0 } else { (beta * e).exp() };
                if r.random::<f64>() < a {
                    st.remove(y);
                }
            }
            _ => {
                if n == 0 {
                    return;
                }
                let y = r.random_range(0..n);
                uniform_in_box(window, r, &mut cand);
                let old = st.energy(st.point(y), Some(y));
                let new = st.energy(&cand, Some(y));
                let a = if beta == 0.0 || new == old { 1.0 } else { (-beta * (new - old)).exp() };
                if r.random::<f64>() < a {
                    st.remove(y);
                    st.add(&cand);
                }
            }
        }
    };
    for _ in 0..spec.burn_in as usize * per_sweep {
        step(&mut st, r);
    }
    let mut out = Vec::with_capacity(samples);
    for s in 0..samples {
        if s > 0 {
            for _ in 0..spec.gap as usize * per_sweep {
                step(&mut st, r);
            }
        }
        out.push(st.snapshot());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::stats::Moments;

    #[test]
    fn hard_core_never_violated() {
        let w = AxisBox::centered(2, 2.0).unwrap();
        let mut spec = GibbsSpec::new(3.0, 1.0, PairPotential::HardCore { radius: 0.3 });
        spec.burn_in = 50;
        spec.gap = 2;
        let chain = sample_gibbs_chain(&spec, &w, &mut RngStream::new(2, 0, "g").rng(), 200).unwrap();
        for c in &chain {
            for i in 0..c.len() {
                for j in 0..i {
                    let (a, b) = (c.point(i), c.point(j));
                    assert!((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) >= 0.09);
                }
            }
        }
        assert!(chain.iter().any(|c| c.len() > 5));
    }

    #[test]
    fn infinite_temperature_is_poisson() {
        let w = AxisBox::centered(2, 1.0).unwrap();
        let mut spec = GibbsSpec::new(2.0, 0.0, PairPotential::HardCore { radius: 0.5 });
        spec.burn_in = 100;
        let chain = sample_gibbs_chain(&spec, &w, &mut RngStream::new(9, 0, "g").rng(), 3000).unwrap();
        let m: Moments = chain.iter().map(|c| c.len() as f64).collect();
        // Thinned samples are mildly correlated; allow a wide band.
        assert!((m.mean() - 8.0).abs() < 0.5, "{}", m.mean());
        assert!((m.variance() / 8.0 - 1.0).abs() < 0.2);
    }

    #[test]
    fn boundary_points_repel() {
        let w = AxisBox::centered(2, 1.0).unwrap();
        let outer = AxisBox::centered(2, 2.0).unwrap();
        let mut wall = Vec::new();
        for k in 0..40 {
            wall.push(-2.0 + k as f64 * 0.1);
            wall.push(1.05);
        }
        let bnd = PointConfiguration::from_flat(outer, wall).unwrap();
        let mut spec = GibbsSpec::new(5.0, 1.0, PairPotential::HardCore { radius: 0.4 });
        spec.boundary = Some(bnd);
        spec.burn_in = 50;
        let chain = sample_gibbs_chain(&spec, &w, &mut RngStream::new(1, 0, "g").rng(), 100).unwrap();
        for c in &chain {
            assert!(c.points().all(|p| p[1] < 1.05 - 0.4 + 1e-12 || (p[0].abs() > 2.0)));
        }
    }
}

//! Monte Carlo summaries: streaming moments, ratio estimators and the
//! universal report record.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow this when std is linked
use num_traits::Float;

/// Welford accumulator; `merge` is exact up to rounding, so partial results
/// may be combined in any grouping.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * self.n as f64 * o.n as f64 / n as f64;
        self.n = n;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let m: Moments = xs.iter().copied().collect();
    (m.mean(), m.std_error())
}

/// `Σ s_i / Σ c_i` with the linearised (delta-method) standard error.
pub fn ratio_estimate(sums: &[f64], counts: &[f64]) -> (f64, f64) {
    let n = sums.len();
    let (ts, tc): (f64, f64) = (sums.iter().sum(), counts.iter().sum());
    if tc == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let r = ts / tc;
    if n < 2 {
        return (r, 0.0);
    }
    let cbar = tc / n as f64;
    let ss: f64 = sums.iter().zip(counts).map(|(s, c)| (s - r * c) * (s - r * c)).sum();
    (r, (ss / (n as f64 * (n - 1) as f64)).sqrt() / cbar)
}

/// Binomial frequency and its standard error.
pub fn proportion(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = successes as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// `|a - b| <= k * sqrt(sa² + sb²)`.
pub fn agree(a: f64, sa: f64, b: f64, sb: f64, k: f64) -> bool {
    (a - b).abs() <= k * (sa * sa + sb * sb).sqrt()
}

/// Cumulative means at replicate counts 1, 2, 4, ... and at the end.
pub fn running_mean_trace(xs: &[f64]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut sum = 0.0;
    let mut next = 1usize;
    for (i, &x) in xs.iter().enumerate() {
        sum += x;
        let k = i + 1;
        if k == next || k == xs.len() {
            out.push((k, sum / k as f64));
            while next <= k {
                next *= 2;
            }
        }
    }
    out
}

/// Result of one Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub name: String,
    /// Parameter columns, in output order.
    pub params: Vec<(String, f64)>,
    pub estimate: f64,
    pub std_error: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Fraction of candidate roots skipped for boundary contamination.
    pub discard_fraction: f64,
    /// Intensity estimate used for normalisation, when there is one.
    pub intensity: Option<f64>,
    /// Running means, for stability diagnostics.
    pub trace: Vec<(usize, f64)>,
}

impl EstimateReport {
    pub fn new(name: &str, estimate: f64, std_error: f64, replicates: usize, seed: u64) -> Self {
        EstimateReport {
            name: name.into(),
            params: Vec::new(),
            estimate,
            std_error,
            replicates,
            seed,
            discard_fraction: 0.0,
            intensity: None,
            trace: Vec::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.into(), value));
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    /// `|estimate - target| <= k * std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.std_error
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0, 7.0];
        let m: Moments = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 5.0;
        assert!((m.mean() - mean).abs() < 1e-12 && (m.variance() - var).abs() < 1e-12);
        let mut a: Moments = xs[..2].iter().copied().collect();
        let b: Moments = xs[2..].iter().copied().collect();
        a.merge(&b);
        assert!((a.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn ratio_of_identical_is_exact() {
        let c = vec![3.0, 5.0, 0.0, 2.0];
        let (r, se) = ratio_estimate(&c, &c);
        assert_eq!((r, se), (1.0, 0.0));
    }

    #[test]
    fn trace_checkpoints() {
        let t = running_mean_trace(&[1.0; 10]);
        let ks: Vec<usize> = t.iter().map(|p| p.0).collect();
        assert_eq!(ks, vec![1, 2, 4, 8, 10]);
    }
}

use alloc::vec;

use rand_chacha::ChaCha8Rng;

use super::{poisson_count, uniform_in_box};
use crate::geom::{AxisBox, PointConfiguration};

/// Homogeneous Poisson process: Poisson(m·vol) points, i.i.d. uniform.
pub fn sample_poisson(intensity: f64, window: &AxisBox, r: &mut ChaCha8Rng) -> PointConfiguration {
    let d = window.dim();
    let n = poisson_count(intensity * window.volume(), r);
    let mut coords = vec![0.0; n * d];
    for p in coords.chunks_exact_mut(d) {
        uniform_in_box(window, r, p);
    }
    PointConfiguration::from_flat_unchecked(window.clone(), coords).expect("flat layout matches dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::stats::Moments;

    #[test]
    fn count_mean_and_variance() {
        let w = AxisBox::centered(2, 1.5).unwrap();
        let mut m = Moments::default();
        for k in 0..4000 {
            let mut r = RngStream::new(5, k, "poisson").rng();
            m.push(sample_poisson(2.0, &w, &mut r).len() as f64);
        }
        let mean = 2.0 * 9.0;
        assert!((m.mean() - mean).abs() < 4.0 * m.std_error());
        assert!((m.variance() / mean - 1.0).abs() < 0.1);
    }

    #[test]
    fn points_inside_and_replayable() {
        let w = AxisBox::new(alloc::vec![3.0, -1.0, 2.0], 0.5).unwrap();
        let a = sample_poisson(30.0, &w, &mut RngStream::new(1, 2, "p").rng());
        let b = sample_poisson(30.0, &w, &mut RngStream::new(1, 2, "p").rng());
        assert_eq!(a, b);
        assert!(a.validate().is_ok());
    }
}

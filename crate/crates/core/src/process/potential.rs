use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Pair potential `v(r)`; zero at and beyond [`PairPotential::range`].
#[derive(Clone, Debug, PartialEq)]
pub enum PairPotential {
    /// Piecewise-linear table, constant before the first knot and after the
    /// last one, cut to zero at `r_max`. `+∞` entries act as a hard core.
    Table { r: Vec<f64>, v: Vec<f64>, r_max: f64 },
    /// `v = strength` below `radius`.
    Strauss { strength: f64, radius: f64 },
    HardCore { radius: f64 },
}

impl PairPotential {
    pub fn table(r: Vec<f64>, v: Vec<f64>, r_max: f64) -> Result<Self> {
        let p = PairPotential::Table { r, v, r_max };
        p.validate()?;
        Ok(p)
    }

    /// Structural checks give `InvalidSpec`; potentials that are not bounded
    /// below give `RejectedSpec`.
    pub fn validate(&self) -> Result<()> {
        match self {
            PairPotential::Table { r, v, r_max } => {
                if r.is_empty() || r.len() != v.len() {
                    return Err(Error::InvalidSpec(format!(
                        "potential table needs matching nonempty columns ({} radii, {} values)",
                        r.len(),
                        v.len()
                    )));
                }
                if !(r_max.is_finite() && *r_max > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "potential cutoff r_max must be positive and finite, got {r_max}"
                    )));
                }
                if r.iter().any(|x| !x.is_finite() || *x < 0.0) || r.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidSpec("potential radii must be finite, >= 0 and increasing".into()));
                }
                if let Some(bad) = v.iter().find(|x| x.is_nan() || **x == f64::NEG_INFINITY) {
                    return Err(Error::RejectedSpec(format!("potential value {bad} is not bounded below")));
                }
                Ok(())
            }
            PairPotential::Strauss { strength, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidSpec(format!("interaction radius must be positive, got {radius}")));
                }
                if strength.is_nan() || *strength < 0.0 {
                    return Err(Error::RejectedSpec(format!(
                        "attractive Strauss strength {strength} makes the model unstable"
                    )));
                }
                Ok(())
            }
            PairPotential::HardCore { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidSpec(format!("hard-core radius must be positive, got {radius}")));
                }
                Ok(())
            }
        }
    }

    pub fn range(&self) -> f64 {
        match self {
            PairPotential::Table { r_max, .. } => *r_max,
            PairPotential::Strauss { radius, .. } | PairPotential::HardCore { radius } => *radius,
        }
    }

    pub fn eval(&self, d: f64) -> f64 {
        if d >= self.range() {
            return 0.0;
        }
        match self {
            PairPotential::Strauss { strength, .. } => *strength,
            PairPotential::HardCore { .. } => f64::INFINITY,
            PairPotential::Table { r, v, .. } => {
                if d <= r[0] {
                    return v[0];
                }
                let k = r.partition_point(|&x| x <= d);
                if k == r.len() {
                    return v[k - 1];
                }
                let (r0, r1, v0, v1) = (r[k - 1], r[k], v[k - 1], v[k]);
                if v0.is_infinite() || v1.is_infinite() {
                    return f64::INFINITY;
                }
                v0 + (v1 - v0) * (d - r0) / (r1 - r0)
            }
        }
    }

    pub fn min_value(&self) -> f64 {
        match self {
            PairPotential::Table { v, .. } => v.iter().copied().fold(0.0, f64::min),
            PairPotential::Strauss { strength, .. } => strength.min(0.0),
            PairPotential::HardCore { .. } => 0.0,
        }
    }

    /// A constant `C` with `-Σ v(|x - y|) <= C` for every configuration, when
    /// one is known: zero for nonnegative potentials.
    pub fn local_stability_constant(&self) -> Option<f64> {
        if self.min_value() >= 0.0 {
            Some(0.0)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn table_interpolation_and_cutoff() {
        let p = PairPotential::table(vec![0.0, 1.0, 2.0], vec![4.0, 2.0, 1.0], 2.5).unwrap();
        assert_eq!(p.eval(0.5), 3.0);
        assert_eq!(p.eval(2.2), 1.0);
        assert_eq!(p.eval(2.5), 0.0);
        let hc = PairPotential::table(vec![0.0, 0.5], vec![f64::INFINITY, 1.0], 1.0).unwrap();
        assert_eq!(hc.eval(0.2), f64::INFINITY);
    }

    #[test]
    fn rejects_unbounded_tables() {
        let e = PairPotential::table(vec![0.0, 1.0], vec![f64::NEG_INFINITY, 0.0], 1.0);
        assert!(matches!(e, Err(Error::RejectedSpec(_))));
        let e = PairPotential::table(vec![0.0, 1.0], vec![1.0, 0.0], f64::INFINITY);
        assert!(matches!(e, Err(Error::InvalidSpec(_))));
        let s = PairPotential::Strauss { strength: -1.0, radius: 1.0 };
        assert!(matches!(s.validate(), Err(Error::RejectedSpec(_))));
    }
}

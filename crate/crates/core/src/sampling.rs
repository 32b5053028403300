//! Seeded sample points inside a chart's domain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpacetimeChart;

/// Axis-aligned coordinate box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRegion {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl SampleRegion {
    /// Default box for a chart: `t` in [-1, 1], `r` in [1.5, 6],
    /// `theta` in [0.1, pi - 0.1], `phi` in [0, 2 pi) on spherical charts,
    /// and `[-1, 1]` per axis elsewhere.
    pub fn default_for(chart: &SpacetimeChart) -> Self {
        if chart.is_spherical() {
            Self {
                lo: [-1.0, 1.5, 0.1, 0.0],
                hi: [1.0, 6.0, std::f64::consts::PI - 0.1, std::f64::consts::TAU],
            }
        } else {
            Self {
                lo: [-1.0; 4],
                hi: [1.0; 4],
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..4 {
            if !(self.lo[k].is_finite() && self.hi[k].is_finite() && self.lo[k] <= self.hi[k]) {
                return Err(Error::InvalidScenario(format!(
                    "sample region axis {k} is empty: [{}, {}]",
                    self.lo[k], self.hi[k]
                )));
            }
        }
        Ok(())
    }
}

/// `n` points drawn uniformly from `region`, rejecting points outside the
/// chart's domain or where the tetrad degenerates.
pub fn sample_points(chart: &SpacetimeChart, region: &SampleRegion, n: usize, seed: u64) -> Result<Vec<[f64; 4]>> {
    region.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let budget = 1000 * n.max(1);
    let mut tries = 0;
    while out.len() < n {
        if tries == budget {
            return Err(Error::InvalidScenario(format!(
                "could not draw {n} points inside the domain of `{}` from the sample region",
                chart.name
            )));
        }
        tries += 1;
        let x: [f64; 4] = std::array::from_fn(|k| {
            if region.lo[k] == region.hi[k] {
                region.lo[k]
            } else {
                rng.random_range(region.lo[k]..region.hi[k])
            }
        });
        if chart.check_point(&x).is_ok() {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_domain() {
        let chart = SpacetimeChart::preset("schwarzschild").unwrap();
        let region = SampleRegion {
            lo: [0.0, 0.5, 0.1, 0.0],
            hi: [1.0, 3.0, 3.0, 6.0],
        };
        let a = sample_points(&chart, &region, 25, 7).unwrap();
        assert_eq!(a, sample_points(&chart, &region, 25, 7).unwrap());
        assert_ne!(a, sample_points(&chart, &region, 25, 8).unwrap());
        assert!(a.iter().all(|x| x[1] > 1.0));
    }

    #[test]
    fn empty_domain_is_reported() {
        let chart = SpacetimeChart::preset("schwarzschild").unwrap();
        let region = SampleRegion {
            lo: [0.0, 0.1, 1.0, 0.0],
            hi: [0.0, 0.5, 1.0, 0.0],
        };
        assert!(matches!(
            sample_points(&chart, &region, 3, 0),
            Err(Error::InvalidScenario(_))
        ));
    }
}

//! Area normalization of a fitted signal into a quasi-distribution, and its
//! moments.
//!
//! Positions are bin indices `1..=K` with unit spacing. The physical mapping
//! places bin `k` at the center `v_min + (k - 1/2) * xi`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fitting::SampledSignal;

/// Trapezoid-rule area under `values` on a unit-spaced grid.
pub fn trapezoid_area(values: &[f64]) -> f64 {
    values.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum()
}

/// Area enclosed by the resampled curve and the x-axis.
pub fn curve_area(signal: &SampledSignal) -> f64 {
    trapezoid_area(&signal.values)
}

/// A fitted signal scaled to unit area.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuasiDistribution {
    /// Adjustment factor: reciprocal of the clipped signal's area.
    pub gamma: f64,
    /// `gamma` times the clipped signal, one value per bin.
    pub density: Vec<f64>,
    /// Sum of the magnitudes of the negative signal values removed by
    /// clipping, in signal units.
    pub negative_mass: f64,
    pub v_min: f64,
    pub xi: f64,
}

impl QuasiDistribution {
    /// Attaches the magnitude range the bins came from.
    pub fn with_bin_mapping(mut self, v_min: f64, xi: f64) -> Self {
        self.v_min = v_min;
        self.xi = xi;
        self
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    /// Trapezoid integral of the density; one up to rounding.
    pub fn integral(&self) -> f64 {
        trapezoid_area(&self.density)
    }
}

/// Clips negative values to zero and rescales to unit trapezoid area.
pub fn normalize_values(values: &[f64]) -> Result<QuasiDistribution> {
    let mut negative_mass = 0.0;
    let clipped: Vec<f64> = values
        .iter()
        .map(|&v| {
            if v < 0.0 {
                negative_mass -= v;
                0.0
            } else {
                v
            }
        })
        .collect();
    let area = trapezoid_area(&clipped);
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::NonPositiveArea);
    }
    let gamma = 1.0 / area;
    Ok(QuasiDistribution {
        gamma,
        density: clipped.into_iter().map(|v| v * gamma).collect(),
        negative_mass,
        v_min: 0.0,
        xi: 1.0,
    })
}

pub fn normalize(signal: &SampledSignal) -> Result<QuasiDistribution> {
    normalize_values(&signal.values)
}

/// Mean and variance of a quasi-distribution read as point masses at the
/// bin positions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Moments {
    pub mean_index: f64,
    pub variance_index: f64,
    pub mean_physical: f64,
    pub variance_physical: f64,
    /// Population variance of the density values themselves, ignoring
    /// position. Diagnostic only.
    pub value_variance: f64,
}

pub fn moments(qd: &QuasiDistribution) -> Moments {
    let total: f64 = qd.density.iter().sum();
    let position = |k: usize| (k + 1) as f64;
    let mean_index = qd
        .density
        .iter()
        .enumerate()
        .map(|(k, &p)| p / total * position(k))
        .sum::<f64>();
    let variance_index = qd
        .density
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let dx = position(k) - mean_index;
            p / total * dx * dx
        })
        .sum::<f64>()
        .max(0.0);

    let n = qd.density.len() as f64;
    let value_mean = total / n;
    let value_variance = qd
        .density
        .iter()
        .map(|&p| (p - value_mean) * (p - value_mean))
        .sum::<f64>()
        / n;

    Moments {
        mean_index,
        variance_index,
        mean_physical: qd.v_min + (mean_index - 0.5) * qd.xi,
        variance_physical: variance_index * qd.xi * qd.xi,
        value_variance,
    }
}

/// Variance over bin indices; the ranking criterion.
pub fn distribution_variance(qd: &QuasiDistribution) -> f64 {
    moments(qd).variance_index
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn signal(values: Vec<f64>) -> SampledSignal {
        SampledSignal { n_samples: 0, values }
    }

    #[test]
    fn area_examples() {
        assert_eq!(curve_area(&signal(vec![2.0; 350])), 698.0);
        assert_eq!(curve_area(&signal(vec![0.0; 350])), 0.0);
        let s = [0.5, 1.0, 3.0, 2.0];
        let scaled: Vec<f64> = s.iter().map(|v| v * 4.0).collect();
        assert_eq!(trapezoid_area(&scaled), 4.0 * trapezoid_area(&s));
    }

    #[test]
    fn normalize_constant() {
        let qd = normalize(&signal(vec![2.0; 350])).unwrap();
        assert_eq!(qd.gamma, 1.0 / 698.0);
        for &p in &qd.density {
            assert!((p - 1.0 / 349.0).abs() < 1e-16);
        }
        assert!((qd.integral() - 1.0).abs() < 1e-12);
        let again = normalize_values(&qd.density).unwrap();
        assert!((again.gamma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clipping_records_negative_mass() {
        let qd = normalize_values(&[-0.5, 1.0, 1.0, -0.25]).unwrap();
        assert_eq!(qd.negative_mass, 0.75);
        assert_eq!(qd.density[0], 0.0);
        assert_eq!(qd.density[3], 0.0);
        assert!((qd.integral() - 1.0).abs() < 1e-15);
        assert_eq!(normalize_values(&[-1.0, -2.0, 0.0]), Err(Error::NonPositiveArea));
    }

    #[test]
    fn degenerate_and_uniform_variance() {
        let mut spike = vec![0.0; 10];
        spike[4] = 3.0;
        let qd = QuasiDistribution {
            gamma: 1.0,
            density: spike,
            negative_mass: 0.0,
            v_min: 0.0,
            xi: 1.0,
        };
        assert_eq!(distribution_variance(&qd), 0.0);
        let uniform = normalize_values(&[1.0; 350]).unwrap();
        assert!((distribution_variance(&uniform) - 10208.25).abs() < 1e-9);
    }

    #[test]
    fn physical_mapping() {
        let qd = normalize_values(&[1.0, 0.0, 1.0]).unwrap().with_bin_mapping(10.0, 0.5);
        let m = moments(&qd);
        assert!((m.mean_index - 2.0).abs() < 1e-15);
        assert!((m.variance_index - 1.0).abs() < 1e-15);
        assert!((m.mean_physical - 10.75).abs() < 1e-15);
        assert!((m.variance_physical - 0.25).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn scale_invariance(values in proptest::collection::vec(0.0f64..1.0, 2..400), a in 1e-3f64..1e3) {
            prop_assume!(trapezoid_area(&values) > 1e-6);
            let base = normalize_values(&values).unwrap();
            let scaled: Vec<f64> = values.iter().map(|v| v * a).collect();
            let other = normalize_values(&scaled).unwrap();
            for (p, q) in base.density.iter().zip(&other.density) {
                prop_assert!((p - q).abs() <= 1e-12 * p.abs().max(1e-300) + 1e-15);
            }
            prop_assert!((distribution_variance(&base) - distribution_variance(&other)).abs()
                <= 1e-9 * distribution_variance(&base).max(1.0));
        }

        #[test]
        fn variance_bounds(values in proptest::collection::vec(-0.2f64..1.0, 2..400)) {
            if let Ok(qd) = normalize_values(&values) {
                prop_assert!((qd.integral() - 1.0).abs() <= 1e-9);
                let k = values.len() as f64;
                let v = distribution_variance(&qd);
                prop_assert!(v >= 0.0 && v <= (k - 1.0) * (k - 1.0) / 4.0 + 1e-9);
            }
        }
    }
}

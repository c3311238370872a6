//! Equal-width histogram distribution of deformation magnitudes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::ingest::DeformationMagnitudes;

/// Bin count used when none is given.
pub const DEFAULT_BINS: usize = 350;

/// Whether exact-zero magnitudes take part in the histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ZeroPolicy {
    #[default]
    Include,
    Exclude,
}

impl ZeroPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            ZeroPolicy::Include => "include",
            ZeroPolicy::Exclude => "exclude",
        }
    }
}

impl core::str::FromStr for ZeroPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "include" => Ok(ZeroPolicy::Include),
            "exclude" => Ok(ZeroPolicy::Exclude),
            other => Err(Error::UnknownZeroPolicy(other.into())),
        }
    }
}

/// Fraction of counted nodes per magnitude bin.
///
/// Bin `k` (zero-based here) covers `[v_min + k*xi, v_min + (k+1)*xi)`; the
/// last bin is closed on the right so `v_max` is counted.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HistogramDistribution {
    pub v_min: f64,
    pub v_max: f64,
    /// Bin width.
    pub xi: f64,
    pub probs: Vec<f64>,
    /// Node count N_T of the source field (0 for curve-generated histograms).
    pub n_total: usize,
    /// Number of magnitudes that were binned.
    pub n_counted: usize,
    /// Zero-deformation share of the whole field, independent of the policy.
    pub zero_fraction: f64,
    pub zero_policy: ZeroPolicy,
}

impl HistogramDistribution {
    pub fn k_bins(&self) -> usize {
        self.probs.len()
    }

    /// Half-open magnitude interval of zero-based bin `k`.
    pub fn bin_edges(&self, k: usize) -> (f64, f64) {
        let lo = self.v_min + k as f64 * self.xi;
        let hi = if k + 1 == self.k_bins() {
            self.v_max
        } else {
            self.v_min + (k + 1) as f64 * self.xi
        };
        (lo, hi)
    }
}

/// Zero-based bin holding magnitude `v`.
#[inline]
pub(crate) fn bin_index(v: f64, v_min: f64, v_max: f64, k_bins: usize) -> usize {
    let scaled = (v - v_min) / (v_max - v_min) * k_bins as f64;
    (libm::floor(scaled) as usize).min(k_bins - 1)
}

/// Bins magnitudes into `k_bins` equal parts of `[v_min, v_max]`.
pub fn build_histogram(
    mags: &DeformationMagnitudes,
    k_bins: usize,
    zero_policy: ZeroPolicy,
) -> Result<HistogramDistribution> {
    if k_bins < 2 {
        return Err(Error::TooFewBins(k_bins));
    }
    if mags.is_empty() {
        return Err(Error::EmptyMagnitudes);
    }
    let counted = |v: &&f64| zero_policy == ZeroPolicy::Include || **v != 0.0;
    let (v_min, v_max, n_counted) = match zero_policy {
        ZeroPolicy::Include => (mags.v_min, mags.v_max, mags.len()),
        ZeroPolicy::Exclude => {
            let n = mags.len() - mags.zero_count;
            if n == 0 {
                return Err(Error::NoNonzeroMagnitudes);
            }
            let lo = mags.values.iter().filter(counted).fold(f64::INFINITY, |a, &v| a.min(v));
            (lo, mags.v_max, n)
        }
    };
    if v_max <= v_min {
        return Err(Error::DegenerateRange(v_min));
    }

    let mut counts = vec![0usize; k_bins];
    for &v in mags.values.iter().filter(counted) {
        counts[bin_index(v, v_min, v_max, k_bins)] += 1;
    }
    let probs = counts
        .iter()
        .map(|&c| c as f64 / n_counted as f64)
        .collect();

    Ok(HistogramDistribution {
        v_min,
        v_max,
        xi: (v_max - v_min) / k_bins as f64,
        probs,
        n_total: mags.len(),
        n_counted,
        zero_fraction: mags.zero_fraction(),
        zero_policy,
    })
}

/// Histogram as planar points `(k, P_k)` with one-based `k`.
pub fn histogram_points(hist: &HistogramDistribution) -> Vec<Point2> {
    hist.probs
        .iter()
        .enumerate()
        .map(|(k, &p)| Point2::new((k + 1) as f64, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mags(values: &[f64]) -> DeformationMagnitudes {
        DeformationMagnitudes::from_values(values.to_vec()).unwrap()
    }

    #[test]
    fn four_values_four_bins() {
        let h = build_histogram(&mags(&[0.0, 1.0, 2.0, 4.0]), 4, ZeroPolicy::Include).unwrap();
        assert_eq!(h.xi, 1.0);
        assert_eq!(h.probs, [0.25; 4]);
        assert_eq!(h.zero_fraction, 0.25);
        assert_eq!(h.n_counted, 4);
    }

    #[test]
    fn exclude_policy_drops_zeros_but_keeps_fraction() {
        let h = build_histogram(&mags(&[0.0, 0.0, 1.0, 2.0, 3.0]), 2, ZeroPolicy::Exclude).unwrap();
        assert_eq!(h.v_min, 1.0);
        assert_eq!(h.n_counted, 3);
        assert_eq!(h.zero_fraction, 0.4);
        assert!((h.probs[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((h.probs[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            build_histogram(&mags(&[2.0, 2.0, 2.0]), 350, ZeroPolicy::Include),
            Err(Error::DegenerateRange(2.0))
        );
        assert_eq!(
            build_histogram(&mags(&[0.0, 0.0]), 350, ZeroPolicy::Exclude),
            Err(Error::NoNonzeroMagnitudes)
        );
        assert_eq!(
            build_histogram(&mags(&[0.0, 5.0, 5.0]), 350, ZeroPolicy::Exclude),
            Err(Error::DegenerateRange(5.0))
        );
        assert_eq!(
            build_histogram(&mags(&[0.0, 1.0]), 1, ZeroPolicy::Include),
            Err(Error::TooFewBins(1))
        );
    }

    #[test]
    fn points_use_one_based_index() {
        let h = build_histogram(&mags(&[0.0, 1.0, 2.0, 4.0]), 4, ZeroPolicy::Include).unwrap();
        let pts = histogram_points(&h);
        assert_eq!(
            pts,
            [
                Point2::new(1.0, 0.25),
                Point2::new(2.0, 0.25),
                Point2::new(3.0, 0.25),
                Point2::new(4.0, 0.25)
            ]
        );
    }

    #[test]
    fn last_bin_is_closed() {
        let h = build_histogram(&mags(&[0.0, 10.0]), 350, ZeroPolicy::Include).unwrap();
        assert_eq!(h.probs[0], 0.5);
        assert_eq!(h.probs[349], 0.5);
        assert_eq!(h.bin_edges(349).1, 10.0);
    }

    fn magnitude_list() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(prop_oneof![1 => Just(0.0), 9 => 0.0f64..100.0], 2..400)
            .prop_filter("nondegenerate", |v| {
                v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    > v.iter().cloned().fold(f64::INFINITY, f64::min)
            })
    }

    proptest! {
        #[test]
        fn partition_and_unit_sum(values in magnitude_list(), k in 2usize..400) {
            let h = build_histogram(&mags(&values), k, ZeroPolicy::Include).unwrap();
            let counts: usize = h.probs.iter().map(|p| libm::round(p * values.len() as f64) as usize).sum();
            prop_assert_eq!(counts, values.len());
            let s: f64 = h.probs.iter().sum();
            prop_assert!((s - 1.0).abs() <= 1e-12);
            prop_assert!(h.probs.iter().all(|&p| (0.0..=1.0).contains(&p)));
            prop_assert_eq!(histogram_points(&h).len(), k);
        }

        #[test]
        fn scale_invariant(values in magnitude_list(), c in 1e-3f64..1e3) {
            let a = build_histogram(&mags(&values), 64, ZeroPolicy::Include).unwrap();
            let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
            let b = build_histogram(&mags(&scaled), 64, ZeroPolicy::Include).unwrap();
            prop_assert_eq!(a.probs, b.probs);
        }
    }
}

//! Per-case results and the cross-case ranking.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fitting::{FitOptions, OmegaGrid};
use crate::geom::Point2;
use crate::histogram::ZeroPolicy;

/// Diagnostics attached to a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Warning {
    /// The design matrix was rank deficient; controls are minimum-norm.
    RankDeficient,
    /// Sampled curve x-coordinates fold back.
    NonMonotone,
    /// Negative fitted values were clipped before normalization.
    NegativeClipped,
}

impl Warning {
    pub fn as_str(self) -> &'static str {
        match self {
            Warning::RankDeficient => "rank_deficient",
            Warning::NonMonotone => "non_monotone",
            Warning::NegativeClipped => "negative_clipped",
        }
    }
}

/// How the segmentation point is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OmegaMode {
    Auto(OmegaGrid),
    Fixed(f64),
}

impl Default for OmegaMode {
    fn default() -> Self {
        OmegaMode::Auto(OmegaGrid::default())
    }
}

/// Settings echoed into every report.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfigEcho {
    pub k_bins: usize,
    pub degree: usize,
    pub samples: usize,
    pub omega: OmegaMode,
    pub zero_policy: ZeroPolicy,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitReport {
    pub case_id: String,
    pub n_total: usize,
    pub zero_fraction: f64,
    pub omega: f64,
    pub mse: f64,
    pub gamma: f64,
    /// Variance over bin indices; the ranking key.
    pub variance: f64,
    pub mean: f64,
    pub variance_physical: f64,
    pub mean_physical: f64,
    pub value_variance: f64,
    pub negative_mass: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub xi: f64,
    pub warnings: Vec<Warning>,
    pub config: ConfigEcho,
    pub controls: Vec<Point2>,
    /// Resampled fitted signal, one value per bin.
    pub signal: Vec<f64>,
    /// Normalized quasi-distribution, one value per bin.
    pub density: Vec<f64>,
}

impl FitReport {
    pub fn warnings_joined(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.warnings.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            out.push_str(w.as_str());
        }
        out
    }
}

impl FitOptions {
    pub(crate) fn echo(&self, k_bins: usize, omega: OmegaMode, zero_policy: ZeroPolicy) -> ConfigEcho {
        ConfigEcho {
            k_bins,
            degree: self.degree,
            samples: self.samples_for(k_bins),
            omega,
            zero_policy,
        }
    }
}

/// Reports sorted by ascending variance; the first entry is the
/// recommended design.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCases {
    pub reports: Vec<FitReport>,
}

impl RankedCases {
    pub fn best(&self) -> &FitReport {
        &self.reports[0]
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }
}

fn by_variance(a: &FitReport, b: &FitReport) -> Ordering {
    a.variance
        .total_cmp(&b.variance)
        .then_with(|| a.case_id.cmp(&b.case_id))
}

pub fn rank_cases(mut reports: Vec<FitReport>) -> Result<RankedCases> {
    if reports.is_empty() {
        return Err(Error::EmptyRanking);
    }
    reports.sort_by(by_variance);
    Ok(RankedCases { reports })
}

//! End-to-end evaluation of one design case.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fitting::{fit_curve, pick_best, FitOptions, FittedCurve, OmegaGrid, OmegaSelection};
use crate::histogram::{build_histogram, HistogramDistribution, ZeroPolicy, DEFAULT_BINS};
use crate::ingest::{field_magnitudes, DisplacementField};
use crate::quasi::{moments, normalize, QuasiDistribution};
use crate::report::{FitReport, OmegaMode, Warning};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub k_bins: usize,
    pub fit: FitOptions,
    pub omega: OmegaMode,
    pub zero_policy: ZeroPolicy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k_bins: DEFAULT_BINS,
            fit: FitOptions::default(),
            omega: OmegaMode::default(),
            zero_policy: ZeroPolicy::Include,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_bins < 2 {
            return Err(Error::TooFewBins(self.k_bins));
        }
        if self.fit.degree < 1 {
            return Err(Error::InvalidDegree(self.fit.degree));
        }
        let cols = 2 * self.fit.degree + 1;
        if self.k_bins < cols {
            return Err(Error::Underdetermined {
                rows: self.k_bins,
                cols,
            });
        }
        if self.fit.samples == Some(0) {
            return Err(Error::ZeroSamples);
        }
        match self.omega {
            OmegaMode::Auto(grid) => grid.validate(),
            OmegaMode::Fixed(w) if w > 0.0 && w < 1.0 => Ok(()),
            OmegaMode::Fixed(w) => Err(Error::InvalidOmega(w)),
        }
    }

    /// Candidate segmentation points in grid order.
    pub fn omegas(&self) -> Result<Vec<f64>> {
        match self.omega {
            OmegaMode::Auto(grid) => grid.values(),
            OmegaMode::Fixed(w) => OmegaGrid::single(w).values(),
        }
    }
}

/// Everything computed for one case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseEvaluation {
    pub report: FitReport,
    pub histogram: HistogramDistribution,
    pub fit: FittedCurve,
    pub quasi: QuasiDistribution,
}

/// Grid search strategy: given the histogram, the candidate ω values and
/// the fit options, return the selected fit.
pub trait OmegaSearch {
    fn search(&self, hist: &HistogramDistribution, omegas: &[f64], opts: &FitOptions) -> Result<OmegaSelection>;
}

/// Evaluates candidates one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl OmegaSearch for Sequential {
    fn search(&self, hist: &HistogramDistribution, omegas: &[f64], opts: &FitOptions) -> Result<OmegaSelection> {
        pick_best(omegas.iter().map(|&w| fit_curve(hist, w, opts)))
    }
}

pub fn evaluate_case(field: &DisplacementField, config: &PipelineConfig) -> Result<CaseEvaluation> {
    evaluate_case_with(field, config, &Sequential)
}

pub fn evaluate_case_with<S: OmegaSearch + ?Sized>(
    field: &DisplacementField,
    config: &PipelineConfig,
    search: &S,
) -> Result<CaseEvaluation> {
    let run = || {
        config.validate()?;
        let mags = field_magnitudes(field);
        let hist = build_histogram(&mags, config.k_bins, config.zero_policy)?;
        evaluate_histogram(field.case_id(), hist, config, search)
    };
    run().map_err(|e| e.in_case(field.case_id()))
}

/// Fits, normalizes and scores an already-built histogram.
pub fn evaluate_histogram<S: OmegaSearch + ?Sized>(
    case_id: &str,
    hist: HistogramDistribution,
    config: &PipelineConfig,
    search: &S,
) -> Result<CaseEvaluation> {
    let run = || {
        config.validate()?;
        let omegas = config.omegas()?;
        let selection = search.search(&hist, &omegas, &config.fit)?;
        let fit = selection.fit;
        let quasi = normalize(&fit.signal)?.with_bin_mapping(hist.v_min, hist.xi);
        let m = moments(&quasi);

        let mut warnings = Vec::new();
        if fit.condition_flag {
            warnings.push(Warning::RankDeficient);
        }
        if fit.non_monotone {
            warnings.push(Warning::NonMonotone);
        }
        if quasi.negative_mass > 0.0 {
            warnings.push(Warning::NegativeClipped);
        }

        let report = FitReport {
            case_id: String::from(case_id),
            n_total: hist.n_total,
            zero_fraction: hist.zero_fraction,
            omega: fit.omega(),
            mse: fit.mse,
            gamma: quasi.gamma,
            variance: m.variance_index,
            mean: m.mean_index,
            variance_physical: m.variance_physical,
            mean_physical: m.mean_physical,
            value_variance: m.value_variance,
            negative_mass: quasi.negative_mass,
            v_min: hist.v_min,
            v_max: hist.v_max,
            xi: hist.xi,
            warnings,
            config: config.fit.echo(config.k_bins, config.omega, config.zero_policy),
            controls: fit.curve.controls().to_vec(),
            signal: fit.signal.values.clone(),
            density: quasi.density.clone(),
        };
        Ok(CaseEvaluation {
            report,
            histogram: hist.clone(),
            fit,
            quasi,
        })
    };
    run().map_err(|e: Error| e.in_case(case_id))
}

//! Quasi-distribution appraisal of finite element deformation results.
//!
//! A design case's nodal displacements are reduced to 1-norm magnitudes and
//! binned into an equal-width histogram. A two-segment piecewise Bézier
//! curve is fitted to the histogram by least squares, with the segmentation
//! point chosen by grid search on the resampled mean squared error. The
//! resampled curve is scaled to unit area and read as a density; its
//! variance over bin positions scores the case, and the case with the
//! smallest variance ranks first.
//!
//! The crate is `no_std` with `alloc`. File formats, parallel search and the
//! command line live in the `qda` crate.
#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod bezier;
pub mod error;
pub mod fitting;
mod geom;
pub mod histogram;
pub mod ingest;
mod linalg;
mod math;
pub mod pipeline;
pub mod quasi;
pub mod report;
pub mod synth;

pub use bezier::{basis_eval, basis_row, curve_eval, curve_sample, BasisConfig, ControlPolygon, PiecewiseBezierCurve};
pub use error::{Error, Result};
pub use fitting::{
    assemble_design_matrix, chord_length_parameterize, fit_curve, mse, resample_to_signal, select_omega,
    solve_least_squares, DesignMatrix, FitOptions, FittedCurve, OmegaGrid, OmegaSelection, ParameterSequence,
    SampledSignal,
};
pub use geom::Point2;
pub use histogram::{build_histogram, histogram_points, HistogramDistribution, ZeroPolicy};
pub use ingest::{displacement_norm, field_magnitudes, DeformationMagnitudes, DisplacementField, NodeDisplacement};
pub use linalg::{lstsq, LstsqSolution};
pub use pipeline::{evaluate_case, evaluate_case_with, evaluate_histogram, CaseEvaluation, OmegaSearch, PipelineConfig, Sequential};
pub use quasi::{curve_area, distribution_variance, moments, normalize, Moments, QuasiDistribution};
pub use report::{rank_cases, ConfigEcho, FitReport, OmegaMode, RankedCases, Warning};

//! Least-squares fitting of a piecewise Bézier curve to a histogram, the
//! resampled standard signal, its mean squared error, and the grid search
//! for the segmentation point.

use alloc::vec;
use alloc::vec::Vec;

use crate::bezier::{fill_basis_row, BasisConfig, ControlPolygon, PiecewiseBezierCurve, DEFAULT_DEGREE};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::histogram::{histogram_points, HistogramDistribution};
use crate::linalg::lstsq;

/// Curve samples per histogram bin used when no sample count is given.
pub const SAMPLES_PER_BIN: usize = 16;

/// Data parameters `t_k`, one per point; starts at 0 and ends at 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParameterSequence {
    pub ts: Vec<f64>,
}

impl ParameterSequence {
    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }
}

/// Cumulative chord-length parameters of `points`.
pub fn chord_length_parameterize(points: &[Point2]) -> Result<ParameterSequence> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if points.iter().all(|p| *p == points[0]) {
        return Err(Error::ZeroChordLength);
    }
    let mut ts = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    ts.push(0.0);
    for (j, pair) in points.windows(2).enumerate() {
        let chord = (pair[1] - pair[0]).hypot();
        if chord == 0.0 {
            return Err(Error::CoincidentPoints(j));
        }
        acc += chord;
        ts.push(acc);
    }
    let total = acc;
    for t in ts.iter_mut() {
        *t /= total;
    }
    *ts.last_mut().unwrap() = 1.0;
    Ok(ParameterSequence { ts })
}

/// Row-major matrix of basis values, `phi[k][i] = N_i(t_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DesignMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.cols..(k + 1) * self.cols]
    }

    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.data[k * self.cols + i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `phi^T v` for a length-`rows` vector.
    pub fn transpose_mul(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (k, &vk) in v.iter().enumerate() {
            for (o, &p) in out.iter_mut().zip(self.row(k)) {
                *o += p * vk;
            }
        }
        out
    }

    /// `phi x` for a length-`cols` vector.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|k| self.row(k).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

pub fn assemble_design_matrix(ts: &ParameterSequence, config: &BasisConfig) -> Result<DesignMatrix> {
    let rows = ts.len();
    let cols = config.basis_count();
    if rows < cols {
        return Err(Error::Underdetermined { rows, cols });
    }
    let mut data = vec![0.0; rows * cols];
    for (row, &t) in data.chunks_exact_mut(cols).zip(&ts.ts) {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ParameterOutOfRange(t));
        }
        fill_basis_row(config, t, row);
    }
    Ok(DesignMatrix { rows, cols, data })
}

/// Control points from a least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresFit {
    pub controls: ControlPolygon,
    pub rank: usize,
    /// Set when the design matrix is numerically rank deficient; the
    /// controls are then the minimum-norm solution.
    pub condition_flag: bool,
}

/// Solves `phi C = points` in the least-squares sense, one coordinate at a
/// time with the shared matrix.
pub fn solve_least_squares(phi: &DesignMatrix, points: &[Point2]) -> Result<LeastSquaresFit> {
    if points.len() != phi.rows {
        return Err(Error::DimensionMismatch {
            expected: phi.rows,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    let sol = lstsq(&phi.data, phi.rows, phi.cols, &[&xs, &ys])?;
    let controls = sol.columns[0]
        .iter()
        .zip(&sol.columns[1])
        .map(|(&x, &y)| Point2::new(x, y))
        .collect();
    Ok(LeastSquaresFit {
        controls: ControlPolygon::new(controls)?,
        rank: sol.rank,
        condition_flag: sol.rank_deficient(phi.cols),
    })
}

/// The curve read back onto bin positions `1..=K`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampledSignal {
    pub values: Vec<f64>,
    /// Number of uniform parameter intervals the curve was sampled with.
    pub n_samples: usize,
}

impl SampledSignal {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// For each bin `k = 1..=K`, the y of the sample with the largest x strictly
/// below `k` (the last such sample in parameter order on ties). No sample can
/// lie left of bin 1 when the curve starts there, so bin 1 falls back to the
/// first sample.
pub fn resample_to_signal(samples: &[Point2], k_bins: usize) -> Result<SampledSignal> {
    if samples.is_empty() {
        return Err(Error::ZeroSamples);
    }
    let monotone = samples.windows(2).all(|w| w[0].x <= w[1].x);
    let order: Vec<usize> = if monotone {
        (0..samples.len()).collect()
    } else {
        let mut idx: Vec<usize> = (0..samples.len()).collect();
        idx.sort_by(|&a, &b| samples[a].x.total_cmp(&samples[b].x));
        idx
    };
    let mut values = Vec::with_capacity(k_bins);
    for k in 1..=k_bins {
        let bound = k as f64;
        let below = order.partition_point(|&i| samples[i].x < bound);
        let y = if below > 0 {
            samples[order[below - 1]].y
        } else if k == 1 {
            samples[0].y
        } else {
            return Err(Error::UncoveredBin(k));
        };
        values.push(y);
    }
    Ok(SampledSignal {
        values,
        n_samples: samples.len() - 1,
    })
}

/// Mean squared deviation of two equal-length signals.
pub fn mse_values(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.len() as f64)
}

pub fn mse(signal: &SampledSignal, hist: &HistogramDistribution) -> Result<f64> {
    mse_values(&signal.values, &hist.probs)
}

/// True when sampled x steps backwards by more than `1e-9 * K`.
pub fn is_non_monotone(samples: &[Point2], k_bins: usize) -> bool {
    let slack = 1e-9 * k_bins as f64;
    samples.windows(2).any(|w| w[1].x < w[0].x - slack)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitOptions {
    pub degree: usize,
    /// Uniform parameter intervals for resampling; `None` means 16 per bin.
    pub samples: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            degree: DEFAULT_DEGREE,
            samples: None,
        }
    }
}

impl FitOptions {
    pub fn samples_for(&self, k_bins: usize) -> usize {
        self.samples.unwrap_or(SAMPLES_PER_BIN * k_bins)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedCurve {
    pub curve: PiecewiseBezierCurve,
    pub ts: ParameterSequence,
    pub signal: SampledSignal,
    pub mse: f64,
    pub rank: usize,
    pub condition_flag: bool,
    /// Sampled x-coordinates fold back somewhere along the curve.
    pub non_monotone: bool,
}

impl FittedCurve {
    pub fn omega(&self) -> f64 {
        self.curve.config().omega()
    }

    /// MSE used for ranking grid candidates; flagged fits never win.
    pub fn score(&self) -> f64 {
        if self.condition_flag || !self.mse.is_finite() {
            f64::INFINITY
        } else {
            self.mse
        }
    }
}

/// Fits the histogram points at a fixed segmentation point.
pub fn fit_curve(hist: &HistogramDistribution, omega: f64, opts: &FitOptions) -> Result<FittedCurve> {
    let config = BasisConfig::new(opts.degree, omega)?;
    let points = histogram_points(hist);
    let ts = chord_length_parameterize(&points)?;
    let phi = assemble_design_matrix(&ts, &config)?;
    let lsq = solve_least_squares(&phi, &points)?;
    let curve = PiecewiseBezierCurve::new(config, lsq.controls)?;
    let samples = curve.sample(opts.samples_for(hist.k_bins()))?;
    let signal = resample_to_signal(&samples, hist.k_bins())?;
    let mse = mse(&signal, hist)?;
    Ok(FittedCurve {
        non_monotone: is_non_monotone(&samples, hist.k_bins()),
        curve,
        ts,
        signal,
        mse,
        rank: lsq.rank,
        condition_flag: lsq.condition_flag,
    })
}

/// Inclusive uniform grid of candidate segmentation points.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OmegaGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for OmegaGrid {
    fn default() -> Self {
        OmegaGrid {
            lo: 0.05,
            hi: 0.95,
            step: 0.002,
        }
    }
}

impl OmegaGrid {
    /// A grid holding the single value `omega`.
    pub fn single(omega: f64) -> Self {
        OmegaGrid {
            lo: omega,
            hi: omega,
            step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi < 1.0) {
            return Err(Error::InvalidGrid("bounds must lie inside (0, 1)"));
        }
        if self.hi < self.lo {
            return Err(Error::InvalidGrid("empty grid: hi is below lo"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidGrid("step must be positive"));
        }
        Ok(())
    }

    /// Grid points `lo + i * step` up to `hi` (with a small slack for
    /// rounding in the step count).
    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let span = (self.hi - self.lo) / self.step;
        let count = libm::floor(span + 1e-9) as usize + 1;
        Ok((0..count)
            .map(|i| self.lo + i as f64 * self.step)
            .filter(|&w| w > 0.0 && w < 1.0)
            .collect())
    }
}

/// Grid search outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSelection {
    pub omega: f64,
    pub fit: FittedCurve,
    /// Number of grid points that produced a fit.
    pub evaluated: usize,
}

/// Picks the minimum-score fit from per-candidate results listed in grid
/// order. Ties go to the earlier (smaller) candidate. Candidates whose fit
/// failed are skipped; if all failed the first error is returned.
pub fn pick_best<I>(candidates: I) -> Result<OmegaSelection>
where
    I: IntoIterator<Item = Result<FittedCurve>>,
{
    let mut best: Option<FittedCurve> = None;
    let mut first_err = None;
    let mut evaluated = 0;
    for cand in candidates {
        match cand {
            Ok(fit) => {
                evaluated += 1;
                let better = match &best {
                    None => true,
                    Some(b) => fit.score() < b.score(),
                };
                if better {
                    best = Some(fit);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(fit) => Ok(OmegaSelection {
            omega: fit.omega(),
            fit,
            evaluated,
        }),
        None => Err(first_err.unwrap_or(Error::InvalidGrid("empty grid"))),
    }
}

/// Fits at every grid point and keeps the smallest MSE.
pub fn select_omega(hist: &HistogramDistribution, grid: &OmegaGrid, opts: &FitOptions) -> Result<OmegaSelection> {
    let omegas = grid.values()?;
    pick_best(omegas.into_iter().map(|w| fit_curve(hist, w, opts)))
}

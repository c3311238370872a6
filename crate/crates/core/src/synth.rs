//! Synthetic displacement fields and curve-derived histograms with known
//! ground truth.
//!
//! # Random stream
//!
//! All randomness comes from [`Xoshiro256StarStar`] seeded through
//! SplitMix64: the 64-bit seed is fed to SplitMix64 and its first four
//! outputs become the xoshiro256** state. Derived draws:
//!
//! * `next_f64`: `(next_u64 >> 11) * 2^-53`, in `[0, 1)`.
//! * `next_open01`: `((next_u64 >> 11) + 0.5) * 2^-53`, in `(0, 1)`.
//! * `next_below(n)`: high 64 bits of `next_u64 * n` (128-bit product).
//! * `next_normal`: Box-Muller cosine branch,
//!   `sqrt(-2 ln u1) * cos(2 pi u2)` with `u1`, `u2` from `next_open01`.
//!
//! [`generate_field`] draws, in this order: all `n` magnitudes (node order;
//! any draw `<= 0` is rejected and redrawn), then the zero set by a partial
//! Fisher-Yates shuffle of node positions (`next_below(n - j)` for
//! `j = 0..zeros`), then one `next_u64` per node whose bits 0, 1, 2 flip the
//! signs of `ux`, `uy`, `uz`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bezier::{BasisConfig, ControlPolygon, PiecewiseBezierCurve};
use crate::error::{Error, Result};
use crate::fitting::{resample_to_signal, SAMPLES_PER_BIN};
use crate::geom::Point2;
use crate::histogram::{HistogramDistribution, ZeroPolicy};
use crate::ingest::{DisplacementField, NodeDisplacement};

/// SplitMix64 step; used only for seeding.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// xoshiro256** generator (Blackman and Vigna).
#[derive(Debug, Clone)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Xoshiro256StarStar { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_open01();
        let u2 = self.next_open01();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }
}

/// One Gaussian component of a mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub mean: f64,
    pub sigma: f64,
    pub weight: f64,
}

/// Distribution of the nonzero node magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum MagnitudeLaw {
    Uniform { a: f64, b: f64 },
    /// Truncated at zero by rejection.
    GaussianMixture(Vec<Component>),
    LogNormal { mu: f64, sigma: f64 },
}

impl MagnitudeLaw {
    fn validate(&self) -> Result<()> {
        match self {
            MagnitudeLaw::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a >= 0.0 && b > a) {
                    return Err(Error::InvalidSynthSpec("uniform law needs 0 <= a < b"));
                }
            }
            MagnitudeLaw::GaussianMixture(comps) => {
                if comps.is_empty() {
                    return Err(Error::InvalidSynthSpec("mixture needs at least one component"));
                }
                if comps.iter().any(|c| !(c.sigma > 0.0 && c.sigma.is_finite() && c.mean.is_finite())) {
                    return Err(Error::InvalidSynthSpec("mixture sigmas must be positive"));
                }
                if comps.iter().any(|c| c.weight.is_nan() || c.weight < 0.0) {
                    return Err(Error::InvalidSynthSpec("mixture weights must be nonnegative"));
                }
                let total: f64 = comps.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidSynthSpec("mixture weights must sum to 1"));
                }
                // rejection at zero must terminate
                if comps.iter().all(|c| c.weight == 0.0 || c.mean < -8.0 * c.sigma) {
                    return Err(Error::InvalidSynthSpec("mixture has no mass above zero"));
                }
            }
            MagnitudeLaw::LogNormal { mu, sigma } => {
                if !(mu.is_finite() && *sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidSynthSpec("lognormal sigma must be positive"));
                }
            }
        }
        Ok(())
    }

    fn draw_once(&self, rng: &mut Xoshiro256StarStar) -> f64 {
        match self {
            MagnitudeLaw::Uniform { a, b } => a + (b - a) * rng.next_f64(),
            MagnitudeLaw::GaussianMixture(comps) => {
                let u = rng.next_f64();
                let mut acc = 0.0;
                let mut chosen = comps[comps.len() - 1];
                for c in comps {
                    acc += c.weight;
                    if u < acc {
                        chosen = *c;
                        break;
                    }
                }
                chosen.mean + chosen.sigma * rng.next_normal()
            }
            MagnitudeLaw::LogNormal { mu, sigma } => libm::exp(mu + sigma * rng.next_normal()),
        }
    }

    /// A strictly positive finite magnitude.
    pub fn draw(&self, rng: &mut Xoshiro256StarStar) -> f64 {
        loop {
            let m = self.draw_once(rng);
            if m > 0.0 && m.is_finite() {
                return m;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_nodes: usize,
    pub law: MagnitudeLaw,
    /// Share of nodes forced to exactly zero displacement.
    pub zero_fraction: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::InvalidSynthSpec("at least 2 nodes are required"));
        }
        if !(self.zero_fraction >= 0.0 && self.zero_fraction < 1.0) {
            return Err(Error::InvalidSynthSpec("zero fraction must lie in [0, 1)"));
        }
        self.law.validate()
    }

    /// Exact number of zero nodes, `floor(zero_fraction * n)`.
    pub fn zero_count(&self) -> usize {
        libm::floor(self.zero_fraction * self.n_nodes as f64) as usize
    }
}

/// Draws a displacement field; identical specs give identical fields.
pub fn generate_field(spec: &SynthSpec, case_id: impl Into<String>) -> Result<DisplacementField> {
    spec.validate()?;
    let n = spec.n_nodes;
    let mut rng = Xoshiro256StarStar::seed_from_u64(spec.seed);
    let mut mags: Vec<f64> = (0..n).map(|_| spec.law.draw(&mut rng)).collect();

    let mut slots: Vec<usize> = (0..n).collect();
    for j in 0..spec.zero_count() {
        let pick = j + rng.next_below((n - j) as u64) as usize;
        slots.swap(j, pick);
        mags[slots[j]] = 0.0;
    }

    let nodes = mags
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let bits = rng.next_u64();
            let third = m / 3.0;
            let sign = |b: u32| if bits >> b & 1 == 1 { -third } else { third };
            NodeDisplacement::new(i as u64 + 1, sign(0), sign(1), sign(2))
        })
        .collect();
    DisplacementField::new(case_id, nodes)
}

/// A curve over bins `1..=k_bins` whose x-coordinate is linear in the
/// parameter, with one y per control point.
pub fn curve_over_bins(degree: usize, omega: f64, ys: &[f64], k_bins: usize) -> Result<PiecewiseBezierCurve> {
    let config = BasisConfig::new(degree, omega)?;
    if ys.len() != config.basis_count() {
        return Err(Error::ControlCount {
            expected: config.basis_count(),
            got: ys.len(),
        });
    }
    let span = (k_bins as f64) - 1.0;
    let d = degree as f64;
    let points = ys
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let t = if i <= degree {
                omega * i as f64 / d
            } else {
                omega + (1.0 - omega) * (i - degree) as f64 / d
            };
            Point2::new(1.0 + span * t, y)
        })
        .collect();
    PiecewiseBezierCurve::new(config, ControlPolygon::new(points)?)
}

/// A histogram whose probabilities are the curve's resampled signal,
/// clipped at zero and scaled to sum to one. The magnitude range is the
/// unit interval.
pub fn generate_from_curve(
    curve: &PiecewiseBezierCurve,
    k_bins: usize,
    samples: Option<usize>,
) -> Result<HistogramDistribution> {
    if k_bins < 2 {
        return Err(Error::TooFewBins(k_bins));
    }
    let pts = curve.sample(samples.unwrap_or(SAMPLES_PER_BIN * k_bins))?;
    let signal = resample_to_signal(&pts, k_bins)?;
    let clipped: Vec<f64> = signal.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::NonPositiveArea);
    }
    Ok(HistogramDistribution {
        v_min: 0.0,
        v_max: 1.0,
        xi: 1.0 / k_bins as f64,
        probs: clipped.iter().map(|v| v / total).collect(),
        n_total: 0,
        n_counted: 0,
        zero_fraction: 0.0,
        zero_policy: ZeroPolicy::Include,
    })
}

//! Two-segment piecewise Bézier basis joined at a segmentation point.
//!
//! With degree `d` there are `2d + 1` basis functions. Functions `0..d` are
//! the Bernstein polynomials of the left segment in the local parameter
//! `s = t / omega`; functions `d+1..=2d` are the Bernstein polynomials of the
//! right segment in `u = (t - omega) / (1 - omega)`. The middle function `d`
//! is shared: `s^d` on the left and `(1 - u)^d` on the right, so it equals
//! one at `t = omega` and the curve passes through the middle control point.
//!
//! The split is half-open: `t < omega` uses the left formulas and
//! `t >= omega` the right ones.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::math::{binomial, powu};

/// Degree used when none is given (11 basis functions).
pub const DEFAULT_DEGREE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisConfig {
    degree: usize,
    omega: f64,
}

impl BasisConfig {
    pub fn new(degree: usize, omega: f64) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidDegree(degree));
        }
        if !(omega > 0.0 && omega < 1.0) {
            return Err(Error::InvalidOmega(omega));
        }
        Ok(BasisConfig { degree, omega })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Number of basis functions, `2d + 1`.
    pub fn basis_count(&self) -> usize {
        2 * self.degree + 1
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(t))
    }
}

/// Value of basis function `i` at parameter `t`.
pub fn basis_eval(config: &BasisConfig, i: usize, t: f64) -> Result<f64> {
    let count = config.basis_count();
    if i >= count {
        return Err(Error::BasisIndexOutOfRange { index: i, count });
    }
    check_t(t)?;
    let d = config.degree;
    let w = config.omega;
    let value = if t < w {
        if i > d {
            0.0
        } else {
            let s = t / w;
            binomial(d, i) * powu(1.0 - s, d - i) * powu(s, i)
        }
    } else if i < d {
        0.0
    } else {
        let j = i - d;
        let u = (t - w) / (1.0 - w);
        let v = (1.0 - t) / (1.0 - w);
        binomial(d, j) * powu(v, d - j) * powu(u, j)
    };
    Ok(value)
}

/// Writes every basis value at `t` into `row` (length `2d + 1`).
pub(crate) fn fill_basis_row(config: &BasisConfig, t: f64, row: &mut [f64]) {
    debug_assert_eq!(row.len(), config.basis_count());
    let d = config.degree;
    let w = config.omega;
    row.iter_mut().for_each(|r| *r = 0.0);
    if t < w {
        let s = t / w;
        for (i, r) in row[..=d].iter_mut().enumerate() {
            *r = binomial(d, i) * powu(1.0 - s, d - i) * powu(s, i);
        }
    } else {
        let u = (t - w) / (1.0 - w);
        let v = (1.0 - t) / (1.0 - w);
        for (j, r) in row[d..].iter_mut().enumerate() {
            *r = binomial(d, j) * powu(v, d - j) * powu(u, j);
        }
    }
}

/// All `2d + 1` basis values at `t`; one row of the design matrix.
pub fn basis_row(config: &BasisConfig, t: f64) -> Result<Vec<f64>> {
    check_t(t)?;
    let mut row = vec![0.0; config.basis_count()];
    fill_basis_row(config, t, &mut row);
    Ok(row)
}

/// Ordered control points of a piecewise curve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ControlPolygon {
    pub points: Vec<Point2>,
}

impl ControlPolygon {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFiniteControl);
        }
        Ok(ControlPolygon { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PiecewiseBezierCurve {
    config: BasisConfig,
    controls: ControlPolygon,
}

impl PiecewiseBezierCurve {
    pub fn new(config: BasisConfig, controls: ControlPolygon) -> Result<Self> {
        if controls.len() != config.basis_count() {
            return Err(Error::ControlCount {
                expected: config.basis_count(),
                got: controls.len(),
            });
        }
        Ok(PiecewiseBezierCurve { config, controls })
    }

    pub fn config(&self) -> &BasisConfig {
        &self.config
    }

    pub fn controls(&self) -> &[Point2] {
        &self.controls.points
    }

    /// `B(t) = sum_i N_i(t) C_i`.
    pub fn eval(&self, t: f64) -> Result<Point2> {
        check_t(t)?;
        let mut row = vec![0.0; self.config.basis_count()];
        fill_basis_row(&self.config, t, &mut row);
        Ok(self.combine(&row))
    }

    fn combine(&self, row: &[f64]) -> Point2 {
        row.iter()
            .zip(self.controls())
            .fold(Point2::default(), |acc, (&n, &c)| acc + c * n)
    }

    /// Points `B(k/n)` for `k = 0..=n`.
    pub fn sample(&self, n: usize) -> Result<Vec<Point2>> {
        if n == 0 {
            return Err(Error::ZeroSamples);
        }
        let mut row = vec![0.0; self.config.basis_count()];
        Ok((0..=n)
            .map(|k| {
                let t = if k == n { 1.0 } else { k as f64 / n as f64 };
                fill_basis_row(&self.config, t, &mut row);
                self.combine(&row)
            })
            .collect())
    }
}

pub fn curve_eval(curve: &PiecewiseBezierCurve, t: f64) -> Result<Point2> {
    curve.eval(t)
}

pub fn curve_sample(curve: &PiecewiseBezierCurve, n: usize) -> Result<Vec<Point2>> {
    curve.sample(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain Bézier evaluation by repeated linear interpolation.
    fn de_casteljau(ctrl: &[Point2], s: f64) -> Point2 {
        let mut pts = ctrl.to_vec();
        for level in 1..pts.len() {
            for i in 0..pts.len() - level {
                pts[i] = pts[i].lerp(pts[i + 1], s);
            }
        }
        pts[0]
    }

    fn config(omega: f64) -> BasisConfig {
        BasisConfig::new(5, omega).unwrap()
    }

    #[test]
    fn config_validation() {
        assert_eq!(BasisConfig::new(0, 0.5), Err(Error::InvalidDegree(0)));
        assert_eq!(BasisConfig::new(5, 0.0), Err(Error::InvalidOmega(0.0)));
        assert_eq!(BasisConfig::new(5, 1.0), Err(Error::InvalidOmega(1.0)));
        assert!(BasisConfig::new(5, f64::NAN).is_err());
        assert_eq!(config(0.3).basis_count(), 11);
    }

    #[test]
    fn endpoint_and_junction_values() {
        let c = config(0.5);
        assert_eq!(basis_eval(&c, 0, 0.0).unwrap(), 1.0);
        for i in 1..11 {
            assert_eq!(basis_eval(&c, i, 0.0).unwrap(), 0.0);
        }
        for &w in &[0.1, 0.37, 0.608, 0.9] {
            let c = config(w);
            for i in 0..11 {
                let expect = if i == 5 { 1.0 } else { 0.0 };
                assert_eq!(basis_eval(&c, i, w).unwrap(), expect);
            }
            // left limit of the middle function also reaches one
            let left = basis_eval(&c, 5, w * (1.0 - 1e-15)).unwrap();
            assert!((left - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn first_basis_at_quarter() {
        // (1 - 0.25/0.5)^5
        assert_eq!(basis_eval(&config(0.5), 0, 0.25).unwrap(), 0.03125);
        let oracle = de_casteljau(
            &[
                Point2::new(1.0, 1.0),
                Point2::default(),
                Point2::default(),
                Point2::default(),
                Point2::default(),
                Point2::default(),
            ],
            0.5,
        );
        assert!((oracle.y - 0.03125).abs() < 1e-15);
    }

    #[test]
    fn argument_errors() {
        let c = config(0.5);
        assert_eq!(
            basis_eval(&c, 11, 0.5),
            Err(Error::BasisIndexOutOfRange { index: 11, count: 11 })
        );
        assert_eq!(basis_eval(&c, 0, 1.5), Err(Error::ParameterOutOfRange(1.5)));
        assert!(basis_row(&c, -0.1).is_err());
    }

    #[test]
    fn row_shape() {
        let c = config(0.4);
        assert_eq!(basis_row(&c, 0.0).unwrap()[0], 1.0);
        assert_eq!(*basis_row(&c, 1.0).unwrap().last().unwrap(), 1.0);
        for &t in &[0.4, 0.55, 0.99] {
            let row = basis_row(&c, t).unwrap();
            assert!(row[..5].iter().all(|&v| v == 0.0));
        }
        for &t in &[0.0, 0.1, 0.39] {
            let row = basis_row(&c, t).unwrap();
            assert!(row[6..].iter().all(|&v| v == 0.0));
        }
    }

    fn polygon(pts: &[(f64, f64)]) -> ControlPolygon {
        ControlPolygon::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn constant_curve_and_interpolation() {
        let flat = PiecewiseBezierCurve::new(config(0.3), polygon(&[(3.0, 7.0); 11])).unwrap();
        for p in flat.sample(40).unwrap() {
            assert!((p.x - 3.0).abs() < 1e-13 && (p.y - 7.0).abs() < 1e-13);
        }
        let pts: Vec<(f64, f64)> = (0..11).map(|i| (i as f64, (i * i) as f64)).collect();
        let curve = PiecewiseBezierCurve::new(config(0.3), polygon(&pts)).unwrap();
        assert_eq!(curve.eval(0.0).unwrap(), Point2::new(0.0, 0.0));
        assert_eq!(curve.eval(1.0).unwrap(), Point2::new(10.0, 100.0));
        assert_eq!(curve.eval(0.3).unwrap(), Point2::new(5.0, 25.0));
        let ends = curve.sample(1).unwrap();
        assert_eq!(ends, [Point2::new(0.0, 0.0), Point2::new(10.0, 100.0)]);
    }

    #[test]
    fn control_count_mismatch() {
        assert_eq!(
            PiecewiseBezierCurve::new(config(0.5), polygon(&[(0.0, 0.0); 10])),
            Err(Error::ControlCount { expected: 11, got: 10 })
        );
        assert_eq!(
            ControlPolygon::new(vec![Point2::new(f64::INFINITY, 0.0)]),
            Err(Error::NonFiniteControl)
        );
        let curve = PiecewiseBezierCurve::new(config(0.5), polygon(&[(0.0, 0.0); 11])).unwrap();
        assert_eq!(curve.sample(0), Err(Error::ZeroSamples));
    }

    proptest! {
        #[test]
        fn rows_are_nonnegative_partitions(d in 1usize..9, w in 0.01f64..0.99, t in 0.0f64..=1.0) {
            let c = BasisConfig::new(d, w).unwrap();
            let row = basis_row(&c, t).unwrap();
            prop_assert!(row.iter().all(|&v| v >= 0.0));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for (i, &v) in row.iter().enumerate() {
                prop_assert_eq!(v, basis_eval(&c, i, t).unwrap());
            }
        }

        #[test]
        fn segments_match_de_casteljau(
            d in 1usize..8,
            w in 0.05f64..0.95,
            t in 0.0f64..=1.0,
            ys in proptest::collection::vec(-10.0f64..10.0, 17),
        ) {
            let c = BasisConfig::new(d, w).unwrap();
            let ctrl: Vec<Point2> = (0..c.basis_count()).map(|i| Point2::new(i as f64, ys[i])).collect();
            let curve = PiecewiseBezierCurve::new(c, ControlPolygon::new(ctrl.clone()).unwrap()).unwrap();
            let got = curve.eval(t).unwrap();
            let want = if t < w {
                de_casteljau(&ctrl[..=d], t / w)
            } else {
                de_casteljau(&ctrl[d..], (t - w) / (1.0 - w))
            };
            prop_assert!((got - want).hypot() <= 1e-12 * 20.0);
        }

        #[test]
        fn stays_in_control_bounding_box(
            w in 0.05f64..0.95,
            t in 0.0f64..=1.0,
            xy in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 11),
        ) {
            let ctrl: Vec<Point2> = xy.iter().map(|&(x, y)| Point2::new(x, y)).collect();
            let curve = PiecewiseBezierCurve::new(config(w), ControlPolygon::new(ctrl.clone()).unwrap()).unwrap();
            let p = curve.eval(t).unwrap();
            let (lo_x, hi_x) = ctrl.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, c| (a.0.min(c.x), a.1.max(c.x)));
            let (lo_y, hi_y) = ctrl.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, c| (a.0.min(c.y), a.1.max(c.y)));
            prop_assert!(p.x >= lo_x - 1e-12 && p.x <= hi_x + 1e-12);
            prop_assert!(p.y >= lo_y - 1e-12 && p.y <= hi_y + 1e-12);
        }
    }
}

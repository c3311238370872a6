//! Independent checks of the fitting pipeline against brute-force oracles.

use qda_core::synth::{curve_over_bins, generate_from_curve, Xoshiro256StarStar};
use qda_core::*;

fn random_hist(rng: &mut Xoshiro256StarStar, k: usize) -> HistogramDistribution {
    // smooth-ish positive bumps plus noise
    let c1 = rng.next_f64() * k as f64;
    let c2 = rng.next_f64() * k as f64;
    let w1 = 5.0 + rng.next_f64() * k as f64 / 4.0;
    let w2 = 5.0 + rng.next_f64() * k as f64 / 4.0;
    let raw: Vec<f64> = (1..=k)
        .map(|i| {
            let x = i as f64;
            (-(x - c1).powi(2) / (2.0 * w1 * w1)).exp() + 0.5 * (-(x - c2).powi(2) / (2.0 * w2 * w2)).exp() + 0.05 * rng.next_f64()
        })
        .collect();
    let s: f64 = raw.iter().sum();
    HistogramDistribution {
        v_min: 0.0,
        v_max: 1.0,
        xi: 1.0 / k as f64,
        probs: raw.iter().map(|v| v / s).collect(),
        n_total: 0,
        n_counted: 0,
        zero_fraction: 0.0,
        zero_policy: ZeroPolicy::Include,
    }
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain, counter-clockwise.
fn convex_hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[test]
fn curve_points_stay_in_control_hull() {
    let mut rng = Xoshiro256StarStar::seed_from_u64(2024);
    for _ in 0..10 {
        let ctrl: Vec<Point2> = (0..11).map(|_| Point2::new(rng.next_f64() * 10.0, rng.next_f64() * 10.0)).collect();
        let hull = convex_hull(ctrl.clone());
        let omega = 0.1 + 0.8 * rng.next_f64();
        let curve = PiecewiseBezierCurve::new(BasisConfig::new(5, omega).unwrap(), ControlPolygon::new(ctrl).unwrap()).unwrap();
        for _ in 0..1000 {
            let p = curve_eval(&curve, rng.next_f64()).unwrap();
            for i in 0..hull.len() {
                let edge = cross(hull[i], hull[(i + 1) % hull.len()], p);
                assert!(edge >= -1e-9, "point {p:?} outside hull");
            }
        }
    }
}

/// Exact y where the curve's x reaches `target`, by bisection on `t`
/// (requires x increasing along the curve).
fn y_at_x(curve: &PiecewiseBezierCurve, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if curve_eval(curve, mid).unwrap().x < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    curve_eval(curve, 0.5 * (lo + hi)).unwrap().y
}

#[test]
fn resampling_converges() {
    let mut rng = Xoshiro256StarStar::seed_from_u64(99);
    let opts = FitOptions::default();
    for _ in 0..20 {
        let hist = random_hist(&mut rng, 350);
        let omega = 0.2 + 0.6 * rng.next_f64();
        let fit = fit_curve(&hist, omega, &opts).unwrap();
        if fit.non_monotone {
            continue;
        }
        let fine = fit.curve.sample(160 * 350).unwrap();
        let dense = resample_to_signal(&fine, 350).unwrap();
        let gap = fit
            .signal
            .values
            .iter()
            .zip(&dense.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        // a held value can move at most by the curve's y-range over one
        // coarse sampling interval
        let hold = fine
            .chunks(10)
            .zip(fine.iter().step_by(10).skip(1))
            .map(|(c, next)| {
                let (lo, hi) = c.iter().chain([next]).fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
                hi - lo
            })
            .fold(0.0f64, f64::max);
        assert!(gap <= hold * (1.0 + 1e-9) + 1e-15, "gap {gap} over hold bound {hold}");
        let peak = fit.signal.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(gap <= 5e-3 * peak, "gap {gap} against peak {peak}");
        for k in 2..=350 {
            let exact = y_at_x(&fit.curve, k as f64);
            assert!((fit.signal.values[k - 1] - exact).abs() <= 1e-3);
        }
    }
}

#[test]
fn least_squares_recovers_known_controls() {
    let mut rng = Xoshiro256StarStar::seed_from_u64(7);
    for _ in 0..20 {
        let omega = 0.1 + 0.8 * rng.next_f64();
        let cfg = BasisConfig::new(5, omega).unwrap();
        let ctrl: Vec<Point2> = (0..11).map(|_| Point2::new(rng.next_f64(), rng.next_f64())).collect();
        let curve = PiecewiseBezierCurve::new(cfg, ControlPolygon::new(ctrl.clone()).unwrap()).unwrap();
        let ts = ParameterSequence {
            ts: (0..120).map(|k| k as f64 / 119.0).collect(),
        };
        let pts: Vec<Point2> = ts.ts.iter().map(|&t| curve_eval(&curve, t).unwrap()).collect();
        let phi = assemble_design_matrix(&ts, &cfg).unwrap();
        let fit = solve_least_squares(&phi, &pts).unwrap();
        assert!(!fit.condition_flag);
        for (a, b) in fit.controls.points.iter().zip(&ctrl) {
            assert!((*a - *b).hypot() < 1e-8);
        }
    }
}

#[test]
fn omega_is_recovered_from_generated_histogram() {
    let ys = [0.2, 0.5, 0.9, 1.4, 1.8, 2.0, 1.0, 0.6, 0.4, 0.3, 0.2];
    let curve = curve_over_bins(5, 0.4, &ys, 350).unwrap();
    let hist = generate_from_curve(&curve, 350, None).unwrap();
    assert!((hist.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let sel = select_omega(&hist, &OmegaGrid::default(), &FitOptions::default()).unwrap();
    assert!((sel.omega - 0.4).abs() <= 0.002, "selected {}", sel.omega);
    assert_eq!(sel.evaluated, 451);
}

#[test]
fn fits_stay_finite_on_random_histograms() {
    let mut rng = Xoshiro256StarStar::seed_from_u64(31337);
    let opts = FitOptions::default();
    for i in 0..1000 {
        let k = 11 + rng.next_below(390) as usize;
        let hist = if i % 2 == 0 {
            random_hist(&mut rng, k)
        } else {
            // rough histograms with empty bins
            let raw: Vec<f64> = (0..k).map(|_| if rng.next_f64() < 0.5 { 0.0 } else { rng.next_f64() }).collect();
            let s: f64 = raw.iter().sum::<f64>().max(1e-300);
            let mut h = random_hist(&mut rng, k);
            h.probs = raw.iter().map(|v| v / s).collect();
            h
        };
        let omega = 0.05 + 0.9 * rng.next_f64();
        let fit = fit_curve(&hist, omega, &opts).unwrap();
        assert!(fit.mse.is_finite());
        assert!(fit.curve.controls().iter().all(|c| c.x.is_finite() && c.y.is_finite()));
        assert!(fit.signal.values.iter().all(|v| v.is_finite()));
    }
}

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre5, integrate};
use crate::scalar::Real;
use crate::vec3::Vec3;

use super::curve::{linspace, AnalyticCurve, CurveSamples, MIN_SAMPLES};
use super::window::LocalFit;

const ARC_REL_TOL: f64 = 1e-12;

/// Total arc length of an analytic curve over its domain.
pub fn arc_length<T: Real>(curve: &AnalyticCurve<T>) -> T {
    let (lo, hi) = curve.domain;
    integrate(|t| curve.speed(t), lo, hi, T::lit(ARC_REL_TOL), T::zero()).value
}

fn check_length<T: Real>(length: T, coord_scale: T) -> Result<()> {
    let floor = T::lit(1e3) * T::epsilon() * coord_scale.max(T::min_positive_value());
    if length > floor {
        Ok(())
    } else {
        Err(Error::DegenerateCurve {
            length: length.as_f64(),
            floor: floor.as_f64(),
        })
    }
}

/// Resamples an analytic curve at `n_out` equal arc-length steps; the
/// returned params hold cumulative arc length from 0.
pub fn reparametrize_analytic<T: Real>(
    curve: &AnalyticCurve<T>,
    n_out: usize,
) -> Result<CurveSamples<T>> {
    if n_out < MIN_SAMPLES {
        return Err(Error::TooFewPoints {
            got: n_out,
            need: MIN_SAMPLES,
        });
    }
    let (lo, hi) = curve.domain;
    let knots = linspace(lo, hi, 257);
    let mut cum = vec![T::zero()];
    for w in knots.windows(2) {
        let seg = integrate(
            |t| curve.speed(t),
            w[0],
            w[1],
            T::lit(ARC_REL_TOL),
            T::zero(),
        )
        .value;
        let last = *cum.last().unwrap();
        cum.push(last + seg);
    }
    let total = *cum.last().unwrap();
    let scale = linspace(lo, hi, 64)
        .into_iter()
        .fold(T::zero(), |m, t| m.max(curve.position(t).max_abs()));
    check_length(total, scale)?;

    let targets = linspace(T::zero(), total, n_out);
    let mut points = Vec::with_capacity(n_out);
    for &target in &targets {
        let j = match cum.iter().position(|&c| c > target) {
            Some(0) => 0,
            Some(j) => j - 1,
            None => knots.len() - 2,
        };
        let (mut a, mut b) = (knots[j], knots[j + 1]);
        let goal = target - cum[j];
        let f = |u: T| {
            integrate(
                |t| curve.speed(t),
                knots[j],
                u,
                T::lit(ARC_REL_TOL),
                T::zero(),
            )
            .value
                - goal
        };
        let mut u = a + (b - a) * (goal / (cum[j + 1] - cum[j])).max(T::zero()).min(T::one());
        for _ in 0..50 {
            let r = f(u);
            if r > T::zero() {
                b = u;
            } else {
                a = u;
            }
            let mut next = u - r / curve.speed(u);
            if !(next > a && next < b) {
                next = (a + b) * T::lit(0.5);
            }
            let done = (next - u).abs() <= T::lit(4.0) * T::epsilon() * (T::one() + u.abs());
            u = next;
            if done {
                break;
            }
        }
        points.push(curve.position(u));
    }
    CurveSamples::new(points, Some(targets), curve.label.clone())
}

/// Fit parameter for samples: the given params, else cumulative chord length.
pub(crate) fn fit_parameter<T: Real>(curve: &CurveSamples<T>) -> Vec<T> {
    match curve.params() {
        Some(p) => p.to_vec(),
        None => {
            let pts = curve.points();
            let mut u = Vec::with_capacity(pts.len());
            u.push(T::zero());
            for w in pts.windows(2) {
                let last = *u.last().unwrap();
                u.push(last + (w[1] - w[0]).norm());
            }
            u
        }
    }
}

/// Cumulative arc length at each sample: per segment, the mean of the two
/// neighbouring fits' speed integrals.
pub(crate) fn fitted_arclength<T: Real>(params: &[T], fits: &[LocalFit<T>]) -> Vec<T> {
    let mut s = Vec::with_capacity(params.len());
    s.push(T::zero());
    for i in 0..params.len() - 1 {
        let (a, b) = (params[i], params[i + 1]);
        let l1 = gauss_legendre5(|u| fits[i].speed(u), a, b);
        let l2 = gauss_legendre5(|u| fits[i + 1].speed(u), a, b);
        let last = s[i];
        s.push(last + (l1 + l2) * T::lit(0.5));
    }
    s
}

pub(crate) fn local_fits<T: Real>(
    params: &[T],
    points: &[Vec3<T>],
    window: usize,
    degree: usize,
) -> Option<Vec<LocalFit<T>>> {
    (0..points.len())
        .map(|i| LocalFit::fit(params, points, i, window, degree))
        .collect()
}

/// Resamples point data at `n_out` (approximately) equal arc-length steps
/// using the same quintic window fits as invariant estimation.
pub fn reparametrize_samples<T: Real>(
    curve: &CurveSamples<T>,
    n_out: usize,
) -> Result<CurveSamples<T>> {
    if n_out < MIN_SAMPLES {
        return Err(Error::TooFewPoints {
            got: n_out,
            need: MIN_SAMPLES,
        });
    }
    check_length(curve.chord_length(), curve.coordinate_scale())?;
    let params = fit_parameter(curve);
    let degenerate = || Error::DegenerateCurve {
        length: curve.chord_length().as_f64(),
        floor: 0.0,
    };
    let fits = local_fits(&params, curve.points(), MIN_SAMPLES, 5).ok_or_else(degenerate)?;
    let s = fitted_arclength(&params, &fits);
    let total = *s.last().unwrap();

    let targets = linspace(T::zero(), total, n_out);
    let last_seg = params.len() - 2;
    let mut points = Vec::with_capacity(n_out);
    let mut seg = 0;
    for &target in &targets {
        while seg < last_seg && s[seg + 1] <= target {
            seg += 1;
        }
        let fit = &fits[seg];
        let (u0, u1) = (params[seg], params[seg + 1]);
        let seg_len = gauss_legendre5(|u| fit.speed(u), u0, u1);
        let frac = ((target - s[seg]) / (s[seg + 1] - s[seg]))
            .max(T::zero())
            .min(T::one());
        let goal = frac * seg_len;
        let mut u = u0 + (u1 - u0) * frac;
        for _ in 0..30 {
            let r = gauss_legendre5(|x| fit.speed(x), u0, u) - goal;
            let step = r / fit.speed(u);
            u = (u - step).max(u0).min(u1);
            if step.abs() <= T::lit(4.0) * T::epsilon() * (T::one() + u.abs()) {
                break;
            }
        }
        points.push(fit.position(u));
    }
    CurveSamples::new(points, Some(targets), curve.label.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn viviani_length_against_dense_chords() {
        let v = AnalyticCurve::<f64>::viviani(1.0, (0.0, std::f64::consts::TAU)).unwrap();
        let l = arc_length(&v);
        // independent oracle: 10^6 chords
        let n = 1_000_000;
        let mut acc = 0.0;
        let mut prev = v.position(0.0);
        for i in 1..=n {
            let p = v.position(std::f64::consts::TAU * i as f64 / n as f64);
            acc += (p - prev).norm();
            prev = p;
        }
        assert!((l - acc).abs() < 1e-8, "{l} vs {acc}");
    }

    #[test]
    fn segment_resampled_uniformly() {
        let pts: Vec<Vec3<f64>> = (0..10)
            .map(|i| Vec3::new(i as f64 / 9.0, 0.0, 0.0))
            .collect();
        let c = CurveSamples::new(pts, None, "seg").unwrap();
        let r = reparametrize_samples(&c, 10).unwrap();
        for (i, (p, s)) in r.points().iter().zip(r.params().unwrap()).enumerate() {
            assert!((s - i as f64 / 9.0).abs() < 1e-14);
            assert!((p.x - i as f64 / 9.0).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_steps_are_equal() {
        let v = AnalyticCurve::<f64>::viviani(1.0, (0.0, 6.0)).unwrap();
        let r = reparametrize_analytic(&v, 60).unwrap();
        let ps = r.points();
        let h = r.params().unwrap()[1];
        // chord vs arc step: chord ≤ arc, difference O(h³ κ²)
        for w in ps.windows(2) {
            let c = (w[1] - w[0]).norm();
            assert!(c <= h + 1e-12 && h - c < h * h * h);
        }
    }

    #[test]
    fn unit_speed_helix_is_already_arclength() {
        let k = 0.5f64.sqrt();
        let h = AnalyticCurve::<f64>::helix(k, k, (0.0, 10.0)).unwrap();
        let samples = h.sample(200).unwrap();
        let r = reparametrize_samples(&samples, 200).unwrap();
        for (a, b) in r.params().unwrap().iter().zip(samples.params().unwrap()) {
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }

    #[test]
    fn tiny_curve_is_degenerate() {
        let pts: Vec<Vec3<f64>> = (0..8)
            .map(|i| Vec3::new(1.0 + 1e-20 * i as f64, 1.0, 1.0))
            .collect();
        // consecutive points coincide in f64, so construction already rejects
        assert!(CurveSamples::new(pts, None, "").is_err());
        let pts: Vec<Vec3<f64>> = (0..8)
            .map(|i| Vec3::new(1e-14 * i as f64, 1.0, 0.0))
            .collect();
        let c = CurveSamples::new(pts, None, "").unwrap();
        assert!(matches!(
            reparametrize_samples(&c, 8),
            Err(Error::DegenerateCurve { .. })
        ));
    }
}

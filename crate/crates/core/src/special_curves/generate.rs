use crate::error::Result;
use crate::frenet::{
    integrate_frenet_with, linspace, AnalyticCurve, CurveSamples, FrenetFrame, IntegratorConfig,
};
use crate::scalar::Real;
use crate::vec3::Vec3;

use super::constant::{const_curvature_torsion_exact, ConstantCurvatureSpec};
use super::helix::HelixSpec;
use super::viviani::VivianiSpec;

/// `n` points of the arc-length helix on `[0, length]`; params are `s`.
pub fn helix_samples<T: Real>(spec: &HelixSpec<T>, length: T, n: usize) -> Result<CurveSamples<T>> {
    spec.curve(length)?.sample(n)
}

/// `n` points at equally spaced `t`; params are `t`.
pub fn viviani_samples<T: Real>(spec: &VivianiSpec<T>, n: usize) -> Result<CurveSamples<T>> {
    spec.curve()?.sample(n)
}

/// `n` points of `(a cos t, b sin t, 0)` over a full turn (last point
/// excluded so the loop is not doubled); params are `t`.
pub fn ellipse_samples<T: Real>(a: T, b: T, n: usize) -> Result<CurveSamples<T>> {
    let tau = T::TAU();
    let curve = AnalyticCurve::ellipse(a, b, (T::zero(), tau))?;
    let ts: Vec<T> = (0..n)
        .map(|i| tau * T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect();
    let pts = ts.iter().map(|&t| curve.position(t)).collect();
    CurveSamples::new(pts, Some(ts), "ellipse")
}

/// Constant-curvature curve with the closed-form torsion, reconstructed by
/// integrating the Frenet equations from the standard frame at the origin.
pub fn constcurv_samples<T: Real>(
    spec: &ConstantCurvatureSpec<T>,
    s_range: (T, T),
    n: usize,
) -> Result<CurveSamples<T>> {
    const_curvature_torsion_exact(spec, s_range.0)?;
    let s = linspace(s_range.0, s_range.1, n);
    let config = IntegratorConfig {
        rel_tol: T::lit(1e-12),
        abs_tol: T::lit(1e-12),
        ..IntegratorConfig::default()
    };
    let k0 = spec.kappa0;
    let sol = integrate_frenet_with(
        |_| k0,
        |s| const_curvature_torsion_exact(spec, s).unwrap_or_else(|_| T::nan()),
        &s,
        FrenetFrame::standard(s_range.0),
        Vec3::zero(),
        &config,
    )?;
    let mut samples = sol.samples;
    samples.label = "constcurv".into();
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder_fit::{fit_cylinder, FitConfig};
    use crate::special_curves::Sign;

    #[test]
    fn constcurv_lies_on_unit_cylinder() {
        for c in [0.5, 1.0, 2.0, 5.0] {
            for range in [(-1.0, 1.0), (-2.0, 2.0)] {
                let spec = ConstantCurvatureSpec::exact(1.0f64, c, Sign::Plus, Sign::Plus).unwrap();
                let pts = constcurv_samples(&spec, range, 200).unwrap();
                let fit = fit_cylinder(&pts, None, &FitConfig::default()).unwrap();
                assert!(
                    (fit.model.radius - 1.0).abs() < 1e-8,
                    "C={c} {range:?}: {}",
                    fit.model.radius
                );
                assert!(fit.max_residual < 1e-8);
            }
        }
    }

    #[test]
    fn shapes() {
        let h = helix_samples(&HelixSpec::new(2.0f64, 1.0).unwrap(), 20.0, 400).unwrap();
        assert_eq!(h.len(), 400);
        let e = ellipse_samples(2.0f64, 1.0, 100).unwrap();
        assert_eq!(e.len(), 100);
    }
}

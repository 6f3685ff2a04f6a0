use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cylinder radius and ψ scale of a planar ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseLaw<T> {
    pub rho: T,
    pub c: T,
}

/// `ρ = κmax^(−2/3) κmin^(−1/3)` and `c = κmax^(−2/3)`.
pub fn ellipse_cylinder_law<T: Real>(kappa_max: T, kappa_min: T) -> Result<EllipseLaw<T>> {
    if !(kappa_min > T::zero()) || !(kappa_max >= kappa_min) || !kappa_max.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need kappa_max >= kappa_min > 0, got {kappa_max}, {kappa_min}"
        )));
    }
    let third = T::lit(1.0 / 3.0);
    let c = kappa_max.powf(-(third + third));
    Ok(EllipseLaw {
        rho: c * kappa_min.powf(-third),
        c,
    })
}

/// `ψ = (κ/κmax)^(2/3)` along the ellipse.
pub fn ellipse_psi<T: Real>(kappa: T, kappa_max: T) -> T {
    (kappa / kappa_max).powf(T::lit(2.0 / 3.0))
}

/// `(κmax, κmin) = (a/b², b/a²)` for semi-axes `a ≥ b`.
pub fn ellipse_curvature_extremes<T: Real>(a: T, b: T) -> (T, T) {
    let (a, b) = if a >= b { (a, b) } else { (b, a) };
    (a / (b * b), b / (a * a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frenet::AnalyticCurve;

    #[test]
    fn radius_is_minor_semi_axis() {
        let (kmax, kmin) = ellipse_curvature_extremes(2.0f64, 1.0);
        assert_eq!((kmax, kmin), (2.0, 0.25));
        let law = ellipse_cylinder_law(kmax, kmin).unwrap();
        assert!((law.rho - 1.0).abs() < 1e-15);
        assert!((law.c - 2.0f64.powf(-2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn circle_limit() {
        let law = ellipse_cylinder_law(0.5f64, 0.5).unwrap();
        assert!((law.rho - 2.0).abs() < 1e-15);
    }

    #[test]
    fn psi_matches_tilted_cylinder_geometry() {
        // independent oracle: the ellipse lies on the radius-b cylinder with
        // axis (√(1 − b²/a²), 0, b/a); ψ = 1 − (tangent · axis)²
        let (a, b) = (2.0f64, 1.0);
        let axis = crate::vec3::Vec3::new((1.0 - b * b / (a * a)).sqrt(), 0.0, b / a);
        let e = AnalyticCurve::<f64>::ellipse(a, b, (0.0, 6.0)).unwrap();
        let (kmax, _) = ellipse_curvature_extremes(a, b);
        for t in [0.0, 0.4, 1.3, 2.9, 4.4] {
            let tangent = e.derivatives(t)[0].normalized();
            let cos_a = tangent.dot(axis);
            let (k, _) = e.curvature_torsion(t);
            assert!(
                (ellipse_psi(k, kmax) - (1.0 - cos_a * cos_a)).abs() < 1e-14,
                "t={t}"
            );
        }
    }

    #[test]
    fn rejects_bad_order() {
        assert!(ellipse_cylinder_law(1.0f64, 2.0).is_err());
        assert!(ellipse_cylinder_law(1.0f64, 0.0).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frenet::CurveSamples;
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Cylinder `{x : dist(x, axis line) = radius}`; `axis_point` is kept as
/// the axis point closest to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderModel<T> {
    pub axis_point: Vec3<T>,
    pub axis_dir: Vec3<T>,
    pub radius: T,
}

impl<T: Real> CylinderModel<T> {
    pub fn new(axis_point: Vec3<T>, axis_dir: Vec3<T>, radius: T) -> Result<Self> {
        let n = axis_dir.norm();
        if !(n > T::zero()) || !n.is_finite() || !axis_point.is_finite() {
            return Err(Error::InvalidInput(
                "cylinder axis must be finite and nonzero".into(),
            ));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cylinder radius must be positive, got {radius}"
            )));
        }
        let d = axis_dir.scale(n.recip());
        Ok(Self {
            axis_point: axis_point - d.scale(axis_point.dot(d)),
            axis_dir: d,
            radius,
        })
    }

    /// Distance from `p` to the axis line.
    pub fn axis_distance(&self, p: Vec3<T>) -> T {
        let w = p - self.axis_point;
        (w - self.axis_dir.scale(w.dot(self.axis_dir))).norm()
    }

    /// Orthogonal distance from `p` to the surface.
    pub fn distance(&self, p: Vec3<T>) -> T {
        (self.axis_distance(p) - self.radius).abs()
    }

    /// Same cylinder after `p ↦ R p + shift`.
    pub fn transformed(&self, axis: Vec3<T>, angle: T, shift: Vec3<T>) -> Self {
        let rot = |v| crate::vec3::rotate(v, axis, angle);
        let p = rot(self.axis_point) + shift;
        let d = rot(self.axis_dir);
        Self {
            axis_point: p - d.scale(p.dot(d)),
            axis_dir: d,
            radius: self.radius,
        }
    }
}

/// `(rms, max)` of point-to-surface distances.
pub fn membership_residual<T: Real>(points: &CurveSamples<T>, model: &CylinderModel<T>) -> (T, T) {
    let pts = points.points();
    let (sum, max) = pts.iter().fold((T::zero(), T::zero()), |(s, m), &p| {
        let d = model.distance(p);
        (s + d * d, m.max(d))
    });
    let n = T::from_usize_lossy(pts.len().max(1));
    ((sum / n).sqrt(), max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frenet::AnalyticCurve;

    #[test]
    fn points_on_model() {
        let m =
            CylinderModel::new(Vec3::new(1.0f64, 2.0, 3.0), Vec3::new(0.0, 0.0, 2.0), 0.5).unwrap();
        assert_eq!(m.axis_point, Vec3::new(1.0, 2.0, 0.0));
        let pts = (0..20)
            .map(|i| {
                let t = 0.3 * i as f64;
                Vec3::new(1.0 + 0.5 * t.cos(), 2.0 + 0.5 * t.sin(), t)
            })
            .collect();
        let c = CurveSamples::new(pts, None, "").unwrap();
        let (rms, max) = membership_residual(&c, &m);
        assert!(rms < 1e-15 && max < 1e-15);
    }

    #[test]
    fn radial_scaling() {
        let m = CylinderModel::new(Vec3::zero(), Vec3::unit_z(), 2.0f64).unwrap();
        let eps = 1e-3;
        let pts = (0..12)
            .map(|i| {
                let t = 0.5 * i as f64;
                Vec3::new(
                    2.0 * (1.0 + eps) * t.cos(),
                    2.0 * (1.0 + eps) * t.sin(),
                    0.1 * t,
                )
            })
            .collect();
        let (_, max) = membership_residual(&CurveSamples::new(pts, None, "").unwrap(), &m);
        assert!((max - 2.0 * eps).abs() < 1e-13);
    }

    #[test]
    fn ellipse_on_tilted_cylinder() {
        let (a, b) = (2.0f64, 1.0);
        let dir = Vec3::new((1.0 - b * b / (a * a)).sqrt(), 0.0, b / a);
        let m = CylinderModel::new(Vec3::zero(), dir, b).unwrap();
        let e = AnalyticCurve::ellipse(a, b, (0.0, std::f64::consts::TAU))
            .unwrap()
            .sample(200)
            .unwrap();
        let (_, max) = membership_residual(&e, &m);
        assert!(max < 1e-10);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(CylinderModel::new(Vec3::zero(), Vec3::zero(), 1.0f64).is_err());
        assert!(CylinderModel::new(Vec3::zero(), Vec3::unit_x(), -1.0f64).is_err());
    }
}

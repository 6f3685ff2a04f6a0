use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::Real;
use crate::vec3::Vec3;

use super::FrenetFrame;

/// Smallest sample count that still supports a quintic stencil for κ″.
pub const MIN_SAMPLES: usize = 7;

/// Ordered 3D points, optionally tagged with the parameter they were
/// sampled at.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSamples<T> {
    points: Vec<Vec3<T>>,
    params: Option<Vec<T>>,
    pub label: String,
}

impl<T: Real> CurveSamples<T> {
    pub fn new(
        points: Vec<Vec3<T>>,
        params: Option<Vec<T>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if points.len() < MIN_SAMPLES {
            return Err(Error::TooFewPoints {
                got: points.len(),
                need: MIN_SAMPLES,
            });
        }
        if let Some(bad) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite coordinate at point {bad}"
            )));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "points {i} and {} coincide",
                i + 1
            )));
        }
        if let Some(ps) = &params {
            if ps.len() != points.len() {
                return Err(Error::InvalidInput(format!(
                    "{} params for {} points",
                    ps.len(),
                    points.len()
                )));
            }
            if let Some(i) = ps.windows(2).position(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidInput(format!(
                    "params not strictly increasing at index {i}"
                )));
            }
        }
        Ok(Self {
            points,
            params,
            label: label.into(),
        })
    }

    pub fn points(&self) -> &[Vec3<T>] {
        &self.points
    }

    pub fn params(&self) -> Option<&[T]> {
        self.params.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn bbox_diagonal(&self) -> T {
        bbox_diagonal(&self.points)
    }

    /// Largest absolute coordinate.
    pub fn coordinate_scale(&self) -> T {
        self.points
            .iter()
            .fold(T::zero(), |m, p| m.max(p.max_abs()))
    }

    /// Sum of chord lengths.
    pub fn chord_length(&self) -> T {
        self.points
            .windows(2)
            .fold(T::zero(), |acc, w| acc + (w[1] - w[0]).norm())
    }

    /// Adds independent Gaussian noise of standard deviation `sigma` to
    /// every coordinate; the same seed gives the same perturbation.
    pub fn with_noise(&self, sigma: T, seed: u64) -> Result<Self> {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let normal = Normal::new(0.0, sigma.as_f64())
            .map_err(|e| Error::InvalidInput(format!("noise level {sigma}: {e}")))?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || T::lit(normal.sample(&mut rng));
        let points = self
            .points
            .iter()
            .map(|&p| p + Vec3::new(draw(), draw(), draw()))
            .collect();
        Self::new(points, self.params.clone(), self.label.clone())
    }

    /// Applies `p ↦ R p + shift` for a rotation given as axis/angle.
    pub fn transformed(&self, axis: Vec3<T>, angle: T, shift: Vec3<T>) -> Self {
        let points = self
            .points
            .iter()
            .map(|&p| crate::vec3::rotate(p, axis, angle) + shift)
            .collect();
        Self {
            points,
            params: self.params.clone(),
            label: self.label.clone(),
        }
    }
}

pub(crate) fn bbox_diagonal<T: Real>(points: &[Vec3<T>]) -> T {
    let mut lo = Vec3::splat(T::infinity());
    let mut hi = Vec3::splat(T::neg_infinity());
    for p in points {
        lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    (hi - lo).norm()
}

type PositionFn<T> = dyn Fn(T) -> Vec3<T> + Send + Sync;
type DerivativesFn<T> = dyn Fn(T) -> [Vec3<T>; 3] + Send + Sync;

/// Curve given by closed-form position and exact first three derivatives
/// with respect to its (generally non-arc-length) parameter.
#[derive(Clone)]
pub struct AnalyticCurve<T> {
    position: Arc<PositionFn<T>>,
    derivatives: Arc<DerivativesFn<T>>,
    pub domain: (T, T),
    pub label: String,
}

impl<T: Real> fmt::Debug for AnalyticCurve<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticCurve")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl<T: Real> AnalyticCurve<T> {
    pub fn new(
        position: impl Fn(T) -> Vec3<T> + Send + Sync + 'static,
        derivatives: impl Fn(T) -> [Vec3<T>; 3] + Send + Sync + 'static,
        domain: (T, T),
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(domain.1 > domain.0) {
            return Err(Error::InvalidInput("empty parameter domain".into()));
        }
        Ok(Self {
            position: Arc::new(position),
            derivatives: Arc::new(derivatives),
            domain,
            label: label.into(),
        })
    }

    /// Builds the derivative maps by evaluating `position` on Taylor jets.
    pub fn from_jet_fn(
        position: impl Fn(Jet<T, 4>) -> Vec3<Jet<T, 4>> + Send + Sync + 'static,
        domain: (T, T),
        label: impl Into<String>,
    ) -> Result<Self> {
        let position = Arc::new(position);
        let p2 = Arc::clone(&position);
        Self::new(
            move |t| position(Jet::constant(t)).map(|j| j.value()),
            move |t| {
                let r = p2(Jet::variable(t));
                [1, 2, 3].map(|k| r.map(|j| j.derivative(k)))
            },
            domain,
            label,
        )
    }

    pub fn position(&self, t: T) -> Vec3<T> {
        (self.position)(t)
    }

    pub fn derivatives(&self, t: T) -> [Vec3<T>; 3] {
        (self.derivatives)(t)
    }

    pub fn speed(&self, t: T) -> T {
        self.derivatives(t)[0].norm()
    }

    /// Curvature and torsion from the exact derivatives.
    pub fn curvature_torsion(&self, t: T) -> (T, T) {
        let [d1, d2, d3] = self.derivatives(t);
        let c = d1.cross(d2);
        let c2 = c.norm_squared();
        let v = d1.norm();
        (c2.sqrt() / (v * v * v), d3.dot(c) / c2)
    }

    /// Frenet frame at parameter `t`; `s` is left at zero.
    pub fn frame_at(&self, t: T) -> FrenetFrame<T> {
        let [d1, d2, _] = self.derivatives(t);
        FrenetFrame::from_derivatives(T::zero(), d1, d2)
    }

    /// Circular helix `(a cos t, a sin t, b t)`.
    pub fn helix(a: T, b: T, domain: (T, T)) -> Result<Self> {
        Self::new(
            move |t| Vec3::new(a * t.cos(), a * t.sin(), b * t),
            move |t| {
                let (s, c) = t.sin_cos();
                [
                    Vec3::new(-a * s, a * c, b),
                    Vec3::new(-a * c, -a * s, T::zero()),
                    Vec3::new(a * s, -a * c, T::zero()),
                ]
            },
            domain,
            "helix",
        )
    }

    /// Viviani curve `ρ(1 + cos t, sin t, 2 sin(t/2))`.
    pub fn viviani(rho: T, domain: (T, T)) -> Result<Self> {
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        Self::new(
            move |t| {
                Vec3::new(
                    rho * (T::one() + t.cos()),
                    rho * t.sin(),
                    two * rho * (t * half).sin(),
                )
            },
            move |t| {
                let (s, c) = t.sin_cos();
                let (sh, ch) = (t * half).sin_cos();
                [
                    Vec3::new(-rho * s, rho * c, rho * ch),
                    Vec3::new(-rho * c, -rho * s, -rho * half * sh),
                    Vec3::new(rho * s, -rho * c, -rho * half * half * ch),
                ]
            },
            domain,
            "viviani",
        )
    }

    /// Ellipse `(a cos t, b sin t, 0)`.
    pub fn ellipse(a: T, b: T, domain: (T, T)) -> Result<Self> {
        Self::new(
            move |t| Vec3::new(a * t.cos(), b * t.sin(), T::zero()),
            move |t| {
                let (s, c) = t.sin_cos();
                [
                    Vec3::new(-a * s, b * c, T::zero()),
                    Vec3::new(-a * c, -b * s, T::zero()),
                    Vec3::new(a * s, -b * c, T::zero()),
                ]
            },
            domain,
            "ellipse",
        )
    }

    pub fn circle(radius: T, domain: (T, T)) -> Result<Self> {
        Self::ellipse(radius, radius, domain).map(|mut c| {
            c.label = "circle".into();
            c
        })
    }

    /// Samples `n` points uniformly in the parameter, keeping `t` as params.
    pub fn sample(&self, n: usize) -> Result<CurveSamples<T>> {
        let ts = linspace(self.domain.0, self.domain.1, n);
        let points = ts.iter().map(|&t| self.position(t)).collect();
        CurveSamples::new(points, Some(ts), self.label.clone())
    }
}

pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::from_usize_lossy(n - 1);
            (0..n)
                .map(|i| {
                    if i + 1 == n {
                        hi
                    } else {
                        lo + step * T::from_usize_lossy(i)
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_enforce_invariants() {
        let pts: Vec<Vec3<f64>> = (0..6).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        assert!(matches!(
            CurveSamples::new(pts, None, ""),
            Err(Error::TooFewPoints { got: 6, .. })
        ));

        let mut pts: Vec<Vec3<f64>> = (0..8).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        pts[4] = pts[3];
        assert!(CurveSamples::new(pts, None, "").is_err());

        let pts: Vec<Vec3<f64>> = (0..8).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        let params = vec![0.0, 1.0, 2.0, 2.0, 4.0, 5.0, 6.0, 7.0];
        assert!(CurveSamples::new(pts.clone(), Some(params), "").is_err());
        assert!(CurveSamples::new(pts.clone(), Some(vec![0.0; 3]), "").is_err());
        assert!(CurveSamples::new(pts, Some((0..8).map(f64::from).collect()), "").is_ok());
    }

    #[test]
    fn jet_curve_matches_hand_derivatives() {
        let hand = AnalyticCurve::<f64>::viviani(1.3, (0.0, 6.0)).unwrap();
        let rho = 1.3;
        let jet = AnalyticCurve::from_jet_fn(
            move |t: Jet<f64, 4>| {
                let (s, c) = t.sin_cos();
                let sh = (t * Jet::constant(0.5)).sin();
                Vec3::new(
                    (Jet::constant(1.0) + c).scale(rho),
                    s.scale(rho),
                    sh.scale(2.0 * rho),
                )
            },
            (0.0, 6.0),
            "viviani-jet",
        )
        .unwrap();
        for t in [0.0, 0.4, 2.2, 5.9] {
            let a = hand.derivatives(t);
            let b = jet.derivatives(t);
            for k in 0..3 {
                assert!((a[k] - b[k]).norm() < 1e-13, "d{} at {t}", k + 1);
            }
            assert!((hand.position(t) - jet.position(t)).norm() < 1e-14);
        }
    }

    #[test]
    fn helix_closed_form_invariants() {
        let h = AnalyticCurve::<f64>::helix(1.0, 1.0, (0.0, 10.0)).unwrap();
        for t in [0.0, 1.0, 7.5] {
            let (k, tau) = h.curvature_torsion(t);
            assert!((k - 0.5).abs() < 1e-15);
            assert!((tau - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0f64, 1.0, 10);
        assert_eq!(v.len(), 10);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[9], 1.0);
        assert!((v[1] - 1.0 / 9.0).abs() < 1e-16);
    }
}

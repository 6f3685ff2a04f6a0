//! Frenet apparatus: curve samples, invariant profiles (κ, τ and their
//! arc-length derivatives), reconstruction from prescribed invariants,
//! and direction cosines of a fixed axis in the moving frame.

mod arclength;
mod curve;
mod integrate;
mod invariants;
mod spectral;
mod window;

pub use arclength::{arc_length, reparametrize_analytic, reparametrize_samples};
pub use curve::{linspace, AnalyticCurve, CurveSamples, MIN_SAMPLES};
pub use integrate::{integrate_frenet, integrate_frenet_with, FrenetSolution, IntegratorConfig};
pub use invariants::{
    compute_invariants_analytic, compute_invariants_samples, compute_invariants_spectral,
    EstimationMethod, ExcludedRecord, InvariantConfig, InvariantProfile, InvariantRecord,
    ProfileMeta,
};
pub use spectral::{default_max_degree, SpectralFit};
pub use window::LocalFit;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::vec3::Vec3;

/// Orthonormal moving frame `(t, n, b)` at arc length `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetFrame<T> {
    pub s: T,
    pub t_vec: Vec3<T>,
    pub n_vec: Vec3<T>,
    pub b_vec: Vec3<T>,
}

impl<T: Real> FrenetFrame<T> {
    /// The frame aligned with the coordinate axes.
    pub fn standard(s: T) -> Self {
        Self {
            s,
            t_vec: Vec3::unit_x(),
            n_vec: Vec3::unit_y(),
            b_vec: Vec3::unit_z(),
        }
    }

    /// Frame from the first two derivatives of any regular parametrization.
    pub fn from_derivatives(s: T, d1: Vec3<T>, d2: Vec3<T>) -> Self {
        let t_vec = d1.normalized();
        let b_vec = d1.cross(d2).normalized();
        let n_vec = b_vec.cross(t_vec);
        Self {
            s,
            t_vec,
            n_vec,
            b_vec,
        }
    }

    /// Largest deviation from orthonormality and right-handedness.
    pub fn orthonormality_defect(&self) -> T {
        let one = T::one();
        let (t, n, b) = (self.t_vec, self.n_vec, self.b_vec);
        [
            (t.norm() - one).abs(),
            (n.norm() - one).abs(),
            (b.norm() - one).abs(),
            t.dot(n).abs(),
            t.dot(b).abs(),
            n.dot(b).abs(),
            (t.cross(n) - b).max_abs(),
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }

    pub fn is_orthonormal(&self, tol: T) -> bool {
        self.orthonormality_defect() < tol
    }

    /// Modified Gram–Schmidt on `(t, n, b)` in that order.
    pub fn reorthonormalize(&mut self) {
        let t = self.t_vec.normalized();
        let mut n = self.n_vec - t * t.dot(self.n_vec);
        n = n.normalized();
        let mut b = self.b_vec - t * t.dot(self.b_vec);
        b = b - n * n.dot(b);
        self.t_vec = t;
        self.n_vec = n;
        self.b_vec = b.normalized();
    }
}

/// Direction cosines `(cos α, cos β, cos γ) = (⟨t,a⟩, ⟨n,a⟩, ⟨b,a⟩)` of a
/// unit axis in the frame.
pub fn axis_cosines<T: Real>(frame: &FrenetFrame<T>, axis: Vec3<T>) -> (T, T, T) {
    (
        frame.t_vec.dot(axis),
        frame.n_vec.dot(axis),
        frame.b_vec.dot(axis),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosines_of_frame_vectors() {
        let f = AnalyticCurve::<f64>::helix(1.0, 1.0, (0.0, 5.0))
            .unwrap()
            .frame_at(0.8);
        let (a, b, c) = axis_cosines(&f, f.t_vec);
        assert!((a - 1.0).abs() < 1e-15 && b.abs() < 1e-15 && c.abs() < 1e-15);
        let (a, b, c) = axis_cosines(&f, f.b_vec);
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15 && (c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn helix_tangent_makes_constant_angle_with_axis() {
        let h = AnalyticCurve::<f64>::helix(1.0, 1.0, (0.0, 10.0)).unwrap();
        for t in [0.0, 1.3, 4.0, 9.9] {
            let (ca, cb, cg) = axis_cosines(&h.frame_at(t), Vec3::unit_z());
            assert!((ca - 0.5f64.sqrt()).abs() < 1e-15);
            assert!((ca * ca + cb * cb + cg * cg - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gram_schmidt_repairs_drift() {
        let mut f = FrenetFrame::<f64>::standard(0.0);
        f.t_vec = Vec3::new(1.0 + 1e-6, 2e-7, -1e-7);
        f.n_vec = Vec3::new(3e-7, 1.0 - 2e-6, 1e-7);
        f.b_vec = Vec3::new(0.0, 1e-6, 1.0);
        assert!(!f.is_orthonormal(1e-9));
        f.reorthonormalize();
        assert!(f.is_orthonormal(1e-14));
    }
}

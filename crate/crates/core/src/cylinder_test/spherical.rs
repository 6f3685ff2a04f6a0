use serde::{Deserialize, Serialize};

use crate::frenet::InvariantProfile;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalCheck<T> {
    pub is_spherical: bool,
    /// `√mean` of `1/κ² + κ′²/(κ⁴τ²)` over the used records.
    pub radius: T,
    /// Relative standard deviation of that quantity.
    pub rel_std: T,
    /// Largest relative residual of `τ/κ − (κ′/(κ²τ))′ = 0`.
    pub derivative_residual: T,
    pub used: usize,
    /// Records skipped for |τ| below the floor.
    pub excluded: usize,
}

/// Relative |τ| floor (against the largest κ) below which records are skipped.
pub const TAU_FLOOR_REL: f64 = 1e-3;

/// Threshold on both the relative spread and the derivative residual.
pub const SPHERE_TOL: f64 = 1e-4;

/// Evaluates the sphere condition `1/κ² + κ′²/(κ⁴τ²) = r²` on every record
/// with non-negligible torsion. The constant left side alone does not rule
/// out helices (κ′ ≡ 0), so the differentiated form
/// `τ/κ − (κ′/(κ²τ))′ = 0` must hold as well.
pub fn spherical_check<T: Real>(profile: &InvariantProfile<T>) -> SphericalCheck<T> {
    let recs = profile.records();
    let kmax = recs.iter().fold(T::zero(), |m, r| m.max(r.kappa));
    let floor = T::lit(TAU_FLOOR_REL) * kmax;
    let used_recs: Vec<_> = recs.iter().filter(|r| r.tau.abs() > floor).collect();
    let used = used_recs.len();
    let excluded = recs.len() - used;
    if used < 2 {
        return SphericalCheck {
            is_spherical: false,
            radius: T::nan(),
            rel_std: T::nan(),
            derivative_residual: T::nan(),
            used,
            excluded,
        };
    }
    let two = T::lit(2.0);
    let mut vals = Vec::with_capacity(used);
    let mut es2 = T::zero();
    for r in &used_recs {
        let (k, k1, k2, t, t1) = (r.kappa, r.kappa1, r.kappa2, r.tau, r.tau1);
        let kk = k * k;
        vals.push(T::one() / kk + k1 * k1 / (kk * kk * t * t));
        let lhs = t / k;
        let d = k2 / (kk * t) - k1 * (two * k * k1 * t + kk * t1) / (kk * kk * t * t);
        es2 = es2.max((lhs - d).abs() / (lhs.abs() + d.abs()));
    }
    let n = T::from_usize_lossy(used);
    let mean = vals.iter().fold(T::zero(), |a, &b| a + b) / n;
    let var = vals
        .iter()
        .fold(T::zero(), |a, &v| a + (v - mean) * (v - mean))
        / n;
    let rel_std = var.sqrt() / mean;
    let tol = T::lit(SPHERE_TOL);
    SphericalCheck {
        is_spherical: rel_std < tol && es2 < tol,
        radius: mean.sqrt(),
        rel_std,
        derivative_residual: es2,
        used,
        excluded,
    }
}

use serde::{Deserialize, Serialize};

use crate::cylinder_test::PsiPolynomial;
use crate::error::{Error, Result};
use crate::frenet::{AnalyticCurve, InvariantProfile};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Circular helix by its constant invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelixSpec<T> {
    pub kappa0: T,
    pub tau0: T,
}

impl<T: Real> HelixSpec<T> {
    pub fn new(kappa0: T, tau0: T) -> Result<Self> {
        if !(kappa0 > T::zero()) || !tau0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "helix needs kappa0 > 0 and finite tau0, got {kappa0}, {tau0}"
            )));
        }
        Ok(Self { kappa0, tau0 })
    }

    /// `(a, b)` of `(a cos t, a sin t, b t)`.
    pub fn shape(&self) -> (T, T) {
        let d = self.kappa0 * self.kappa0 + self.tau0 * self.tau0;
        (self.kappa0 / d, self.tau0 / d)
    }

    /// Arc-length parametrized helix on `s ∈ [0, length]`.
    pub fn curve(&self, length: T) -> Result<AnalyticCurve<T>> {
        let (a, b) = self.shape();
        let w = (self.kappa0 * self.kappa0 + self.tau0 * self.tau0).sqrt();
        let (aw, bw) = (a * w, b * w);
        AnalyticCurve::new(
            move |s| Vec3::new(a * (w * s).cos(), a * (w * s).sin(), b * w * s),
            move |s| {
                let (sn, cs) = (w * s).sin_cos();
                [
                    Vec3::new(-aw * sn, aw * cs, bw),
                    Vec3::new(-aw * w * cs, -aw * w * sn, T::zero()),
                    Vec3::new(aw * w * w * sn, -aw * w * w * cs, T::zero()),
                ]
            },
            (T::zero(), length),
            "helix",
        )
    }

    /// Exact profile at the given arc lengths.
    pub fn profile(&self, s_values: &[T]) -> Result<InvariantProfile<T>> {
        let (k, t) = (self.kappa0, self.tau0);
        InvariantProfile::from_fn(s_values, |_| (k, T::zero(), T::zero(), t, T::zero()))
    }
}

/// `ρ = κ₀/(κ₀² + τ₀²)`.
pub fn helix_radius<T: Real>(spec: &HelixSpec<T>) -> T {
    spec.shape().0
}

/// Constant ratio `a = τ/κ` of a profile; `NotLancret` when the relative
/// spread exceeds `tol`.
pub fn lancret_ratio<T: Real>(profile: &InvariantProfile<T>, tol: T) -> Result<T> {
    let ratios: Vec<T> = profile.records().iter().map(|r| r.tau / r.kappa).collect();
    let lo = ratios.iter().fold(T::infinity(), |m, &v| m.min(v));
    let hi = ratios.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
    let scale = lo.abs().max(hi.abs()).max(T::min_positive_value());
    let spread = (hi - lo) / scale;
    if spread > tol {
        return Err(Error::NotLancret {
            spread: spread.as_f64(),
        });
    }
    Ok((lo + hi) * T::lit(0.5))
}

/// Residuals of the Lancret-specialized conditions at ratio `a = τ/κ`:
/// the ψ′ equation (smaller of the two signs) and the polynomial
/// constraint with its radical squared away.
pub fn lancret_residuals<T: Real>(a: T, rho: T, kappa: T, kappa1: T, psi: T, psi1: T) -> (T, T) {
    let two_thirds = T::lit(2.0 / 3.0);
    let root = (rho * rho * kappa * kappa - psi * psi)
        .max(T::zero())
        .sqrt();
    let base = psi * kappa1 / kappa;
    let plus = psi1 - two_thirds * (base + a * kappa * root);
    let minus = psi1 - two_thirds * (base - a * kappa * root);
    let l1 = plus.abs().min(minus.abs());

    let r2 = rho * rho;
    let k2 = kappa * kappa;
    let gap = r2 * k2 - psi * psi;
    let rhs = r2 * psi * psi * kappa1 * kappa1
        + k2 * gap * (a * a * r2 * k2 + T::lit(9.0) * psi * (psi - T::one()));
    let lhs2 = T::lit(4.0) * a * a * r2 * r2 * k2 * k2 * psi * psi * kappa1 * kappa1 * gap;
    (l1, rhs * rhs - lhs2)
}

/// The same constraint through the general polynomial, for cross-checks.
pub fn lancret_polynomial<T: Real>(a: T, rho: T, kappa: T, kappa1: T) -> PsiPolynomial<T> {
    PsiPolynomial::new(rho, kappa, kappa1, a * kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder_test::{psi_prime_branches, q_cleared};

    #[test]
    fn radius_examples() {
        assert!((helix_radius(&HelixSpec::new(2.0f64, 1.0).unwrap()) - 0.4).abs() < 1e-16);
        assert_eq!(helix_radius(&HelixSpec::new(1.0f64, 0.0).unwrap()), 1.0);
        let a = helix_radius(&HelixSpec::new(1.7f64, 0.3).unwrap());
        let b = helix_radius(&HelixSpec::new(1.7f64, -0.3).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn arc_length_curve_has_spec_invariants() {
        let h = HelixSpec::new(2.0f64, 1.0).unwrap();
        let c = h.curve(10.0).unwrap();
        for s in [0.0, 3.3, 9.0] {
            assert!((c.speed(s) - 1.0).abs() < 1e-14);
            let (k, t) = c.curvature_torsion(s);
            assert!((k - 2.0).abs() < 1e-13 && (t - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn helix_is_lancret_with_zero_residuals() {
        let (k, t) = (2.0f64, 1.0);
        let rho = helix_radius(&HelixSpec::new(k, t).unwrap());
        let (l1, l2) = lancret_residuals(t / k, rho, k, 0.0, rho * k, 0.0);
        assert!(l1 < 1e-15 && l2.abs() < 1e-15);
    }

    #[test]
    fn agrees_with_general_machinery() {
        let (a, rho, k, k1) = (0.6f64, 0.9, 1.3, 0.25);
        let poly = lancret_polynomial(a, rho, k, k1);
        for psi in [0.2, 0.5, 0.8] {
            let (_, l2) = lancret_residuals(a, rho, k, k1, psi, 0.0);
            assert!((l2 + poly.eval(psi)).abs() < 1e-12 * poly.magnitude(psi));
            // q_cleared factors through the distance to both ψ′ branches
            let psi1 = 0.07;
            let (p, m) = psi_prime_branches(rho, k, k1, a * k, psi);
            let q = q_cleared(rho, k, k1, a * k, psi, psi1);
            assert!((q + 2.25 * k * k * (psi1 - p) * (psi1 - m)).abs() < 1e-12);
            let (l1, _) = lancret_residuals(a, rho, k, k1, psi, psi1);
            assert!((l1 - (psi1 - p).abs().min((psi1 - m).abs())).abs() < 1e-15);
        }
    }

    #[test]
    fn non_constant_ratio_is_rejected() {
        let s: Vec<f64> = (0..10).map(f64::from).collect();
        let p = InvariantProfile::from_fn(&s, |s| (1.0, 0.0, 0.0, 0.1 * s + 0.1, 0.1)).unwrap();
        assert!(matches!(
            lancret_ratio(&p, 1e-9),
            Err(Error::NotLancret { .. })
        ));
        let h = HelixSpec::new(2.0, 1.0).unwrap().profile(&s).unwrap();
        assert!((lancret_ratio(&h, 1e-12).unwrap() - 0.5).abs() < 1e-16);
    }
}

//! Pointwise residuals of the compatibility conditions a root ψ with
//! derivatives ψ′, ψ″ must satisfy.
//!
//! Each condition is a sum of terms that must cancel. The residual is the
//! absolute value of that sum divided by the sum of the terms' magnitudes,
//! so it is dimensionless, invariant under scaling the curve, and lies in
//! `[0, 1]`. A condition whose terms all vanish (the axis equation on a
//! planar record) counts as satisfied, and so does one whose terms are
//! below [`VANISHING_REL`] of the record's natural scale, a power of κ:
//! there the ratio is rounding noise over rounding noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Invariants at one record, the inputs every residual needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Local<T> {
    pub kappa: T,
    pub kappa1: T,
    pub kappa2: T,
    pub tau: T,
    pub tau1: T,
}

impl<T: Real> Local<T> {
    pub fn new(kappa: T, kappa1: T, kappa2: T, tau: T, tau1: T) -> Self {
        Self {
            kappa,
            kappa1,
            kappa2,
            tau,
            tau1,
        }
    }
}

/// Terms smaller than this fraction of the natural scale count as vanishing.
pub const VANISHING_REL: f64 = 1e-12;

fn ratio<T: Real>(value: T, scale: T, natural: T) -> T {
    if scale > T::lit(VANISHING_REL) * natural {
        value.abs() / scale
    } else {
        T::zero()
    }
}

/// `κ⁴τ²ρ² − τ²ψ²κ² − ((3/2)κψ′ − ψκ′)²`, the radius identity multiplied
/// through by `κ⁴τ²` so that it stays finite at `τ = 0`.
pub fn q_cleared<T: Real>(rho: T, kappa: T, kappa1: T, tau: T, psi: T, psi1: T) -> T {
    q_parts(rho, kappa, kappa1, tau, psi, psi1).0
}

fn q_parts<T: Real>(rho: T, kappa: T, kappa1: T, tau: T, psi: T, psi1: T) -> (T, T) {
    let k2 = kappa * kappa;
    let t2 = tau * tau;
    let i1 = T::lit(1.5) * kappa * psi1;
    let i2 = psi * kappa1;
    let a = k2 * k2 * t2 * rho * rho;
    let b = t2 * psi * psi * k2;
    let inner = i1 - i2;
    let spread = i1.abs() + i2.abs();
    (a - b - inner * inner, a + b + spread * spread)
}

/// Relative residual of [`q_cleared`].
pub fn q_residual<T: Real>(rho: T, kappa: T, kappa1: T, tau: T, psi: T, psi1: T) -> T {
    let (v, scale) = q_parts(rho, kappa, kappa1, tau, psi, psi1);
    let k2 = kappa * kappa;
    ratio(v, scale, k2 * k2)
}

/// Second condition: the axis equation rewritten in ψ and squared to drop
/// the sign of cos γ,
/// `A² − κ⁴τ⁴(4κ²ψ(1−ψ) − ψ′²)` with
/// `A = −4τψκ′² + κ(5τκ′ψ′ + 2ψ(τκ″ − κ′τ′)) + κ²(3τ′ψ′ − 3τψ″ − 2τ³ψ)`.
/// It does not involve ρ.
pub fn axis_cleared<T: Real>(l: &Local<T>, psi: T, psi1: T, psi2: T) -> T {
    axis_parts(l, psi, psi1, psi2).0
}

fn axis_parts<T: Real>(l: &Local<T>, psi: T, psi1: T, psi2: T) -> (T, T) {
    let (k, k1, k2, t, t1) = (l.kappa, l.kappa1, l.kappa2, l.tau, l.tau1);
    let kk = k * k;
    let terms = [
        -T::lit(4.0) * t * psi * k1 * k1,
        T::lit(5.0) * k * t * k1 * psi1,
        T::lit(2.0) * k * psi * t * k2,
        -T::lit(2.0) * k * psi * k1 * t1,
        T::lit(3.0) * kk * t1 * psi1,
        -T::lit(3.0) * kk * t * psi2,
        -T::lit(2.0) * kk * t * t * t * psi,
    ];
    let a = terms.iter().fold(T::zero(), |acc, &x| acc + x);
    let spread = terms.iter().fold(T::zero(), |acc, &x| acc + x.abs());
    let kt = k * t;
    let kt4 = kt * kt * kt * kt;
    let c1 = kt4 * T::lit(4.0) * kk * (T::one() - psi) * psi;
    let c2 = kt4 * psi1 * psi1;
    (a * a - c1 + c2, spread * spread + c1.abs() + c2)
}

/// Relative residual of [`axis_cleared`].
pub fn axis_residual<T: Real>(l: &Local<T>, psi: T, psi1: T, psi2: T) -> T {
    let (v, scale) = axis_parts(l, psi, psi1, psi2);
    let k2 = l.kappa * l.kappa;
    let k4 = k2 * k2;
    ratio(v, scale, k4 * k4 * k2)
}

/// Combined per-root residual: the larger of the two conditions.
pub fn combined_residual<T: Real>(rho: T, l: &Local<T>, psi: T, psi1: T, psi2: T) -> T {
    q_residual(rho, l.kappa, l.kappa1, l.tau, psi, psi1).max(axis_residual(l, psi, psi1, psi2))
}

/// `ψ′ = (2/3)(ψκ′/κ ± τ√(ρ²κ² − ψ²))`, returned as `(plus, minus)`.
/// The radicand is clamped at zero so roots on the boundary `ψ = ρκ` work.
pub fn psi_prime_branches<T: Real>(rho: T, kappa: T, kappa1: T, tau: T, psi: T) -> (T, T) {
    let p = (rho * rho * kappa * kappa - psi * psi)
        .max(T::zero())
        .sqrt();
    let base = psi * kappa1 / kappa;
    let c = T::lit(2.0 / 3.0);
    (c * (base + tau * p), c * (base - tau * p))
}

/// Closed-form ψ″ on the branch `sign` (±1) of ψ′; a diagnostic, singular
/// where `ψ → ρκ`.
pub fn psi_second_derivative<T: Real>(rho: T, l: &Local<T>, psi: T, sign: T) -> Result<T> {
    let (k, k1, k2) = (l.kappa, l.kappa1, l.kappa2);
    let (t, t1) = (l.tau * sign, l.tau1 * sign);
    let rk = rho * k;
    let radicand = rk * rk - psi * psi;
    if radicand < T::lit(1e-8) * rk * rk {
        return Err(Error::SingularAtBoundary {
            radicand: radicand.as_f64(),
        });
    }
    let p = radicand.sqrt();
    let r2 = rho * rho;
    let num = T::lit(5.0) * r2 * k * k * k * t * k1
        - psi * k1 * k1 * p
        - k * psi * (T::lit(4.0) * t * psi * k1 - T::lit(3.0) * k2 * p)
        - k * k * psi * (T::lit(2.0) * t * t * p + T::lit(3.0) * psi * t1)
        + T::lit(3.0) * r2 * k * k * k * k * t1;
    Ok(T::lit(2.0) * num / (T::lit(9.0) * k * k * p))
}

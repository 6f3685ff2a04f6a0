use crate::jet::Jet;
use crate::scalar::{Real, Ring};

/// Degree of the ψ polynomial.
pub const DEGREE: usize = 8;

/// `Σ Pₙ ψⁿ` at one record for a trial radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiPolynomial<T> {
    pub coeffs: [T; DEGREE + 1],
    pub rho: T,
    pub kappa: T,
    pub kappa1: T,
    pub tau: T,
    pub source_record: Option<usize>,
}

fn pmul<R: Ring>(a: &[R], b: &[R]) -> Vec<R> {
    let mut out = vec![R::ring_zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// Coefficients of
/// `4ρ⁴κ²τ²κ′²ψ²(ρ²κ²−ψ²) − [ρ²κ′²ψ² + κ²(ρ²κ²−ψ²)(ρ²τ²+9ψ²−9ψ)]²`
/// over any ring, so jets in `s` yield `dPₙ/ds` as well.
pub fn coefficients<R: Ring>(rho: R, kappa: R, kappa1: R, tau: R) -> [R; DEGREE + 1] {
    let z = R::ring_zero();
    let r2 = rho.square();
    let k2 = kappa.square();
    let k1sq = kappa1.square();
    let t2 = tau.square();
    let nine = R::from_lit(9.0);
    let gap = [r2 * k2, z, -R::from_lit(1.0)];
    let factor = [r2 * t2, -nine, nine];
    let mut b = pmul(&gap, &factor);
    for c in b.iter_mut() {
        *c = *c * k2;
    }
    b[2] = b[2] + r2 * k1sq;
    let b2 = pmul(&b, &b);
    let lead = R::from_lit(4.0) * r2 * r2 * k2 * t2 * k1sq;
    let first = [z, z, lead * r2 * k2, z, -lead];
    let mut out = [z; DEGREE + 1];
    for (n, c) in out.iter_mut().enumerate() {
        *c = -b2[n];
        if n < first.len() {
            *c = *c + first[n];
        }
    }
    out
}

fn horner<T: Real>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &cn| acc * x + cn)
}

impl<T: Real> PsiPolynomial<T> {
    pub fn new(rho: T, kappa: T, kappa1: T, tau: T) -> Self {
        Self {
            coeffs: coefficients(rho, kappa, kappa1, tau),
            rho,
            kappa,
            kappa1,
            tau,
            source_record: None,
        }
    }

    pub fn eval(&self, psi: T) -> T {
        horner(&self.coeffs, psi)
    }

    /// `d𝒫/dψ`.
    pub fn eval_derivative(&self, psi: T) -> T {
        let d: Vec<T> = self.derivative_coeffs();
        horner(&d, psi)
    }

    pub fn derivative_coeffs(&self) -> Vec<T> {
        (1..=DEGREE)
            .map(|n| self.coeffs[n] * T::from_usize_lossy(n))
            .collect()
    }

    /// `Σ |Pₙ| |ψ|ⁿ`, the natural scale for rounding error in `eval`.
    pub fn magnitude(&self, psi: T) -> T {
        let a = psi.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &cn| acc * a + cn.abs())
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Root acceptance threshold `1e-9 · max |Pₙ|`.
    pub fn tol_poly(&self) -> T {
        T::lit(1e-9) * self.max_abs_coeff()
    }

    /// Value, first and second ψ-derivative of the unexpanded form, which
    /// keeps full relative accuracy where the expanded coefficients cancel.
    pub fn eval_unexpanded(&self, psi: T) -> [T; 3] {
        let c = |v: T| Jet::<T, 3>::constant(v);
        let v = unexpanded(
            c(self.rho),
            c(self.kappa),
            c(self.kappa1),
            c(self.tau),
            Jet::variable(psi),
        );
        [v.value(), v.derivative(1), v.derivative(2)]
    }

    /// Upper end of the admissible interval, `min(1, ρκ)`.
    pub fn psi_upper(&self) -> T {
        T::one().min(self.rho * self.kappa)
    }
}

/// Unexpanded form over any ring.
pub fn unexpanded<R: Ring>(rho: R, kappa: R, kappa1: R, tau: R, psi: R) -> R {
    let r2 = rho.square();
    let k2 = kappa.square();
    let p2 = psi.square();
    let gap = r2 * k2 - p2;
    let first = R::from_lit(4.0) * r2.square() * k2 * tau.square() * p2 * kappa1.square() * gap;
    let b = r2 * p2 * kappa1.square()
        + k2 * gap * (r2 * tau.square() + R::from_lit(9.0) * psi * (psi - R::from_lit(1.0)));
    first - b.square()
}

/// Unexpanded form, evaluated term by term; returns the value together
/// with the largest intermediate magnitude.
pub fn direct_eval<T: Real>(rho: T, kappa: T, kappa1: T, tau: T, psi: T) -> (T, T) {
    let r2 = rho * rho;
    let k2 = kappa * kappa;
    let gap = r2 * k2 - psi * psi;
    let first = T::lit(4.0) * r2 * r2 * k2 * tau * tau * psi * psi * kappa1 * kappa1 * gap;
    let b1 = r2 * psi * psi * kappa1 * kappa1;
    let b2 = k2 * gap * (r2 * tau * tau + T::lit(9.0) * psi * (psi - T::one()));
    let b = b1 + b2;
    let scale = first.abs().max((b1.abs() + b2.abs()).powi(2));
    (first - b * b, scale)
}

/// `(d𝒫/ds)` at fixed ψ, through κ′, κ″ and τ′.
pub fn ds_eval<T: Real>(rho: T, kappa: T, kappa1: T, kappa2: T, tau: T, tau1: T, psi: T) -> T {
    let j = |v: T, d: T| Jet::<T, 2>::from_coeffs([v, d]);
    let c = coefficients(
        Jet::constant(rho),
        j(kappa, kappa1),
        j(kappa1, kappa2),
        j(tau, tau1),
    );
    c.iter()
        .rev()
        .fold(T::zero(), |acc, cn| acc * psi + cn.derivative(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_frozen_expansion() {
        // independent hand expansion of the coefficients
        let (r, k, k1, t): (f64, f64, f64, f64) = (0.7, 1.3, -0.4, 0.9);
        let want = [
            -k.powi(8) * r.powi(8) * t.powi(4),
            18.0 * k.powi(8) * r.powi(6) * t * t,
            -k.powi(4)
                * r.powi(4)
                * (18.0 * k.powi(4) * r * r * t * t + 81.0 * k.powi(4)
                    - 2.0 * k * k * r * r * t.powi(4)
                    - 2.0 * k1 * k1 * r * r * t * t),
            18.0 * k.powi(4) * r.powi(4) * (9.0 * k.powi(4) - 2.0 * k * k * t * t + k1 * k1),
            -r * r
                * (81.0 * k.powi(8) * r * r - 36.0 * k.powi(6) * r * r * t * t - 162.0 * k.powi(6)
                    + 18.0 * k.powi(4) * k1 * k1 * r * r
                    + k.powi(4) * r * r * t.powi(4)
                    + 2.0 * k * k * k1 * k1 * r * r * t * t
                    + k1.powi(4) * r * r),
            -18.0 * k * k * r * r * (18.0 * k.powi(4) - k * k * t * t + k1 * k1),
            9.0 * k
                * k
                * (18.0 * k.powi(4) * r * r - 2.0 * k * k * r * r * t * t - 9.0 * k * k
                    + 2.0 * k1 * k1 * r * r),
            162.0 * k.powi(4),
            -81.0 * k.powi(4),
        ];
        let p = PsiPolynomial::new(r, k, k1, t);
        for (n, (a, b)) in p.coeffs.iter().zip(want).enumerate() {
            assert!(
                (a - b).abs() <= 1e-13 * b.abs().max(1.0),
                "P{n}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn constant_curvature_factorization() {
        let (r, k, t): (f64, f64, f64) = (0.8, 1.1, 0.6);
        let p = PsiPolynomial::new(r, k, 0.0, t);
        for psi in [0.1, 0.45, 0.8, 0.88] {
            let f = -(k * k * k * k)
                * (r * r * k * k - psi * psi).powi(2)
                * (r * r * t * t + 9.0 * psi * (psi - 1.0)).powi(2);
            assert!((p.eval(psi) - f).abs() < 1e-14 * p.magnitude(psi));
        }
        assert!(p.eval(r * k).abs() < 1e-14 * p.magnitude(r * k));
    }

    #[test]
    fn leading_coefficient() {
        let p = PsiPolynomial::new(2.0, 0.5, 3.0, -1.0);
        assert_eq!(p.coeffs[8], -81.0 * 0.5f64.powi(4));
    }

    #[test]
    fn ds_matches_finite_difference() {
        // κ(s) = 1 + 0.3 s², τ(s) = 0.5 − 0.2 s
        let kap = |s: f64| 1.0 + 0.3 * s * s;
        let (rho, psi, s0) = (0.9, 0.4, 0.7);
        let at = |s: f64| PsiPolynomial::new(rho, kap(s), 0.6 * s, 0.5 - 0.2 * s).eval(psi);
        let h = 1e-4;
        let fd = (at(s0 + h) - at(s0 - h)) / (2.0 * h);
        let an = ds_eval(rho, kap(s0), 0.6 * s0, 0.6, 0.5 - 0.2 * s0, -0.2, psi);
        assert!((fd - an).abs() < 1e-7 * an.abs().max(1.0), "{fd} {an}");
    }
}

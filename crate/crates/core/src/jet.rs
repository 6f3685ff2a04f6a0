//! Truncated Taylor series ("jets") with `N` coefficients.
//!
//! A jet stores `c[k] = f⁽ᵏ⁾(x₀) / k!`. Arithmetic is exact up to the
//! truncation order, which makes it a convenient way to push derivatives
//! of a local polynomial fit through the curvature and torsion formulas
//! without writing out the chain rule by hand.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{Real, Ring};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T, const N: usize> {
    pub c: [T; N],
}

impl<T: Real, const N: usize> Jet<T, N> {
    pub fn constant(v: T) -> Self {
        let mut c = [T::zero(); N];
        c[0] = v;
        Self { c }
    }

    /// The independent variable expanded around `x0`.
    pub fn variable(x0: T) -> Self {
        let mut c = [T::zero(); N];
        c[0] = x0;
        if N > 1 {
            c[1] = T::one();
        }
        Self { c }
    }

    pub fn from_coeffs(c: [T; N]) -> Self {
        Self { c }
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> T {
        let mut f = T::one();
        for i in 2..=k {
            f = f * T::from_usize_lossy(i);
        }
        self.c[k] * f
    }

    /// Jet of the derivative function; the top coefficient becomes zero
    /// (valid order drops by one).
    pub fn diff(&self) -> Self {
        let mut c = [T::zero(); N];
        for k in 1..N {
            c[k - 1] = self.c[k] * T::from_usize_lossy(k);
        }
        Self { c }
    }

    pub fn scale(self, s: T) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v = *v * s);
        Self { c }
    }

    pub fn recip(self) -> Self {
        Self::constant(T::one()) / self
    }

    pub fn sqrt(self) -> Self {
        let mut h = [T::zero(); N];
        h[0] = self.c[0].sqrt();
        let two_h0 = h[0] + h[0];
        for k in 1..N {
            let mut acc = self.c[k];
            for j in 1..k {
                acc = acc - h[j] * h[k - j];
            }
            h[k] = acc / two_h0;
        }
        Self { c: h }
    }

    pub fn exp(self) -> Self {
        let mut e = [T::zero(); N];
        e[0] = self.c[0].exp();
        for k in 1..N {
            let mut acc = T::zero();
            for j in 1..=k {
                acc = acc + T::from_usize_lossy(j) * self.c[j] * e[k - j];
            }
            e[k] = acc / T::from_usize_lossy(k);
        }
        Self { c: e }
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let mut s = [T::zero(); N];
        let mut co = [T::zero(); N];
        (s[0], co[0]) = self.c[0].sin_cos();
        for k in 1..N {
            let mut as_ = T::zero();
            let mut ac = T::zero();
            for j in 1..=k {
                let w = T::from_usize_lossy(j) * self.c[j];
                as_ = as_ + w * co[k - j];
                ac = ac - w * s[k - j];
            }
            let kk = T::from_usize_lossy(k);
            s[k] = as_ / kk;
            co[k] = ac / kk;
        }
        (Self { c: s }, Self { c: co })
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }
}

impl<T: Real, const N: usize> Add for Jet<T, N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a = *a + b;
        }
        Self { c }
    }
}

impl<T: Real, const N: usize> Sub for Jet<T, N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a = *a - b;
        }
        Self { c }
    }
}

impl<T: Real, const N: usize> Neg for Jet<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real, const N: usize> Mul for Jet<T, N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [T::zero(); N];
        for i in 0..N {
            for j in 0..N - i {
                c[i + j] = c[i + j] + self.c[i] * o.c[j];
            }
        }
        Self { c }
    }
}

impl<T: Real, const N: usize> Div for Jet<T, N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let mut q = [T::zero(); N];
        for k in 0..N {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc = acc - o.c[j] * q[k - j];
            }
            q[k] = acc / o.c[0];
        }
        Self { c: q }
    }
}

impl<T: Real, const N: usize> Ring for Jet<T, N> {
    fn from_lit(x: f64) -> Self {
        Self::constant(T::lit(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type J = Jet<f64, 5>;

    #[test]
    fn product_and_quotient_derivatives() {
        let x = J::variable(0.7);
        // f = x^3 / (1 + x)
        let f = x * x * x / (J::constant(1.0) + x);
        let x0: f64 = 0.7;
        let d1 = (3.0 * x0 * x0 * (1.0 + x0) - x0.powi(3)) / (1.0 + x0).powi(2);
        assert!((f.value() - x0.powi(3) / 1.7).abs() < 1e-15);
        assert!((f.derivative(1) - d1).abs() < 1e-14);
    }

    #[test]
    fn transcendental_series() {
        let x = J::variable(0.3);
        let (s, c) = x.sin_cos();
        for k in 0..5 {
            let expect_s = match k % 4 {
                0 => 0.3f64.sin(),
                1 => 0.3f64.cos(),
                2 => -0.3f64.sin(),
                _ => -0.3f64.cos(),
            };
            assert!((s.derivative(k) - expect_s).abs() < 1e-13, "sin d{k}");
        }
        assert!((c.derivative(2) + 0.3f64.cos()).abs() < 1e-13);
        let e = x.exp();
        for k in 0..5 {
            assert!((e.derivative(k) - 0.3f64.exp()).abs() < 1e-13);
        }
        let r = (x * x + J::constant(1.0)).sqrt();
        // d/dx sqrt(1+x^2) = x / sqrt(1+x^2)
        assert!((r.derivative(1) - 0.3 / 1.09f64.sqrt()).abs() < 1e-14);
        // second derivative = (1+x^2)^(-3/2)
        assert!((r.derivative(2) - 1.09f64.powf(-1.5)).abs() < 1e-13);
    }

    #[test]
    fn diff_shifts_order() {
        let x = J::variable(2.0);
        let f = x * x * x; // f' = 3x^2, f'' = 6x
        let df = f.diff();
        assert!((df.value() - 12.0).abs() < 1e-14);
        assert!((df.derivative(1) - 12.0).abs() < 1e-14);
    }
}

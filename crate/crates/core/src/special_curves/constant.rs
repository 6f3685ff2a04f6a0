use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quadrature::integrate;
use crate::scalar::Real;

use super::Sign;

/// Constant-curvature curve on a cylinder of radius `rho`.
///
/// The torsion is tracked through `x = ±√(9 − 4ρ²τ²)`, signed so that the
/// cylinder root is `ψ = 1/2 + x/6` on the upper branch; a negative `x` is
/// the lower branch. `branch` picks the upper (`Plus`) or lower (`Minus`)
/// sign of the `∓` in the torsion ODE and its integral.
///
/// For the closed form at `ρκ₀ = 1`, `τ = tau_sign·(6√2/ρ)·√Y(Y − 1)/(Y² + 6Y + 1)`
/// with `Y = c·exp(growth·2√2 s/ρ)`. For the integral form the arc starts
/// at `(s0, x0)`, `x` moves with sign `direction` as `s` grows, and
/// `τ = tau_sign·√(9 − x²)/(2ρ)` along the arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantCurvatureSpec<T> {
    pub kappa0: T,
    pub rho: T,
    pub branch: Sign,
    pub c: T,
    pub growth: Sign,
    pub tau_sign: Sign,
    pub s0: T,
    pub x0: T,
    pub direction: Sign,
}

impl<T: Real> ConstantCurvatureSpec<T> {
    /// Closed-form spec for `ρκ₀ = 1`; the integral fields start at `s = 0`.
    pub fn exact(rho: T, c: T, growth: Sign, tau_sign: Sign) -> Result<Self> {
        if !(rho > T::zero()) || !(c > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "need rho > 0 and C > 0, got {rho}, {c}"
            )));
        }
        let spec = Self {
            kappa0: rho.recip(),
            rho,
            branch: Sign::Plus,
            c,
            growth,
            tau_sign,
            s0: T::zero(),
            x0: T::zero(),
            direction: Sign::Plus,
        };
        spec.with_start(T::zero())
    }

    /// Moves the integral start to `s0` on the closed-form solution. When
    /// needed `(c, growth, tau_sign)` is replaced by the equivalent
    /// `(1/c, −growth, −tau_sign)` so that `tau_sign` is the sign of `τ(s0)`.
    pub fn with_start(mut self, s0: T) -> Result<Self> {
        check_exact(self.rho, self.kappa0)?;
        let tau = const_curvature_torsion_exact_jet::<T, 2>(&self, Jet::variable(s0))?;
        if tau.value() != T::zero() && Sign::of(tau.value()) != self.tau_sign {
            self.c = self.c.recip();
            self.growth = self.growth.flip();
            self.tau_sign = self.tau_sign.flip();
        }
        let x = exact_x_jet::<T, 2>(&self, Jet::variable(s0));
        self.s0 = s0;
        self.x0 = x.value();
        self.direction = Sign::of(x.derivative(1));
        Ok(self)
    }
}

fn check_exact<T: Real>(rho: T, kappa0: T) -> Result<()> {
    let rk = rho * kappa0;
    if (rk - T::one()).abs() > T::lit(1e-12) {
        return Err(Error::ExactFormInapplicable {
            rho_kappa: rk.as_f64(),
        });
    }
    Ok(())
}

fn growth_y<T: Real, const N: usize>(spec: &ConstantCurvatureSpec<T>, s: Jet<T, N>) -> Jet<T, N> {
    let k = spec.growth.value::<T>() * T::lit(2.0 * std::f64::consts::SQRT_2) / spec.rho;
    s.scale(k).exp().scale(spec.c)
}

fn exact_x_jet<T: Real, const N: usize>(
    spec: &ConstantCurvatureSpec<T>,
    s: Jet<T, N>,
) -> Jet<T, N> {
    let y = growth_y(spec, s);
    let one = Jet::constant(T::one());
    let y2 = y * y;
    (y2 - y.scale(T::lit(10.0)) + one).scale(T::lit(3.0)) / (y2 + y.scale(T::lit(6.0)) + one)
}

/// Signed `x(s) = 3(Y² − 10Y + 1)/(Y² + 6Y + 1)` of the closed form.
pub fn exact_x<T: Real>(spec: &ConstantCurvatureSpec<T>, s: T) -> Result<T> {
    check_exact(spec.rho, spec.kappa0)?;
    Ok(exact_x_jet::<T, 1>(spec, Jet::constant(s)).value())
}

/// Closed-form torsion on jets, for exact arc-length derivatives.
pub fn const_curvature_torsion_exact_jet<T: Real, const N: usize>(
    spec: &ConstantCurvatureSpec<T>,
    s: Jet<T, N>,
) -> Result<Jet<T, N>> {
    check_exact(spec.rho, spec.kappa0)?;
    let y = growth_y(spec, s);
    let one = Jet::constant(T::one());
    let num = y.sqrt() * (y - one);
    let den = y * y + y.scale(T::lit(6.0)) + one;
    let k = spec.tau_sign.value::<T>() * T::lit(6.0 * std::f64::consts::SQRT_2) / spec.rho;
    Ok((num / den).scale(k))
}

/// Closed-form torsion; requires `ρκ₀ = 1` within 1e-12.
pub fn const_curvature_torsion_exact<T: Real>(spec: &ConstantCurvatureSpec<T>, s: T) -> Result<T> {
    Ok(const_curvature_torsion_exact_jet::<T, 1>(spec, Jet::constant(s))?.value())
}

/// `C` of the closed form (with `growth = +` and `tau_sign = +`) through the
/// initial data `τ(s0) = tau0`, `x(s0) = x0`.
pub fn constant_from_initial<T: Real>(rho: T, s0: T, tau0: T, x0: T) -> Result<T> {
    let three = T::lit(3.0);
    if !(x0 >= -three && x0 < three) {
        return Err(Error::InvalidInput(format!("x0 = {x0} outside [-3, 3)")));
    }
    let mismatch = (x0 * x0 + T::lit(4.0) * rho * rho * tau0 * tau0 - T::lit(9.0)).abs();
    if mismatch > T::lit(1e-9) {
        return Err(Error::InvalidInput(format!(
            "x0 and tau0 inconsistent: x0² + 4ρ²τ0² − 9 = {mismatch}"
        )));
    }
    let rad = ((x0 + three) * (x0 + T::lit(9.0))).sqrt();
    let mut y =
        (T::lit(15.0) + three * x0 + T::lit(2.0 * std::f64::consts::SQRT_2) * rad) / (three - x0);
    // the other root is 1/Y; pick the one whose τ has the sign of tau0
    if tau0 < T::zero() {
        y = y.recip();
    }
    Ok(y * (-T::lit(2.0 * std::f64::consts::SQRT_2) * s0 / rho).exp())
}

fn bound_check<T: Real>(rho: T, tau: T) -> Result<T> {
    let rad = T::lit(9.0) - T::lit(4.0) * rho * rho * tau * tau;
    if !(rad > T::zero()) {
        let bound = T::lit(1.5) / rho;
        return Err(Error::TorsionBoundViolated {
            tau: tau.as_f64(),
            bound: bound.as_f64(),
        });
    }
    Ok(rad)
}

/// `ρ⁴τ′²/(9 − 4ρ²τ²) − (ρ²κ₀² − 1/2 + ρ²τ²/9 ∓ √(9 − 4ρ²τ²)/6)` on the
/// chosen branch.
pub fn const_curvature_torsion_ode_residual<T: Real>(
    rho: T,
    kappa0: T,
    branch: Sign,
    tau: T,
    tau1: T,
) -> Result<T> {
    let rad = bound_check(rho, tau)?;
    let r2 = rho * rho;
    let lhs = r2 * r2 * tau1 * tau1 / rad;
    let rhs = r2 * kappa0 * kappa0 - T::lit(0.5) + r2 * tau * tau / T::lit(9.0)
        - branch.value::<T>() * rad.sqrt() / T::lit(6.0);
    Ok(lhs - rhs)
}

/// Smaller absolute residual over both branches.
pub fn const_curvature_torsion_ode_residual_any<T: Real>(
    rho: T,
    kappa0: T,
    tau: T,
    tau1: T,
) -> Result<T> {
    let p = const_curvature_torsion_ode_residual(rho, kappa0, Sign::Plus, tau, tau1)?;
    let m = const_curvature_torsion_ode_residual(rho, kappa0, Sign::Minus, tau, tau1)?;
    Ok(p.abs().min(m.abs()))
}

/// Torsion at `s` from the elliptic integral
/// `direction·(s − s0)/(3ρ) = ∫_{x0}^{x} dx/√((9 − x²)(36ρ²κ₀² − 9 ∓ 6x − x²))`.
///
/// The solution is followed from `s0` up to the first turning point (a
/// simple zero of the integrand's radicand) and not continued through it;
/// asking for `s` beyond it gives `IntegrandSingular`.
pub fn const_curvature_torsion_integral<T: Real>(
    spec: &ConstantCurvatureSpec<T>,
    s: T,
) -> Result<T> {
    let (rho, k0) = (spec.rho, spec.kappa0);
    if !(rho > T::zero()) || !(k0 > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "need rho > 0 and kappa0 > 0, got {rho}, {k0}"
        )));
    }
    let three = T::lit(3.0);
    let sigma = spec.branch.value::<T>();
    let tau_of = |x: T| {
        spec.tau_sign.value::<T>() * ((three - x) * (three + x)).max(T::zero()).sqrt()
            / (T::lit(2.0) * rho)
    };
    let x0 = spec.x0;
    let g = spec.direction.value::<T>() * (s - spec.s0) / (three * rho);
    if g == T::zero() {
        return Ok(tau_of(x0));
    }
    // Q(x) = (x² − 9)(x² + 6σx − c) = Π (x − rᵢ)
    let roots = [
        three,
        -three,
        -three * sigma + T::lit(6.0) * rho * k0,
        -three * sigma - T::lit(6.0) * rho * k0,
    ];
    let q = |x: T| roots.iter().fold(T::one(), |p, &r| p * (x - r));
    if !(q(x0) > T::zero()) {
        return Err(Error::IntegrandSingular {
            s: spec.s0.as_f64(),
            tau: tau_of(x0).as_f64(),
        });
    }
    let mv = Sign::of(g).value::<T>();
    let xe = roots
        .iter()
        .copied()
        .filter(|&r| (r - x0) * mv > T::zero())
        .fold(None, |best: Option<T>, r| match best {
            Some(b) if (b - x0).abs() <= (r - x0).abs() => Some(b),
            _ => Some(r),
        })
        .expect("x0 lies between roots of Q");
    let close = T::lit(1e-9) * (T::one() + xe.abs());
    let multiplicity = roots.iter().filter(|&&r| (r - xe).abs() <= close).count();
    // Q / (x − xe) with one copy of the end root removed
    let pe = |x: T| {
        let mut skipped = false;
        roots.iter().fold(T::one(), |p, &r| {
            if !skipped && (r - xe).abs() <= close {
                skipped = true;
                p
            } else {
                p * (x - r)
            }
        })
    };
    // x = xe − mv·w² turns the endpoint singularity into a smooth integrand
    let integrand = |w: T| T::lit(2.0) / (-mv * pe(xe - mv * w * w)).sqrt();
    let w0 = (xe - x0).abs().sqrt();
    let tol = T::lit(1e-14);
    let big_g = |w: T| integrate(integrand, w, w0, tol, T::zero()).value;
    let target = g.abs();

    let mut lo = T::zero();
    if multiplicity == 1 {
        let gmax = big_g(T::zero());
        if target > gmax {
            let s_turn = spec.s0 + spec.direction.value::<T>() * mv * three * rho * gmax;
            return Err(Error::IntegrandSingular {
                s: s_turn.as_f64(),
                tau: tau_of(xe).as_f64(),
            });
        }
    } else {
        // double end root: the integral diverges, so a bracket always exists
        lo = w0;
        for _ in 0..400 {
            lo = lo * T::lit(0.5);
            if big_g(lo) >= target {
                break;
            }
        }
    }
    let mut hi = w0;
    let mut w = (lo + hi) * T::lit(0.5);
    for _ in 0..200 {
        let f = big_g(w) - target;
        if f > T::zero() {
            lo = w;
        } else {
            hi = w;
        }
        let mut next = w + f / integrand(w);
        if !(next > lo && next < hi) {
            next = (lo + hi) * T::lit(0.5);
        }
        let done = (next - w).abs() <= T::lit(4.0) * T::epsilon() * w.max(T::min_positive_value());
        w = next;
        if done || hi - lo <= T::epsilon() * hi {
            break;
        }
    }
    Ok(tau_of(xe - mv * w * w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(c: f64) -> ConstantCurvatureSpec<f64> {
        ConstantCurvatureSpec::exact(1.0, c, Sign::Plus, Sign::Plus).unwrap()
    }

    #[test]
    fn x_and_tau_are_consistent() {
        for c in [0.5, 1.0, 2.0] {
            let sp = spec(c);
            for i in 0..41 {
                let s = -2.0 + 0.1 * i as f64;
                let t = const_curvature_torsion_exact(&sp, s).unwrap();
                let x = exact_x(&sp, s).unwrap();
                assert!((x * x + 4.0 * t * t - 9.0).abs() < 1e-12);
                assert!(t.abs() <= 1.5);
            }
        }
    }

    #[test]
    fn exact_solves_the_ode_by_finite_differences() {
        // independent oracle: central differences of the closed form
        let sp = spec(2.0);
        let h = 1e-5;
        for s in [-1.3, -0.2, 0.4, 1.7] {
            let t = const_curvature_torsion_exact(&sp, s).unwrap();
            let t1 = (const_curvature_torsion_exact(&sp, s + h).unwrap()
                - const_curvature_torsion_exact(&sp, s - h).unwrap())
                / (2.0 * h);
            let r = const_curvature_torsion_ode_residual_any(1.0, 1.0, t, t1).unwrap();
            assert!(r < 1e-8, "{r}");
        }
    }

    #[test]
    fn exact_needs_unit_rho_kappa() {
        let mut sp = spec(1.0);
        sp.kappa0 = 1.1;
        assert!(matches!(
            const_curvature_torsion_exact(&sp, 0.0),
            Err(Error::ExactFormInapplicable { .. })
        ));
    }

    #[test]
    fn torsion_bound() {
        assert!(matches!(
            const_curvature_torsion_ode_residual(1.0, 1.0, Sign::Plus, 1.6, 0.0),
            Err(Error::TorsionBoundViolated { .. })
        ));
    }

    #[test]
    fn initial_data_recovers_constant() {
        for c in [0.5, 2.0] {
            let sp = spec(c);
            for s0 in [-1.0, 0.3] {
                let t = const_curvature_torsion_exact(&sp, s0).unwrap();
                let x = exact_x(&sp, s0).unwrap();
                let got = constant_from_initial(1.0, s0, t, x).unwrap();
                assert!((got - c).abs() < 1e-12 * c, "{got} {c}");
            }
        }
    }

    #[test]
    fn integral_matches_closed_form_on_an_arc() {
        let sp = spec(2.0).with_start(0.5).unwrap();
        for s in [0.6, 1.0, 2.0, 0.3, 0.0] {
            let a = const_curvature_torsion_integral(&sp, s).unwrap();
            let b = const_curvature_torsion_exact(&sp, s).unwrap();
            assert!((a - b).abs() < 1e-10, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn turning_point_is_flagged() {
        // Y = 2 e^{2√2 s} crosses 1 at s* = −ln 2/(2√2), where x = −3
        let sp = spec(2.0).with_start(0.5).unwrap();
        let s_star = -(2.0f64).ln() / (2.0 * std::f64::consts::SQRT_2);
        match const_curvature_torsion_integral(&sp, -1.0) {
            Err(Error::IntegrandSingular { s, tau }) => {
                assert!((s - s_star).abs() < 1e-9, "{s} vs {s_star}");
                assert!(tau.abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }
}

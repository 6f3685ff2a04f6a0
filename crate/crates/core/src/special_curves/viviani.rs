use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frenet::{linspace, AnalyticCurve, InvariantProfile, InvariantRecord, ProfileMeta};
use crate::jet::Jet;
use crate::quadrature::integrate;
use crate::scalar::Real;

/// Viviani curve `ρ(1 + cos t, sin t, 2 sin(t/2))` over a parameter range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VivianiSpec<T> {
    pub rho: T,
    pub t_range: (T, T),
}

impl<T: Real> VivianiSpec<T> {
    pub fn new(rho: T, t_range: (T, T)) -> Result<Self> {
        if !(rho > T::zero()) || !(t_range.1 > t_range.0) {
            return Err(Error::InvalidInput(format!(
                "need rho > 0 and a non-empty range, got {rho}, {t_range:?}"
            )));
        }
        Ok(Self { rho, t_range })
    }

    pub fn curve(&self) -> Result<AnalyticCurve<T>> {
        AnalyticCurve::viviani(self.rho, self.t_range)
    }
}

/// Closed-form quantities at parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VivianiForms<T> {
    pub position: [T; 3],
    pub speed: T,
    pub kappa: T,
    /// `dκ/ds`
    pub kappa1: T,
    pub tau: T,
    pub psi: T,
}

struct Jets<T: Real> {
    speed: Jet<T, 3>,
    kappa: Jet<T, 3>,
    tau: Jet<T, 3>,
}

fn jets<T: Real>(rho: T, t: T) -> Jets<T> {
    let tj = Jet::<T, 3>::variable(t);
    let c = tj.cos();
    let lit = |x: f64| Jet::constant(T::lit(x));
    let three_c = lit(3.0) + c;
    let thirteen = lit(13.0) + c.scale(T::lit(3.0));
    let speed = (three_c.scale(T::lit(0.5))).sqrt().scale(rho);
    let kappa = thirteen.sqrt() / (three_c * three_c.sqrt()).scale(rho);
    let tau = tj.scale(T::lit(0.5)).cos().scale(T::lit(6.0)) / thirteen.scale(rho);
    Jets { speed, kappa, tau }
}

pub fn viviani_closed_forms<T: Real>(spec: &VivianiSpec<T>, t: T) -> VivianiForms<T> {
    let rho = spec.rho;
    let (s, c) = t.sin_cos();
    let three_c = T::lit(3.0) + c;
    let thirteen = T::lit(13.0) + T::lit(3.0) * c;
    VivianiForms {
        position: [
            rho * (T::one() + c),
            rho * s,
            T::lit(2.0) * rho * (t * T::lit(0.5)).sin(),
        ],
        speed: rho * (three_c * T::lit(0.5)).sqrt(),
        kappa: thirteen.sqrt() / (rho * three_c * three_c.sqrt()),
        kappa1: T::lit(3.0 * std::f64::consts::SQRT_2) * s * (T::lit(5.0) + c)
            / (rho * rho * three_c * three_c * three_c * thirteen.sqrt()),
        tau: T::lit(6.0) * (t * T::lit(0.5)).cos() / (rho * thirteen),
        psi: T::lit(2.0) / three_c,
    }
}

/// Exact invariant profile at `n` equally spaced parameter values; the
/// records carry `t` as their parameter.
pub fn viviani_profile<T: Real>(spec: &VivianiSpec<T>, n: usize) -> Result<InvariantProfile<T>> {
    let ts = linspace(spec.t_range.0, spec.t_range.1, n);
    let speed = |t: T| jets(spec.rho, t).speed.value();
    let mut s = Vec::with_capacity(n);
    let mut acc = T::zero();
    for (i, &t) in ts.iter().enumerate() {
        if i > 0 {
            acc = acc + integrate(speed, ts[i - 1], t, T::lit(1e-14), T::zero()).value;
        }
        s.push(acc);
    }
    let records = ts
        .iter()
        .zip(&s)
        .map(|(&t, &s)| {
            let j = jets(spec.rho, t);
            let v = j.speed.value();
            let k_s = j.kappa.diff() / j.speed;
            let mut r = InvariantRecord::new(
                s,
                j.kappa.value(),
                k_s.value(),
                k_s.diff().value() / v,
                j.tau.value(),
                j.tau.derivative(1) / v,
            );
            r.param = Some(t);
            r
        })
        .collect();
    InvariantProfile::new(records, ProfileMeta::given())
}

/// Residual of `(13 + 3cos t) u̇ + u sin t = ±2√(1 + cos t)√(13 + 3cos t − (3 + cos t)u²)`
/// for `u = ψ(3 + cos t)`, smaller over the two signs.
pub fn viviani_simplified_ode_residual<T: Real>(t: T, u: T, u_dot: T) -> Result<T> {
    let (s, c) = t.sin_cos();
    let (sh, ch) = (t * T::lit(0.5)).sin_cos();
    let two = T::lit(2.0);
    // half-angle forms keep both radicands accurate where they vanish
    let radicand = T::lit(4.0) * (two - u) * (two + u) - two * (T::lit(3.0) - u * u) * sh * sh;
    let scale = (T::lit(13.0) + T::lit(3.0) * c).max((T::lit(3.0) + c) * u * u);
    if radicand < -T::lit(64.0) * T::epsilon() * scale {
        return Err(Error::RadicandNegative(radicand.as_f64()));
    }
    let lhs = (T::lit(13.0) + T::lit(3.0) * c) * u_dot + u * s;
    let rhs = two * (two * ch * ch).sqrt() * radicand.max(T::zero()).sqrt();
    Ok((lhs - rhs).abs().min((lhs + rhs).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::Vec3;

    #[test]
    fn closed_forms_match_derivative_formulas() {
        // independent oracle: curvature and torsion from the exact derivatives
        let spec = VivianiSpec::new(1.3f64, (0.0, 6.0)).unwrap();
        let curve = spec.curve().unwrap();
        for t in [0.0, 0.7, 2.0, 3.0, 4.5] {
            let f = viviani_closed_forms(&spec, t);
            let (k, tau) = curve.curvature_torsion(t);
            assert!((f.kappa - k).abs() < 1e-14 && (f.tau - tau).abs() < 1e-14);
            assert!((f.speed - curve.speed(t)).abs() < 1e-14);
            assert!((Vec3::from_array(f.position) - curve.position(t)).norm() < 1e-15);
            // dκ/ds by central differences in t
            let h = 1e-5;
            let kd = (curve.curvature_torsion(t + h).0 - curve.curvature_torsion(t - h).0)
                / (2.0 * h)
                / f.speed;
            assert!((f.kappa1 - kd).abs() < 1e-8, "t={t}: {} vs {kd}", f.kappa1);
        }
    }

    #[test]
    fn profile_uses_closed_forms() {
        let spec = VivianiSpec::new(1.0f64, (0.1, 3.0)).unwrap();
        let p = viviani_profile(&spec, 30).unwrap();
        for r in p.records() {
            let f = viviani_closed_forms(&spec, r.param.unwrap());
            assert!((r.kappa1 - f.kappa1).abs() < 1e-14);
        }
        assert!(p.records()[0].s == 0.0);
    }

    #[test]
    fn constant_solution_of_simplified_ode() {
        for i in 0..60 {
            let t = -3.1 + 0.105 * i as f64;
            assert!(viviani_simplified_ode_residual(t, 2.0, 0.0).unwrap() < 1e-14);
        }
    }

    #[test]
    fn negative_radicand() {
        assert!(matches!(
            viviani_simplified_ode_residual(0.0f64, 3.0, 0.0),
            Err(Error::RadicandNegative(_))
        ));
    }
}

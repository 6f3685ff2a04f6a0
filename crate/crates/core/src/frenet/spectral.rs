//! Whole-curve Chebyshev least-squares fit. Noise enters the estimated
//! fourth derivative far less than with short windows, at the price of
//! needing the curve to be smooth over its full length.

use crate::jet::Jet;
use crate::linalg::Qr;
use crate::scalar::Real;
use crate::vec3::Vec3;

use super::window::LocalFit;

type J6<T> = Jet<T, 6>;

/// Chebyshev series of each coordinate in the parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFit<T> {
    lo: T,
    hi: T,
    coeffs: [Vec<T>; 3],
    /// Chosen polynomial degree.
    pub degree: usize,
    /// Root-mean-square coordinate residual of the fit.
    pub rms: T,
}

/// Degree cap for `n` samples: least squares on equispaced nodes stays well
/// conditioned while the degree is below about `2√n`.
pub fn default_max_degree(n: usize) -> usize {
    ((2.0 * (n as f64).sqrt()) as usize)
        .min(n / 4)
        .clamp(6, 160)
}

fn unit<T: Real>(lo: T, hi: T, u: T) -> T {
    (u + u - lo - hi) / (hi - lo)
}

impl<T: Real> SpectralFit<T> {
    /// Fits degrees `5..=max_degree` from one nested QR and keeps the one
    /// with the smallest generalized cross-validation score
    /// `RSS / (1 − m/n)²`, where `m` is the number of coefficients.
    pub fn fit(params: &[T], points: &[Vec3<T>], max_degree: usize) -> Option<Self> {
        let n = points.len();
        let cols = (max_degree + 1).min(n.saturating_sub(2));
        if cols < 7 {
            return None;
        }
        let (lo, hi) = (params[0], params[n - 1]);
        if !(hi > lo) {
            return None;
        }
        let centroid = points.iter().fold(Vec3::zero(), |a, &p| a + p) / T::from_usize_lossy(n);
        let mut a = Vec::with_capacity(n * cols);
        let mut rhs = vec![Vec::new(); 3];
        for (&u, &p) in params.iter().zip(points) {
            let x = unit(lo, hi, u);
            let (mut prev, mut cur) = (T::one(), x);
            a.push(prev);
            a.push(cur);
            for _ in 2..cols {
                let next = T::lit(2.0) * x * cur - prev;
                a.push(next);
                prev = cur;
                cur = next;
            }
            let d = p - centroid;
            rhs[0].push(d.x);
            rhs[1].push(d.y);
            rhs[2].push(d.z);
        }
        let qr = Qr::new(&a, n, cols, &rhs)?;
        let nf = T::from_usize_lossy(n);
        let gcv = |m: usize| {
            let dof = T::one() - T::from_usize_lossy(m) / nf;
            qr.rss_leading(m) / (dof * dof)
        };
        let m = (6..=cols).min_by(|&x, &y| {
            gcv(x)
                .partial_cmp(&gcv(y))
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let mut sol = qr.solve_leading(m);
        let c0 = centroid.to_array();
        for (axis, c) in sol.iter_mut().enumerate() {
            c[0] = c[0] + c0[axis];
        }
        let rms = (qr.rss_leading(m) / (T::lit(3.0) * nf)).sqrt();
        let [x, y, z]: [Vec<T>; 3] = sol.try_into().ok()?;
        Some(Self {
            lo,
            hi,
            coeffs: [x, y, z],
            degree: m - 1,
            rms,
        })
    }

    /// Taylor expansion of the fit around parameter `u`, in the form the
    /// window estimator differentiates.
    pub fn local(&self, u: T) -> LocalFit<T> {
        let scale = T::lit(2.0) / (self.hi - self.lo);
        let x = J6::from_coeffs([
            unit(self.lo, self.hi, u),
            scale,
            T::zero(),
            T::zero(),
            T::zero(),
            T::zero(),
        ]);
        let mut sums = [J6::constant(T::zero()); 3];
        let (mut prev, mut cur) = (J6::constant(T::one()), x);
        let two_x = x.scale(T::lit(2.0));
        for k in 0..self.coeffs[0].len() {
            let basis = if k == 0 { prev } else { cur };
            for (axis, sum) in sums.iter_mut().enumerate() {
                *sum = *sum + basis.scale(self.coeffs[axis][k]);
            }
            if k >= 1 {
                let next = two_x * cur - prev;
                prev = cur;
                cur = next;
            }
        }
        LocalFit {
            center: u,
            coeffs: sums,
            one_sided: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_and_its_derivatives() {
        let params: Vec<f64> = (0..60).map(|i| -1.0 + 3.0 * i as f64 / 59.0).collect();
        let pts: Vec<_> = params
            .iter()
            .map(|&u| Vec3::new(u, u * u, u * u * u))
            .collect();
        let fit = SpectralFit::fit(&params, &pts, 12).unwrap();
        let l = fit.local(0.4);
        assert!((l.position(0.4) - Vec3::new(0.4, 0.16, 0.064)).norm() < 1e-12);
        assert!((l.derivative(0.4, 3) - Vec3::new(0.0, 0.0, 6.0)).norm() < 1e-9);
        // independent oracle: twisted cubic at u = 0 has κ = 2, τ = 3
        let inv = fit.local(0.0).invariants();
        assert!((inv.kappa - 2.0).abs() < 1e-9 && (inv.tau - 3.0).abs() < 1e-9);
    }

    #[test]
    fn gcv_stops_at_noise_level() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 1e-3).unwrap();
        let params: Vec<f64> = (0..400).map(|i| i as f64 / 399.0).collect();
        let pts: Vec<_> = params
            .iter()
            .map(|&u| {
                Vec3::new(
                    u.cos() + noise.sample(&mut rng),
                    u.sin() + noise.sample(&mut rng),
                    u + noise.sample(&mut rng),
                )
            })
            .collect();
        let fit = SpectralFit::fit(&params, &pts, 40).unwrap();
        assert!(fit.degree < 15, "{}", fit.degree);
        assert!((fit.rms - 1e-3).abs() < 2e-4, "{}", fit.rms);
    }
}

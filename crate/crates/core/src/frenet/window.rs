use crate::jet::Jet;
use crate::linalg::lstsq;
use crate::scalar::Real;
use crate::vec3::{triple, Vec3};

/// Highest polynomial degree a local fit may use.
pub const MAX_DEGREE: usize = 5;

type J6<T> = Jet<T, 6>;
type J3<T> = Jet<T, 3>;

/// Per-coordinate polynomial least-squares fit over a sliding window,
/// stored as Taylor coefficients around the window's anchor sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFit<T> {
    pub center: T,
    pub coeffs: [J6<T>; 3],
    /// The window could not be centred on the anchor (curve ends).
    pub one_sided: bool,
}

/// Curvature, torsion and their arc-length derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointInvariants<T> {
    pub kappa: T,
    pub kappa1: T,
    pub kappa2: T,
    pub tau: T,
    pub tau1: T,
    pub speed: T,
    /// `‖r′ × r″‖ / ‖r′‖²`, a dimensionless-per-length frame health measure
    pub binormal_strength: T,
}

impl<T: Real> LocalFit<T> {
    /// Fits samples `[lo, lo + window)` (clamped to the data) around sample
    /// `index` with a polynomial of the given degree in the parameter.
    pub fn fit(
        params: &[T],
        points: &[Vec3<T>],
        index: usize,
        window: usize,
        degree: usize,
    ) -> Option<Self> {
        let n = points.len();
        let window = window.min(n);
        let degree = degree.min(MAX_DEGREE).min(window.saturating_sub(1));
        let half = window / 2;
        let lo = index.saturating_sub(half).min(n - window);
        let hi = lo + window;
        let one_sided = index < half || index + (window - half) > n;
        let center = params[index];
        let span = (params[hi - 1] - params[lo]) * T::lit(0.5);
        if !(span > T::zero()) {
            return None;
        }
        let cols = degree + 1;
        let mut a = Vec::with_capacity(window * cols);
        let mut rhs = vec![Vec::new(); 3];
        for j in lo..hi {
            let x = (params[j] - center) / span;
            let mut pw = T::one();
            for _ in 0..cols {
                a.push(pw);
                pw = pw * x;
            }
            let d = points[j] - points[index];
            rhs[0].push(d.x);
            rhs[1].push(d.y);
            rhs[2].push(d.z);
        }
        let sol = lstsq(&a, window, cols, &rhs)?;
        let mut coeffs = [J6::constant(T::zero()); 3];
        let origin = points[index].to_array();
        for (axis, c) in sol.iter().enumerate() {
            let mut inv_span_pow = T::one();
            for (k, ck) in c.iter().enumerate() {
                coeffs[axis].c[k] = *ck * inv_span_pow;
                inv_span_pow = inv_span_pow / span;
            }
            coeffs[axis].c[0] = coeffs[axis].c[0] + origin[axis];
        }
        Some(Self {
            center,
            coeffs,
            one_sided,
        })
    }

    fn horner(&self, axis: usize, x: T, order: usize) -> T {
        let c = &self.coeffs[axis].c;
        let mut acc = T::zero();
        for k in (order..6).rev() {
            let mut f = T::one();
            for m in 0..order {
                f = f * T::from_usize_lossy(k - m);
            }
            acc = acc * x + c[k] * f;
        }
        acc
    }

    /// `order`-th derivative of the fitted curve at parameter `u`.
    pub fn derivative(&self, u: T, order: usize) -> Vec3<T> {
        let x = u - self.center;
        Vec3::new(
            self.horner(0, x, order),
            self.horner(1, x, order),
            self.horner(2, x, order),
        )
    }

    pub fn position(&self, u: T) -> Vec3<T> {
        self.derivative(u, 0)
    }

    pub fn speed(&self, u: T) -> T {
        self.derivative(u, 1).norm()
    }

    /// Invariants at the anchor, differentiated through the jet algebra.
    pub fn invariants(&self) -> PointInvariants<T> {
        let trunc = |j: J6<T>| J3::from_coeffs([j.c[0], j.c[1], j.c[2]]);
        let d = |k: usize| -> Vec3<J3<T>> {
            let mut v = [self.coeffs[0], self.coeffs[1], self.coeffs[2]];
            for _ in 0..k {
                v = v.map(|j| j.diff());
            }
            Vec3::new(trunc(v[0]), trunc(v[1]), trunc(v[2]))
        };
        let (r1, r2, r3) = (d(1), d(2), d(3));
        let cross = r1.cross(r2);
        let cross2 = cross.norm_squared();
        let speed = r1.norm_squared().sqrt();
        let kappa = cross2.sqrt() / (speed * speed * speed);
        let tau = triple(r1, r2, r3) / cross2;
        let kappa_s = kappa.diff() / speed;
        let kappa_ss = kappa_s.diff() / speed;
        let tau_s = tau.diff() / speed;
        let v = speed.value();
        PointInvariants {
            kappa: kappa.value(),
            kappa1: kappa_s.value(),
            kappa2: kappa_ss.value(),
            tau: tau.value(),
            tau1: tau_s.value(),
            speed: v,
            binormal_strength: cross2.value().sqrt() / (v * v),
        }
    }
}

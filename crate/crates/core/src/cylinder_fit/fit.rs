use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frenet::CurveSamples;
use crate::linalg::{lstsq, solve, sym_eigen};
use crate::scalar::Real;
use crate::vec3::Vec3;

use super::model::{membership_residual, CylinderModel};

const MIN_POINTS: usize = 6;
const PARAMS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig<T> {
    pub max_iterations: usize,
    /// step norm, in units of the point-cloud scale
    pub step_tol: T,
    /// smallest/largest eigenvalue of JᵀJ below which the fit is ambiguous
    pub degeneracy_ratio: T,
    /// Fibonacci directions on the half sphere tried as initial axes
    pub n_directions: usize,
    /// at most this many local minima of the circle-fit cost over
    /// directions are refined by Levenberg–Marquardt
    pub n_starts: usize,
}

impl<T: Real> Default for FitConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_tol: T::lit(1e-12),
            degeneracy_ratio: T::lit(1e-10),
            n_directions: 256,
            n_starts: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    pub model: CylinderModel<T>,
    pub rms_residual: T,
    pub max_residual: T,
    pub converged: bool,
    pub iterations: usize,
}

/// Points centred on their centroid and scaled to unit radius.
struct Normalized<T> {
    points: Vec<Vec3<T>>,
    centroid: Vec3<T>,
    scale: T,
}

impl<T: Real> Normalized<T> {
    fn new(points: &[Vec3<T>]) -> Self {
        let n = T::from_usize_lossy(points.len());
        let centroid = points
            .iter()
            .fold(Vec3::zero(), |a, &p| a + p)
            .scale(n.recip());
        let scale = points
            .iter()
            .fold(T::zero(), |m, &p| m.max((p - centroid).norm()));
        let inv = scale.recip();
        Self {
            points: points.iter().map(|&p| (p - centroid).scale(inv)).collect(),
            centroid,
            scale,
        }
    }

    fn to_world(&self, m: &Model<T>) -> Result<CylinderModel<T>> {
        CylinderModel::new(
            self.centroid + m.point.scale(self.scale),
            m.dir,
            m.radius * self.scale,
        )
    }

    fn from_world(&self, m: &CylinderModel<T>) -> Model<T> {
        let inv = self.scale.recip();
        Model::new(
            (m.axis_point - self.centroid).scale(inv),
            m.axis_dir,
            m.radius * inv,
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Model<T> {
    point: Vec3<T>,
    dir: Vec3<T>,
    radius: T,
}

impl<T: Real> Model<T> {
    fn new(point: Vec3<T>, dir: Vec3<T>, radius: T) -> Self {
        let dir = dir.normalized();
        Self {
            point: point - dir.scale(point.dot(dir)),
            dir,
            radius,
        }
    }

    fn residuals(&self, pts: &[Vec3<T>]) -> Vec<T> {
        pts.iter()
            .map(|&p| {
                let w = p - self.point;
                (w - self.dir.scale(w.dot(self.dir))).norm() - self.radius
            })
            .collect()
    }

    fn cost(&self, pts: &[Vec3<T>]) -> T {
        self.residuals(pts)
            .iter()
            .fold(T::zero(), |a, &r| a + r * r)
    }

    /// Row-major Jacobian in the local coordinates `(u, v, α, β, r)`:
    /// point moves by `u e₁ + v e₂`, direction by `α e₁ + β e₂`.
    fn jacobian(&self, pts: &[Vec3<T>]) -> (Vec<T>, [Vec3<T>; 2]) {
        let e1 = self.dir.any_orthogonal();
        let e2 = self.dir.cross(e1);
        let mut jac = Vec::with_capacity(pts.len() * PARAMS);
        for &p in pts {
            let w = p - self.point;
            let along = w.dot(self.dir);
            let q = w - self.dir.scale(along);
            let qn = q.norm();
            let (g1, g2) = if qn > T::zero() {
                (q.dot(e1) / qn, q.dot(e2) / qn)
            } else {
                (T::zero(), T::zero())
            };
            jac.extend_from_slice(&[-g1, -g2, -along * g1, -along * g2, -T::one()]);
        }
        (jac, [e1, e2])
    }

    fn stepped(&self, delta: &[T], basis: [Vec3<T>; 2]) -> Self {
        let [e1, e2] = basis;
        let point = self.point + e1.scale(delta[0]) + e2.scale(delta[1]);
        let dir = self.dir + e1.scale(delta[2]) + e2.scale(delta[3]);
        Self::new(point, dir, self.radius + delta[4])
    }
}

fn normal_matrix<T: Real>(jac: &[T], res: &[T]) -> (Vec<T>, Vec<T>) {
    let mut jtj = vec![T::zero(); PARAMS * PARAMS];
    let mut jtr = vec![T::zero(); PARAMS];
    for (row, &r) in jac.chunks(PARAMS).zip(res) {
        for i in 0..PARAMS {
            jtr[i] = jtr[i] + row[i] * r;
            for j in 0..PARAMS {
                jtj[i * PARAMS + j] = jtj[i * PARAMS + j] + row[i] * row[j];
            }
        }
    }
    (jtj, jtr)
}

/// Levenberg–Marquardt refinement; returns the model, iterations used and
/// whether the step criterion was met.
fn refine<T: Real>(
    pts: &[Vec3<T>],
    start: Model<T>,
    config: &FitConfig<T>,
) -> (Model<T>, usize, bool) {
    let mut model = start;
    let mut cost = model.cost(pts);
    let mut lambda = T::lit(1e-3);
    for it in 1..=config.max_iterations {
        let res = model.residuals(pts);
        let (jac, basis) = model.jacobian(pts);
        let (jtj, jtr) = normal_matrix(&jac, &res);
        loop {
            let mut a = jtj.clone();
            for i in 0..PARAMS {
                a[i * PARAMS + i] =
                    a[i * PARAMS + i] * (T::one() + lambda) + lambda * T::lit(1e-12);
            }
            let rhs: Vec<T> = jtr.iter().map(|&v| -v).collect();
            let Some(delta) = solve(a, rhs) else {
                lambda = lambda * T::lit(10.0);
                if lambda > T::lit(1e20) {
                    return (model, it, true);
                }
                continue;
            };
            let step = delta.iter().fold(T::zero(), |a, &d| a + d * d).sqrt();
            let trial = model.stepped(&delta, basis);
            let trial_cost = trial.cost(pts);
            if trial_cost <= cost && trial.radius > T::zero() {
                model = trial;
                cost = trial_cost;
                lambda = (lambda / T::lit(3.0)).max(T::lit(1e-15));
                if step < config.step_tol {
                    return (model, it, true);
                }
                break;
            }
            if step < config.step_tol {
                // no decrease even for a negligible step: at the minimum
                return (model, it, true);
            }
            lambda = lambda * T::lit(4.0);
            if lambda > T::lit(1e20) {
                return (model, it, true);
            }
        }
    }
    (model, config.max_iterations, false)
}

/// Algebraic circle fit of the points projected along `dir`.
fn circle_guess<T: Real>(pts: &[Vec3<T>], dir: Vec3<T>) -> Option<(Model<T>, T)> {
    let e1 = dir.any_orthogonal();
    let e2 = dir.cross(e1);
    let mut a = Vec::with_capacity(pts.len() * 3);
    let mut b = Vec::with_capacity(pts.len());
    for &p in pts {
        let (x, y) = (p.dot(e1), p.dot(e2));
        a.extend_from_slice(&[x, y, T::one()]);
        b.push(-(x * x + y * y));
    }
    let sol = lstsq(&a, pts.len(), 3, &[b])?;
    let (cx, cy) = (-sol[0][0] * T::lit(0.5), -sol[0][1] * T::lit(0.5));
    let r2 = cx * cx + cy * cy - sol[0][2];
    if !(r2 > T::zero()) || !r2.is_finite() {
        return None;
    }
    let model = Model::new(e1.scale(cx) + e2.scale(cy), dir, r2.sqrt());
    let cost = model.cost(pts);
    Some((model, cost))
}

fn fibonacci_half_sphere<T: Real>(n: usize) -> Vec<Vec3<T>> {
    let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
    (0..n)
        .map(|k| {
            let z = (T::from_usize_lossy(k) + T::lit(0.5)) / T::from_usize_lossy(n);
            let r = (T::one() - z * z).sqrt();
            let phi = golden * T::from_usize_lossy(k);
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

fn principal_axes<T: Real>(pts: &[Vec3<T>]) -> (Vec<T>, Vec<Vec3<T>>) {
    let mut cov = vec![T::zero(); 9];
    for p in pts {
        let a = p.to_array();
        for i in 0..3 {
            for j in 0..3 {
                cov[i * 3 + j] = cov[i * 3 + j] + a[i] * a[j];
            }
        }
    }
    let (values, vectors) = sym_eigen(&cov, 3);
    (
        values,
        vectors
            .into_iter()
            .map(|v| Vec3::new(v[0], v[1], v[2]))
            .collect(),
    )
}

/// Guesses whose circle-fit cost is lowest among their nearest directions
/// (axes are lines, so `d` and `−d` coincide), best first. Ranking by cost
/// alone tends to pick many starts from one broad valley.
fn local_minima<T: Real>(
    dirs: &[Vec3<T>],
    guesses: &[Option<(Model<T>, T)>],
    max: usize,
) -> Vec<Model<T>> {
    const NEIGHBOURS: usize = 8;
    let mut found: Vec<(Model<T>, T)> = Vec::new();
    for (i, g) in guesses.iter().enumerate() {
        let Some((model, cost)) = g else { continue };
        let mut near: Vec<(T, usize)> = (0..dirs.len())
            .filter(|&j| j != i)
            .map(|j| (-dirs[i].dot(dirs[j]).abs(), j))
            .collect();
        near.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let is_min = near
            .iter()
            .take(NEIGHBOURS)
            .all(|&(_, j)| guesses[j].as_ref().is_none_or(|g| g.1 >= *cost));
        if is_min {
            found.push((*model, *cost));
        }
    }
    found.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    found.into_iter().take(max.max(1)).map(|g| g.0).collect()
}

/// Fits a circular cylinder to the points by minimizing the summed squared
/// orthogonal distances. Without `init`, starts from the principal axes and
/// a spread of directions, each seeded by a circle fit of the projection.
pub fn fit_cylinder<T: Real>(
    points: &CurveSamples<T>,
    init: Option<&CylinderModel<T>>,
    config: &FitConfig<T>,
) -> Result<FitResult<T>> {
    let raw = points.points();
    if raw.len() < MIN_POINTS {
        return Err(Error::TooFewPoints {
            got: raw.len(),
            need: MIN_POINTS,
        });
    }
    let norm = Normalized::new(raw);
    if !(norm.scale > T::zero()) {
        return Err(Error::DegenerateConfiguration("all points coincide".into()));
    }
    let pts = &norm.points;
    let (spread, axes) = principal_axes(pts);
    if spread[1] <= T::lit(1e-20) * spread[2] {
        return Err(Error::DegenerateConfiguration(
            "points are collinear".into(),
        ));
    }

    let starts: Vec<Model<T>> = match init {
        Some(m) => vec![norm.from_world(m)],
        None => {
            let dirs: Vec<Vec3<T>> = axes
                .iter()
                .copied()
                .chain(fibonacci_half_sphere(config.n_directions))
                .collect();
            let guesses: Vec<Option<(Model<T>, T)>> =
                dirs.iter().map(|&d| circle_guess(pts, d)).collect();
            local_minima(&dirs, &guesses, config.n_starts)
        }
    };
    if starts.is_empty() {
        return Err(Error::DegenerateConfiguration(
            "no initial cylinder found".into(),
        ));
    }

    let mut best: Option<(Model<T>, usize, bool, T)> = None;
    for start in starts {
        let (m, it, conv) = refine(pts, start, config);
        let cost = m.cost(pts);
        if best.as_ref().is_none_or(|b| cost < b.3) {
            best = Some((m, it, conv, cost));
        }
    }
    let (model, iterations, converged, _) = best.expect("at least one start");

    let (jac, _) = model.jacobian(pts);
    let (jtj, _) = normal_matrix(&jac, &vec![T::zero(); pts.len()]);
    let (eig, _) = sym_eigen(&jtj, PARAMS);
    let ratio = eig[0] / eig[PARAMS - 1];
    if !(ratio >= config.degeneracy_ratio) {
        return Err(Error::DegenerateConfiguration(format!(
            "cylinder not locally unique (JᵀJ eigenvalue ratio {})",
            ratio.as_f64()
        )));
    }

    let world = norm.to_world(&model)?;
    let (rms, max) = membership_residual(points, &world);
    Ok(FitResult {
        model: world,
        rms_residual: rms,
        max_residual: max,
        converged,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frenet::AnalyticCurve;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    fn fit(c: &CurveSamples<f64>) -> Result<FitResult<f64>> {
        fit_cylinder(c, None, &FitConfig::default())
    }

    #[test]
    fn helix() {
        let h = AnalyticCurve::<f64>::helix(1.0, 1.0, (0.0, 12.0))
            .unwrap()
            .sample(200)
            .unwrap();
        let r = fit(&h).unwrap();
        assert!((r.model.radius - 1.0).abs() < 1e-10);
        assert!(r.model.axis_dir.cross(Vec3::unit_z()).norm() < 1e-10);
        assert!(r.max_residual < 1e-10 && r.converged);
    }

    #[test]
    fn viviani() {
        let v = AnalyticCurve::<f64>::viviani(1.0, (0.0, std::f64::consts::TAU))
            .unwrap()
            .sample(300)
            .unwrap();
        let r = fit(&v).unwrap();
        assert!((r.model.radius - 1.0).abs() < 1e-9);
        assert!(r.model.axis_dir.cross(Vec3::unit_z()).norm() < 1e-9);
        assert!((r.model.axis_point - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-9);
        assert!(r.max_residual < 1e-9);
    }

    #[test]
    fn ellipse_recovers_minor_axis() {
        let e = AnalyticCurve::<f64>::ellipse(2.0, 1.0, (0.0, 6.2))
            .unwrap()
            .sample(200)
            .unwrap();
        let r = fit(&e).unwrap();
        assert!((r.model.radius - 1.0).abs() < 1e-8, "{}", r.model.radius);
        assert!((r.model.axis_dir.z.abs() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn noisy_helix() {
        let h = AnalyticCurve::<f64>::helix(1.0, 1.0, (0.0, 12.0))
            .unwrap()
            .sample(400)
            .unwrap();
        let noise = Normal::new(0.0, 1e-3).unwrap();
        for seed in 0..10 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pts = h
                .points()
                .iter()
                .map(|&p| {
                    p + Vec3::new(
                        noise.sample(&mut rng),
                        noise.sample(&mut rng),
                        noise.sample(&mut rng),
                    )
                })
                .collect();
            let c = CurveSamples::new(pts, None, "").unwrap();
            let r = fit(&c).unwrap();
            assert!(
                (r.model.radius - 1.0).abs() < 3e-3,
                "seed {seed}: {}",
                r.model.radius
            );
        }
    }

    #[test]
    fn rigid_motion_equivariance() {
        let h = AnalyticCurve::<f64>::viviani(0.7, (0.2, 5.0))
            .unwrap()
            .sample(200)
            .unwrap();
        let (axis, angle, shift) = (
            Vec3::new(1.0, -2.0, 0.5).normalized(),
            0.9,
            Vec3::new(3.0, -1.0, 2.0),
        );
        let a = fit(&h).unwrap();
        let b = fit(&h.transformed(axis, angle, shift)).unwrap();
        assert!((a.model.radius - b.model.radius).abs() < 1e-10);
        let moved = a.model.transformed(axis, angle, shift);
        assert!(moved.axis_dir.cross(b.model.axis_dir).norm() < 1e-9);
        assert!((moved.axis_point - b.model.axis_point).norm() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let line: Vec<Vec3<f64>> = (0..10)
            .map(|i| Vec3::new(i as f64, 2.0 * i as f64, 0.0))
            .collect();
        let c = CurveSamples::new(line, None, "").unwrap();
        assert!(matches!(fit(&c), Err(Error::DegenerateConfiguration(_))));
        let circle = AnalyticCurve::<f64>::circle(1.0, (0.0, 6.2))
            .unwrap()
            .sample(100)
            .unwrap();
        assert!(matches!(
            fit(&circle),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn sphere_curve_is_not_cylindrical() {
        // a spherical loxodrome-like curve: latitude varies with longitude
        let pts: Vec<Vec3<f64>> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.03;
                let lat = 0.8 * (0.7 * t).sin();
                Vec3::new(lat.cos() * t.cos(), lat.cos() * t.sin(), lat.sin())
            })
            .collect();
        let r = fit(&CurveSamples::new(pts, None, "").unwrap()).unwrap();
        assert!(r.max_residual > 1e-2, "{}", r.max_residual);
    }
}

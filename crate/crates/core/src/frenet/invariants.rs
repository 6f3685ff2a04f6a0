use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::quadrature::integrate;
use crate::scalar::Real;
use crate::vec3::Vec3;

use super::arclength::{fit_parameter, fitted_arclength, local_fits};
use super::curve::{linspace, AnalyticCurve, CurveSamples, MIN_SAMPLES};
use super::spectral::{default_max_degree, SpectralFit};
use super::window::LocalFit;

/// Intrinsic data at one arc-length position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord<T> {
    pub s: T,
    pub kappa: T,
    pub kappa1: T,
    pub kappa2: T,
    pub tau: T,
    pub tau1: T,
    /// Curve parameter the record was taken at, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<T>,
    /// Estimated from a one-sided stencil.
    #[serde(default)]
    pub low_confidence: bool,
}

impl<T: Real> InvariantRecord<T> {
    pub fn new(s: T, kappa: T, kappa1: T, kappa2: T, tau: T, tau1: T) -> Self {
        Self {
            s,
            kappa,
            kappa1,
            kappa2,
            tau,
            tau1,
            param: None,
            low_confidence: false,
        }
    }

    /// Same record with torsion reflected (`τ → −τ`, `τ′ → −τ′`).
    pub fn reflected(&self) -> Self {
        Self {
            tau: -self.tau,
            tau1: -self.tau1,
            ..*self
        }
    }

    /// Record of the curve scaled by `λ`.
    pub fn scaled(&self, lambda: T) -> Self {
        let l2 = lambda * lambda;
        Self {
            s: self.s * lambda,
            kappa: self.kappa / lambda,
            kappa1: self.kappa1 / l2,
            kappa2: self.kappa2 / (l2 * lambda),
            tau: self.tau / lambda,
            tau1: self.tau1 / l2,
            param: self.param,
            low_confidence: self.low_confidence,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimationMethod {
    /// Closed-form derivatives plus fourth-order central differences.
    Analytic,
    /// Sliding-window polynomial least squares on samples.
    Window { window: usize, degree: usize },
    /// One Chebyshev least-squares fit of the whole curve. `planar` when the
    /// points lie on a plane within the fit residual, in which case the
    /// torsion is set to zero instead of estimated from noise.
    Spectral { degree: usize, planar: bool },
    /// Values written by a generator or read from a file.
    Given,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcludedRecord<T> {
    pub index: usize,
    pub s: T,
    pub kappa: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta<T> {
    pub method: EstimationMethod,
    /// Records rejected for curvature below the floor.
    pub excluded: Vec<ExcludedRecord<T>>,
    pub kappa_floor: T,
}

impl<T: Real> ProfileMeta<T> {
    pub fn given() -> Self {
        Self {
            method: EstimationMethod::Given,
            excluded: Vec::new(),
            kappa_floor: T::zero(),
        }
    }
}

/// Arc-length-ordered invariant records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantProfile<T> {
    records: Vec<InvariantRecord<T>>,
    pub meta: ProfileMeta<T>,
}

impl<T: Real> InvariantProfile<T> {
    pub fn new(records: Vec<InvariantRecord<T>>, meta: ProfileMeta<T>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidInput("empty invariant profile".into()));
        }
        if let Some(i) = records.windows(2).position(|w| !(w[1].s > w[0].s)) {
            return Err(Error::InvalidInput(format!(
                "arc length not increasing at record {i}"
            )));
        }
        if let Some(r) = records.iter().find(|r| !(r.kappa > T::zero())) {
            return Err(Error::InvalidInput(format!(
                "non-positive curvature at s = {}",
                r.s
            )));
        }
        let finite = |r: &InvariantRecord<T>| {
            [r.s, r.kappa, r.kappa1, r.kappa2, r.tau, r.tau1]
                .iter()
                .all(|v| v.is_finite())
        };
        if let Some(r) = records.iter().find(|r| !finite(r)) {
            return Err(Error::InvalidInput(format!(
                "non-finite invariant at s = {}",
                r.s
            )));
        }
        Ok(Self { records, meta })
    }

    /// Profile sampled from closed-form invariant functions of arc length,
    /// each returning `(κ, κ′, κ″, τ, τ′)`.
    pub fn from_fn(s_values: &[T], f: impl Fn(T) -> (T, T, T, T, T)) -> Result<Self> {
        let records = s_values
            .iter()
            .map(|&s| {
                let (k, k1, k2, t, t1) = f(s);
                InvariantRecord::new(s, k, k1, k2, t, t1)
            })
            .collect();
        Self::new(records, ProfileMeta::given())
    }

    pub fn records(&self) -> &[InvariantRecord<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn map_records(
        &self,
        f: impl Fn(&InvariantRecord<T>) -> InvariantRecord<T>,
    ) -> Result<Self> {
        Self::new(self.records.iter().map(f).collect(), self.meta.clone())
    }

    /// Restricts to records whose `s` lies in `[lo, hi]`.
    pub fn window(&self, lo: T, hi: T) -> Result<Self> {
        let records = self
            .records
            .iter()
            .copied()
            .filter(|r| r.s >= lo && r.s <= hi)
            .collect();
        Self::new(records, self.meta.clone())
    }

    /// Keeps every `step`-th record, plus the last one.
    pub fn thinned(&self, step: usize) -> Self {
        let step = step.max(1);
        let n = self.records.len();
        let records = self
            .records
            .iter()
            .enumerate()
            .filter(|(i, _)| i % step == 0 || *i == n - 1)
            .map(|(_, r)| *r)
            .collect();
        Self {
            records,
            meta: self.meta.clone(),
        }
    }

    /// Largest |τ| relative to the largest κ; used to flag planar input.
    pub fn torsion_ratio(&self) -> T {
        let kmax = self.records.iter().fold(T::zero(), |m, r| m.max(r.kappa));
        let tmax = self
            .records
            .iter()
            .fold(T::zero(), |m, r| m.max(r.tau.abs()));
        tmax / kmax
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantConfig<T> {
    /// Samples per local fit.
    pub window: usize,
    /// Polynomial degree of the local fit (at most 5).
    pub degree: usize,
    /// Curvature floor relative to 1 / (bounding-box diagonal).
    pub kappa_floor_rel: T,
}

impl<T: Real> Default for InvariantConfig<T> {
    fn default() -> Self {
        Self {
            window: 7,
            degree: 5,
            kappa_floor_rel: T::lit(1e-9),
        }
    }
}

/// Invariants of sampled points from sliding-window polynomial fits.
///
/// The fit parameter is the sample's `params` when present, otherwise the
/// cumulative chord length. Arc length is the integral of the fitted speed,
/// so it is independent of that choice.
pub fn compute_invariants_samples<T: Real>(
    curve: &CurveSamples<T>,
    config: &InvariantConfig<T>,
) -> Result<InvariantProfile<T>> {
    let pts = curve.points();
    let n = pts.len();
    if config.window < MIN_SAMPLES || config.window > n {
        return Err(if n < config.window.max(MIN_SAMPLES) {
            Error::TooFewPoints {
                got: n,
                need: config.window.max(MIN_SAMPLES),
            }
        } else {
            Error::InvalidInput(format!(
                "window {} must be at least {MIN_SAMPLES}",
                config.window
            ))
        });
    }
    if config.degree < 3 || config.degree > 5 {
        return Err(Error::InvalidInput(format!(
            "fit degree {} outside 3..=5",
            config.degree
        )));
    }
    let scale = curve.bbox_diagonal();
    let chord = curve.chord_length();
    let floor = T::lit(1e3) * T::epsilon() * curve.coordinate_scale();
    if !(chord > floor) {
        return Err(Error::DegenerateCurve {
            length: chord.as_f64(),
            floor: floor.as_f64(),
        });
    }

    let params = fit_parameter(curve);
    let fits = local_fits(&params, pts, config.window, config.degree).ok_or_else(|| {
        Error::DegenerateCurve {
            length: chord.as_f64(),
            floor: floor.as_f64(),
        }
    })?;
    let s = fitted_arclength(&params, &fits);

    let kappa_floor = config.kappa_floor_rel / scale;
    let (records, excluded) = records_from_fits(curve, &fits, &s, kappa_floor)?;
    InvariantProfile::new(
        records,
        ProfileMeta {
            method: EstimationMethod::Window {
                window: config.window,
                degree: config.degree,
            },
            excluded,
            kappa_floor,
        },
    )
}

fn records_from_fits<T: Real>(
    curve: &CurveSamples<T>,
    fits: &[LocalFit<T>],
    s: &[T],
    kappa_floor: T,
) -> Result<(Vec<InvariantRecord<T>>, Vec<ExcludedRecord<T>>)> {
    let mut records = Vec::with_capacity(fits.len());
    let mut excluded = Vec::new();
    for (i, fit) in fits.iter().enumerate() {
        let inv = fit.invariants();
        let degenerate_frame = !(inv.binormal_strength > kappa_floor) || !inv.tau.is_finite();
        if !(inv.kappa > kappa_floor) || degenerate_frame {
            excluded.push(ExcludedRecord {
                index: i,
                s: s[i],
                kappa: inv.kappa,
            });
            continue;
        }
        records.push(InvariantRecord {
            s: s[i],
            kappa: inv.kappa,
            kappa1: inv.kappa1,
            kappa2: inv.kappa2,
            tau: inv.tau,
            tau1: inv.tau1,
            param: curve.params().map(|p| p[i]),
            low_confidence: fit.one_sided,
        });
    }
    if records.is_empty() {
        return Err(Error::BiregularityLost {
            floor: kappa_floor.as_f64(),
        });
    }
    Ok((records, excluded))
}

/// Invariants of sampled points from one Chebyshev fit of the whole curve,
/// degree chosen by cross-validation up to `max_degree` (default
/// [`default_max_degree`]). Suited to noisy samples of a smooth curve.
/// Plane distances up to this multiple of the fit residual count as noise.
const PLANAR_NOISE: f64 = 3.0;

/// Root-mean-square distance of the points to their best-fit plane.
fn plane_rms<T: Real>(pts: &[Vec3<T>]) -> T {
    let n = T::from_usize_lossy(pts.len());
    let c = pts.iter().fold(Vec3::zero(), |a, &p| a + p) / n;
    let mut cov = [T::zero(); 9];
    for &p in pts {
        let d = (p - c).to_array();
        for i in 0..3 {
            for j in 0..3 {
                cov[i * 3 + j] = cov[i * 3 + j] + d[i] * d[j];
            }
        }
    }
    let (values, _) = sym_eigen(&cov, 3);
    (values[0].max(T::zero()) / n).sqrt()
}

pub fn compute_invariants_spectral<T: Real>(
    curve: &CurveSamples<T>,
    max_degree: Option<usize>,
    kappa_floor_rel: T,
) -> Result<InvariantProfile<T>> {
    let pts = curve.points();
    let n = pts.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewPoints {
            got: n,
            need: MIN_SAMPLES,
        });
    }
    let chord = curve.chord_length();
    let floor = T::lit(1e3) * T::epsilon() * curve.coordinate_scale();
    if !(chord > floor) {
        return Err(Error::DegenerateCurve {
            length: chord.as_f64(),
            floor: floor.as_f64(),
        });
    }
    let params = fit_parameter(curve);
    let spectral = SpectralFit::fit(
        &params,
        pts,
        max_degree.unwrap_or_else(|| default_max_degree(n)),
    )
    .ok_or_else(|| Error::DegenerateCurve {
        length: chord.as_f64(),
        floor: floor.as_f64(),
    })?;
    let fits: Vec<LocalFit<T>> = params.iter().map(|&u| spectral.local(u)).collect();
    let s = fitted_arclength(&params, &fits);
    let kappa_floor = kappa_floor_rel / curve.bbox_diagonal();
    let (mut records, excluded) = records_from_fits(curve, &fits, &s, kappa_floor)?;
    let planar = plane_rms(pts)
        <= T::lit(PLANAR_NOISE) * spectral.rms
            + T::lit(1e3) * T::epsilon() * curve.coordinate_scale();
    if planar {
        for r in records.iter_mut() {
            r.tau = T::zero();
            r.tau1 = T::zero();
        }
    }
    InvariantProfile::new(
        records,
        ProfileMeta {
            method: EstimationMethod::Spectral {
                degree: spectral.degree,
                planar,
            },
            excluded,
            kappa_floor,
        },
    )
}

/// Fourth-order central first and second derivatives.
fn central_d1<T: Real>(f: impl Fn(T) -> T, t: T, h: T) -> T {
    let eight = T::lit(8.0);
    let two = T::lit(2.0);
    (f(t - two * h) - eight * f(t - h) + eight * f(t + h) - f(t + two * h)) / (T::lit(12.0) * h)
}

fn central_d2<T: Real>(f: impl Fn(T) -> T, t: T, h: T) -> T {
    let two = T::lit(2.0);
    let sixteen = T::lit(16.0);
    (-f(t - two * h) + sixteen * f(t - h) - T::lit(30.0) * f(t) + sixteen * f(t + h)
        - f(t + two * h))
        / (T::lit(12.0) * h * h)
}

/// Invariants of an analytic curve at `n` parameter values spread uniformly
/// over its domain. κ and τ come from the exact derivatives; their
/// arc-length derivatives from central differences of those exact values
/// (the stencil reaches slightly past the domain ends).
pub fn compute_invariants_analytic<T: Real>(
    curve: &AnalyticCurve<T>,
    n: usize,
) -> Result<InvariantProfile<T>> {
    if n < 2 {
        return Err(Error::TooFewPoints { got: n, need: 2 });
    }
    let (lo, hi) = curve.domain;
    let ts = linspace(lo, hi, n);
    let t_scale = (hi - lo) / T::TAU();
    let h1 = T::epsilon().powf(T::lit(0.2)) * t_scale;
    let h2 = T::epsilon().powf(T::lit(1.0 / 6.0)) * t_scale;
    let kappa_of = |t: T| curve.curvature_torsion(t).0;
    let tau_of = |t: T| curve.curvature_torsion(t).1;

    let mut s = T::zero();
    let mut records = Vec::with_capacity(n);
    let mut excluded = Vec::new();
    let diag = {
        let probe = linspace(lo, hi, 64)
            .into_iter()
            .map(|t| curve.position(t))
            .collect::<Vec<_>>();
        super::curve::bbox_diagonal(&probe)
    };
    let kappa_floor = T::lit(1e-9) / diag;
    for (i, &t) in ts.iter().enumerate() {
        if i > 0 {
            let seg = integrate(|u| curve.speed(u), ts[i - 1], t, T::lit(1e-13), T::zero());
            s = s + seg.value;
        }
        let [d1, d2, _] = curve.derivatives(t);
        let v = d1.norm();
        let v_t = d1.dot(d2) / v;
        let (kappa, tau) = curve.curvature_torsion(t);
        if !(kappa > kappa_floor) || !tau.is_finite() {
            excluded.push(ExcludedRecord { index: i, s, kappa });
            continue;
        }
        let kappa_t = central_d1(kappa_of, t, h1);
        let kappa_tt = central_d2(kappa_of, t, h2);
        let tau_t = central_d1(tau_of, t, h1);
        let kappa1 = kappa_t / v;
        let kappa2 = (kappa_tt - kappa1 * v_t) / (v * v);
        records.push(InvariantRecord {
            s,
            kappa,
            kappa1,
            kappa2,
            tau,
            tau1: tau_t / v,
            param: Some(t),
            low_confidence: false,
        });
    }
    if records.is_empty() {
        return Err(Error::BiregularityLost {
            floor: kappa_floor.as_f64(),
        });
    }
    InvariantProfile::new(
        records,
        ProfileMeta {
            method: EstimationMethod::Analytic,
            excluded,
            kappa_floor,
        },
    )
}

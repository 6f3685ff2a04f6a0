use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frenet::{InvariantProfile, InvariantRecord};
use crate::linalg::lstsq;
use crate::scalar::Real;

use super::polynomial::{ds_eval, PsiPolynomial};
use super::residual::{axis_residual, psi_prime_branches, q_residual, Local};
use super::roots::{all_roots_with, TANGENTIAL_REL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig<T> {
    /// Pass threshold on the normalized residual.
    pub tol: T,
    /// Track points used to differentiate ψ along a track.
    pub track_window: usize,
    /// Polynomial degree of that fit (interpolating when `window − 1`).
    pub track_degree: usize,
    /// Continuation distance as a fraction of the local root gap. A root at
    /// most half as far from the prediction as any other is accepted up to
    /// this fraction of the admissible interval.
    pub continuation: T,
    /// Admissible roots closer than this (absolute, in ψ) are clustered.
    pub cluster_tol: T,
    /// Shortest track that counts as a consistent continuation.
    pub min_track: usize,
    /// Tangential root tolerance relative to `max |Pₙ|`.
    pub tangential_tol: T,
    /// Take ψ′ from the implicit function theorem on 𝒫 (through κ″ and τ′)
    /// instead of differentiating tracked roots.
    pub implicit_slopes: bool,
}

impl<T: Real> TestConfig<T> {
    /// Defaults for analytic or noise-free profiles.
    pub fn analytic() -> Self {
        Self {
            tol: T::lit(1e-6),
            track_window: 7,
            track_degree: 6,
            continuation: T::lit(0.2),
            cluster_tol: T::lit(1e-9),
            min_track: 3,
            tangential_tol: T::lit(TANGENTIAL_REL),
            implicit_slopes: true,
        }
    }

    /// Defaults for profiles estimated from noisy samples.
    pub fn noisy() -> Self {
        Self {
            tol: T::lit(1e-3),
            track_window: 15,
            track_degree: 3,
            cluster_tol: T::lit(1e-4),
            ..Self::analytic()
        }
    }
}

impl<T: Real> Default for TestConfig<T> {
    fn default() -> Self {
        Self::analytic()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Per-record outcome for the best root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordResult<T> {
    pub s: T,
    pub best_psi: Option<T>,
    /// Combined residual of the best root; `None` when no admissible root
    /// has enough track points to be differentiated.
    pub residual: Option<T>,
    pub q_residual: Option<T>,
    pub axis_residual: Option<T>,
    /// +1 or −1: the ψ′ branch closest to the tracked derivative.
    pub branch: i8,
    pub admissible_count: usize,
    pub psi1: Option<T>,
    /// ψ′ from implicit differentiation of 𝒫, when `∂𝒫/∂ψ` is nondegenerate.
    pub psi1_implicit: Option<T>,
    pub psi2: Option<T>,
    pub track_len: usize,
}

/// A root track that ended with no root within continuation distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackBreak<T> {
    pub s: T,
    pub psi: T,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylindricityReport<T> {
    pub rho: T,
    pub records: Vec<RecordResult<T>>,
    /// Infinite when some record has no usable root.
    pub max_residual: T,
    /// Mean over records that have a usable root.
    pub mean_residual: T,
    pub verdict: Verdict,
    pub tol: T,
    pub breaks: Vec<TrackBreak<T>>,
    /// Records with no admissible root at all.
    pub rootless: usize,
}

impl<T: Real> CylindricityReport<T> {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Search objective: mean residual with each record capped at 1 and
    /// records lacking a usable root counted as 1.
    pub fn objective(&self) -> T {
        let n = T::from_usize_lossy(self.records.len().max(1));
        self.records
            .iter()
            .map(|r| r.residual.map_or(T::one(), |v| v.min(T::one())))
            .fold(T::zero(), |a, b| a + b)
            / n
    }
}

struct Track<T> {
    /// (record index, s, ψ)
    pts: Vec<(usize, T, T)>,
    /// Implicit slope `dψ/ds` at each point, when defined.
    slopes: Vec<Option<T>>,
}

impl<T: Real> Track<T> {
    fn predict(&self, s: T) -> T {
        let n = self.pts.len();
        if n < 3 {
            if let Some(m) = self.slopes[n - 1] {
                let (_, s1, p1) = self.pts[n - 1];
                let h = s - s1;
                if n == 1 {
                    return p1 + m * h;
                }
                // quadratic through both points with the slope at the last
                let (_, s0, p0) = self.pts[0];
                let d = s1 - s0;
                let c = (p0 - p1 + m * d) / (d * d);
                return p1 + m * h + c * h * h;
            }
        }
        let tail = &self.pts[n.saturating_sub(3)..];
        // Lagrange extrapolation through the last ≤ 3 points
        let mut acc = T::zero();
        for (i, &(_, si, pi)) in tail.iter().enumerate() {
            let mut w = T::one();
            for (j, &(_, sj, _)) in tail.iter().enumerate() {
                if i != j {
                    w = w * (s - sj) / (si - sj);
                }
            }
            acc = acc + w * pi;
        }
        acc
    }
}

fn cluster<T: Real>(mut psis: Vec<T>, tol: T) -> Vec<T> {
    psis.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<(T, usize)> = Vec::new();
    for p in psis {
        match out.last_mut() {
            Some((mean, count)) if (p - *mean).abs() <= tol => {
                let c = T::from_usize_lossy(*count);
                *mean = (*mean * c + p) / (c + T::one());
                *count += 1;
            }
            _ => out.push((p, 1)),
        }
    }
    out.into_iter().map(|(m, _)| m).collect()
}

/// Least-squares polynomial through `(s, y)` pairs around `s0`; returns
/// the first and second derivative at `s0`.
fn poly_derivatives<T: Real>(pts: &[(T, T)], s0: T, degree: usize) -> Option<(T, T)> {
    let w = pts.len();
    let half = (pts[w - 1].0 - pts[0].0) * T::lit(0.5);
    if !(half > T::zero()) {
        return None;
    }
    let cols = degree.min(w - 1) + 1;
    let mut a = Vec::with_capacity(w * cols);
    let mut y = Vec::with_capacity(w);
    for &(s, p) in pts {
        let x = (s - s0) / half;
        let mut pw = T::one();
        for _ in 0..cols {
            a.push(pw);
            pw = pw * x;
        }
        y.push(p);
    }
    let c = lstsq(&a, w, cols, &[y])?;
    let second = if cols > 2 {
        T::lit(2.0) * c[0][2] / (half * half)
    } else {
        T::zero()
    };
    Some((c[0][1] / half, second))
}

/// `(ψ′, ψ″)` of a track at point `pos`. With implicit slopes ψ′ is the
/// slope itself and ψ″ its fitted derivative; otherwise both come from
/// differentiating the fitted ψ values.
fn track_derivatives<T: Real>(
    track: &Track<T>,
    pos: usize,
    config: &TestConfig<T>,
) -> Option<(T, T)> {
    let n = track.pts.len();
    let w = config.track_window.min(n);
    if w < 2 {
        return None;
    }
    let lo = pos.saturating_sub(w / 2).min(n - w);
    let s0 = track.pts[pos].1;
    if config.implicit_slopes {
        let slopes: Option<Vec<(T, T)>> = (lo..lo + w)
            .map(|i| track.slopes[i].map(|m| (track.pts[i].1, m)))
            .collect();
        if let (Some(m), Some(slopes)) = (track.slopes[pos], slopes) {
            let (dm, _) =
                poly_derivatives(&slopes, s0, config.track_degree.saturating_sub(1).max(1))?;
            return Some((m, dm));
        }
    }
    if w < 3 {
        return None;
    }
    let pts: Vec<(T, T)> = track.pts[lo..lo + w]
        .iter()
        .map(|&(_, s, p)| (s, p))
        .collect();
    poly_derivatives(&pts, s0, config.track_degree.max(2))
}

/// Whether most of the derivative window around `pos` sits at ψ = 1 within
/// `cluster_tol`. Tangent perpendicular to the axis along an arc makes the
/// curve a circle with ρκ = 1; elsewhere such a track is a spurious branch
/// of the cleared conditions, which every spherical curve satisfies at ρ
/// equal to its sphere radius.
fn pinned_at_one<T: Real>(track: &Track<T>, pos: usize, config: &TestConfig<T>) -> bool {
    let n = track.pts.len();
    let w = config.track_window.min(n);
    let lo = pos.saturating_sub(w / 2).min(n - w);
    let near = track.pts[lo..lo + w]
        .iter()
        .filter(|p| T::one() - p.2 <= config.cluster_tol)
        .count();
    2 * near > w
}

fn local_of<T: Real>(r: &InvariantRecord<T>) -> Local<T> {
    Local::new(r.kappa, r.kappa1, r.kappa2, r.tau, r.tau1)
}

/// Tracks admissible ψ roots along the profile for radius `rho` and
/// evaluates both compatibility residuals on every tracked root.
pub fn track_psi<T: Real>(
    profile: &InvariantProfile<T>,
    rho: T,
    config: &TestConfig<T>,
) -> Result<CylindricityReport<T>> {
    if !(rho > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "radius must be positive, got {rho}"
        )));
    }
    let recs = profile.records();
    let polys: Vec<PsiPolynomial<T>> = recs
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut p = PsiPolynomial::new(rho, r.kappa, r.kappa1, r.tau);
            p.source_record = Some(i);
            p
        })
        .collect();
    let roots: Vec<Vec<T>> = polys
        .iter()
        .map(|p| {
            let found = all_roots_with(p, config.tangential_tol)
                .into_iter()
                .filter(|r| r.admissible);
            cluster(found.map(|r| r.psi).collect(), config.cluster_tol)
        })
        .collect();
    let slope = |k: usize, psi: T| -> Option<T> {
        let r = &recs[k];
        let d = polys[k].eval_derivative(psi);
        (d.abs() > T::lit(1e-8) * polys[k].magnitude(psi).max(T::min_positive_value()))
            .then(|| -ds_eval(rho, r.kappa, r.kappa1, r.kappa2, r.tau, r.tau1, psi) / d)
    };

    // continuation
    let mut tracks: Vec<Track<T>> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    let mut breaks = Vec::new();
    // membership[k][j] = tracks through root j at record k
    let mut membership: Vec<Vec<Vec<usize>>> =
        roots.iter().map(|r| vec![Vec::new(); r.len()]).collect();
    for (k, rk) in roots.iter().enumerate() {
        let s = recs[k].s;
        let upper = polys[k].psi_upper();
        let gap = |j: usize| -> T {
            let mut g = upper;
            if j > 0 {
                g = g.min(rk[j] - rk[j - 1]);
            }
            if j + 1 < rk.len() {
                g = g.min(rk[j + 1] - rk[j]);
            }
            g
        };
        let mut pairs: Vec<(T, usize, usize)> = Vec::new();
        for &t in &open {
            let pred = tracks[t].predict(s);
            for (j, &psi) in rk.iter().enumerate() {
                let d = (psi - pred).abs();
                // close pairs: also accept a root clearly nearer than any other
                let other = rk
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .fold(T::infinity(), |m, (_, &r)| m.min((r - pred).abs()));
                if d <= config.continuation * gap(j)
                    || (d <= config.continuation * upper && d + d <= other)
                {
                    pairs.push((d, t, j));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut track_done = vec![false; tracks.len()];
        let mut root_taken = vec![false; rk.len()];
        // one-to-one first, then let leftover tracks merge into taken roots
        for pass in 0..2 {
            for &(_, t, j) in &pairs {
                if track_done[t] || (pass == 0 && root_taken[j]) {
                    continue;
                }
                track_done[t] = true;
                root_taken[j] = true;
                tracks[t].pts.push((k, s, rk[j]));
                tracks[t].slopes.push(slope(k, rk[j]));
                membership[k][j].push(t);
            }
        }
        let mut next_open = Vec::new();
        for &t in &open {
            if track_done[t] {
                next_open.push(t);
            } else {
                let &(_, _, psi) = tracks[t].pts.last().unwrap();
                breaks.push(TrackBreak {
                    s,
                    psi,
                    len: tracks[t].pts.len(),
                });
            }
        }
        for (j, &psi) in rk.iter().enumerate() {
            if !root_taken[j] {
                tracks.push(Track {
                    pts: vec![(k, s, psi)],
                    slopes: vec![slope(k, psi)],
                });
                membership[k][j].push(tracks.len() - 1);
                next_open.push(tracks.len() - 1);
            }
        }
        open = next_open;
    }

    // residuals
    let mut results = Vec::with_capacity(recs.len());
    for (k, rec) in recs.iter().enumerate() {
        let local = local_of(rec);
        let mut best: Option<RecordResult<T>> = None;
        let mut fallback_psi = None;
        for (j, &psi) in roots[k].iter().enumerate() {
            fallback_psi.get_or_insert(psi);
            let Some(&t) = membership[k][j]
                .iter()
                .max_by_key(|&&t| tracks[t].pts.len())
            else {
                continue;
            };
            let track = &tracks[t];
            if track.pts.len() < config.min_track {
                continue;
            }
            let pos = track
                .pts
                .iter()
                .position(|p| p.0 == k)
                .expect("record on its track");
            if rho * rec.kappa > T::one() + config.cluster_tol && pinned_at_one(track, pos, config)
            {
                continue;
            }
            let Some((psi1, psi2)) = track_derivatives(track, pos, config) else {
                continue;
            };
            let q = q_residual(rho, rec.kappa, rec.kappa1, rec.tau, psi, psi1);
            let a = axis_residual(&local, psi, psi1, psi2);
            let res = q.max(a);
            let (plus, minus) = psi_prime_branches(rho, rec.kappa, rec.kappa1, rec.tau, psi);
            let branch = if (psi1 - plus).abs() <= (psi1 - minus).abs() {
                1
            } else {
                -1
            };
            let dpsi = polys[k].eval_derivative(psi);
            let implicit = if dpsi.abs()
                > T::lit(1e-8) * polys[k].magnitude(psi).max(T::min_positive_value())
            {
                Some(
                    -ds_eval(
                        rho, rec.kappa, rec.kappa1, rec.kappa2, rec.tau, rec.tau1, psi,
                    ) / dpsi,
                )
            } else {
                None
            };
            let candidate = RecordResult {
                s: rec.s,
                best_psi: Some(psi),
                residual: Some(res),
                q_residual: Some(q),
                axis_residual: Some(a),
                branch,
                admissible_count: roots[k].len(),
                psi1: Some(psi1),
                psi1_implicit: implicit,
                psi2: Some(psi2),
                track_len: track.pts.len(),
            };
            if best.is_none_or(|b| b.residual.unwrap() > res) {
                best = Some(candidate);
            }
        }
        results.push(best.unwrap_or(RecordResult {
            s: rec.s,
            best_psi: fallback_psi,
            residual: None,
            q_residual: None,
            axis_residual: None,
            branch: 0,
            admissible_count: roots[k].len(),
            psi1: None,
            psi1_implicit: None,
            psi2: None,
            track_len: 0,
        }));
    }

    let usable: Vec<T> = results.iter().filter_map(|r| r.residual).collect();
    let complete = usable.len() == results.len();
    let max_residual = if complete {
        usable.iter().fold(T::zero(), |m, &v| m.max(v))
    } else {
        T::infinity()
    };
    let mean_residual = if usable.is_empty() {
        T::infinity()
    } else {
        usable.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize_lossy(usable.len())
    };
    let verdict = if complete && max_residual <= config.tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CylindricityReport {
        rho,
        rootless: roots.iter().filter(|r| r.is_empty()).count(),
        records: results,
        max_residual,
        mean_residual,
        verdict,
        tol: config.tol,
        breaks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn helix_profile(k: f64, t: f64, n: usize) -> InvariantProfile<f64> {
        let s: Vec<f64> = (0..n).map(|i| i as f64 * 0.1).collect();
        InvariantProfile::from_fn(&s, |_| (k, 0.0, 0.0, t, 0.0)).unwrap()
    }

    #[test]
    fn helix_passes_at_its_radius() {
        let p = helix_profile(2.0, 1.0, 40);
        let rep = track_psi(&p, 0.4, &TestConfig::default()).unwrap();
        assert!(rep.passed());
        assert!(rep.max_residual < 1e-12, "{}", rep.max_residual);
        for r in &rep.records {
            assert!((r.best_psi.unwrap() - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn helix_fails_off_radius() {
        let p = helix_profile(2.0, 1.0, 40);
        assert!(!track_psi(&p, 0.3, &TestConfig::default()).unwrap().passed());
        assert!(!track_psi(&p, 0.45, &TestConfig::default())
            .unwrap()
            .passed());
    }

    #[test]
    fn viviani_tracks_its_cylinder_not_its_sphere() {
        use crate::special_curves::{viviani_profile, VivianiSpec};
        let p = viviani_profile(&VivianiSpec::new(1.0f64, (0.1, 3.0)).unwrap(), 100).unwrap();
        let cfg = TestConfig::default();
        let rep = track_psi(&p, 1.0, &cfg).unwrap();
        assert!(rep.passed(), "{}", rep.max_residual);
        // ψ ≡ 1 solves both conditions at the sphere radius and must be skipped
        assert!(!track_psi(&p, 2.0, &cfg).unwrap().passed());
    }

    #[test]
    fn extrapolation_is_quadratic() {
        let tr = Track {
            pts: vec![(0, 0.0f64, 1.0), (1, 1.0, 2.0), (2, 2.0, 5.0)],
            slopes: vec![None; 3],
        };
        // ψ = 1 + s²
        assert!((tr.predict(3.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn clustering_merges_close_roots() {
        let c = cluster(vec![0.5, 0.2, 0.5 + 1e-12, 0.7], 1e-9);
        assert_eq!(c.len(), 3);
    }
}

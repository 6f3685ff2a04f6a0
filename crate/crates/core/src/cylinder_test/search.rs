use crate::error::{Error, Result};
use crate::frenet::InvariantProfile;
use crate::scalar::Real;

use super::track::{track_psi, CylindricityReport, TestConfig};

/// Outcome of a radius search.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSearch<T> {
    pub rho: T,
    pub report: CylindricityReport<T>,
    /// `(ρ, objective)` on the coarse grid.
    pub grid: Vec<(T, T)>,
    pub evaluations: usize,
}

/// Grid local minima refined by golden section.
const MAX_REFINED: usize = 3;

/// Golden-section minimum of `f` on `[a, b]` to width `1e-8`, with its value.
fn golden<T: Real>(f: &mut impl FnMut(T) -> Result<T>, mut a: T, mut b: T) -> Result<(T, T)> {
    let g = T::lit(0.5 * (5f64.sqrt() - 1.0));
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let tol = T::lit(1e-8);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let x = (a + b) * T::lit(0.5);
    Ok((x, f(x)?))
}

/// Minimizes the mean tracked residual over `ρ ∈ [lo, hi]`: log-spaced
/// grid, then golden-section refinement in `ln ρ` to relative `1e-8`
/// around the best few grid local minima.
pub fn search_radius<T: Real>(
    profile: &InvariantProfile<T>,
    range: (T, T),
    n_grid: usize,
    config: &TestConfig<T>,
) -> Result<RadiusSearch<T>> {
    let (lo, hi) = range;
    if !(lo > T::zero() && hi > lo) {
        return Err(Error::InvalidInput(format!(
            "radius range [{lo}, {hi}] must be positive and increasing"
        )));
    }
    if n_grid < 16 {
        return Err(Error::InvalidInput(format!(
            "radius grid needs at least 16 points, got {n_grid}"
        )));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut evaluations = 0usize;
    let mut objective = |x: T| -> Result<T> {
        evaluations += 1;
        Ok(track_psi(profile, x.exp(), config)?.objective())
    };
    let xs: Vec<T> = (0..n_grid)
        .map(|i| llo + (lhi - llo) * T::from_usize_lossy(i) / T::from_usize_lossy(n_grid - 1))
        .collect();
    let mut grid = Vec::with_capacity(n_grid);
    for &x in &xs {
        grid.push((x.exp(), objective(x)?));
    }
    // the true radius can sit in a narrow notch beside a broad shallow dip,
    // so every grid local minimum among the best few gets refined
    let mut minima: Vec<usize> = (1..n_grid - 1)
        .filter(|&i| grid[i].1 <= grid[i - 1].1 && grid[i].1 <= grid[i + 1].1)
        .collect();
    minima.sort_by(|&a, &b| {
        grid[a]
            .1
            .partial_cmp(&grid[b].1)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    minima.truncate(MAX_REFINED);
    let mut best: Option<(T, T)> = None;
    for &i in &minima {
        let (cand, fc) = golden(&mut objective, xs[i - 1], xs[i + 1])?;
        // keep the grid point if refinement landed somewhere worse
        let (cand, fc) = if grid[i].1 < fc {
            (xs[i], grid[i].1)
        } else {
            (cand, fc)
        };
        if best.is_none_or(|(_, fb)| fc < fb) {
            best = Some((cand, fc));
        }
    }
    let edge = grid[0].1.min(grid[n_grid - 1].1);
    let x = match best {
        Some((x, fx)) if fx <= edge => x,
        _ => {
            return Err(Error::NoMinimum {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            })
        }
    };
    let rho = x.exp();
    let report = track_psi(profile, rho, config)?;
    Ok(RadiusSearch {
        rho,
        report,
        grid,
        evaluations: evaluations + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_helix_radius() {
        let s: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let p = InvariantProfile::from_fn(&s, |_| (2.0, 0.0, 0.0, 1.0, 0.0)).unwrap();
        let found = search_radius(&p, (0.05, 5.0), 32, &TestConfig::default()).unwrap();
        assert!((found.rho - 0.4).abs() < 1e-6 * 0.4, "{}", found.rho);
        assert!(found.report.passed());
    }

    #[test]
    fn narrow_notch_beside_a_broad_dip() {
        // the grid's lowest point lies in a wide shallow valley, the radius in a notch
        let (k, t) = (2.852f64, 0.486);
        let s: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let p = InvariantProfile::from_fn(&s, |_| (k, 0.0, 0.0, t, 0.0)).unwrap();
        let found = search_radius(&p, (1e-3, 1e3), 64, &TestConfig::default()).unwrap();
        let want = k / (k * k + t * t);
        assert!((found.rho - want).abs() < 1e-6 * want, "{}", found.rho);
    }

    #[test]
    fn monotone_objective_has_no_minimum() {
        let s: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let p = InvariantProfile::from_fn(&s, |_| (2.0, 0.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(matches!(
            search_radius(&p, (1.0, 5.0), 16, &TestConfig::default()),
            Err(Error::NoMinimum { .. })
        ));
    }
}

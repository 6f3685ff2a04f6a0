use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::polynomial::PsiPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiRoot<T> {
    pub psi: T,
    /// `0 < ψ ≤ min(1, ρκ)`.
    pub admissible: bool,
    /// 1 for sign-change roots, 2 for tangential ones.
    pub multiplicity_hint: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiRootSet<T> {
    pub s: T,
    /// Ascending in ψ.
    pub roots: Vec<PsiRoot<T>>,
}

impl<T: Real> PsiRootSet<T> {
    pub fn admissible(&self) -> impl Iterator<Item = &PsiRoot<T>> {
        self.roots.iter().filter(|r| r.admissible)
    }

    pub fn admissible_count(&self) -> usize {
        self.admissible().count()
    }
}

fn horner<T: Real>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &cn| acc * x + cn)
}

fn derivative<T: Real>(c: &[T]) -> Vec<T> {
    (1..c.len())
        .map(|n| c[n] * T::from_usize_lossy(n))
        .collect()
}

fn trim<T: Real>(c: &[T]) -> &[T] {
    let mut n = c.len();
    while n > 0 && c[n - 1] == T::zero() {
        n -= 1;
    }
    &c[..n]
}

/// Root of `c` in `[a, b]` where the polynomial is monotone and changes sign:
/// Newton steps safeguarded by bisection, to `1e-14` absolute.
fn refine<T: Real>(c: &[T], d: &[T], mut a: T, mut b: T) -> T {
    let mut fa = horner(c, a);
    if fa == T::zero() {
        return a;
    }
    let tol = T::lit(1e-14);
    let mut x = (a + b) * T::lit(0.5);
    for _ in 0..200 {
        let fx = horner(c, x);
        if fx == T::zero() {
            return x;
        }
        if (fx > T::zero()) == (fa > T::zero()) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        if b - a <= tol {
            break;
        }
        let dx = horner(d, x);
        let newton = x - fx / dx;
        x = if newton > a && newton < b && dx != T::zero() {
            newton
        } else {
            (a + b) * T::lit(0.5)
        };
        if (x - a).min(b - x) <= T::epsilon() * x.abs() {
            x = (a + b) * T::lit(0.5);
        }
    }
    // return the endpoint-bracketed midpoint if Newton wandered to an edge
    if x < a || x > b {
        (a + b) * T::lit(0.5)
    } else {
        x
    }
}

/// A few Newton steps on the unexpanded form: on `𝒫` for simple roots, on
/// `𝒫′` for double ones. Steps are only taken while they are tiny and do not
/// increase the target, so a root never hops to a neighbour.
fn polish<T: Real>(poly: &PsiPolynomial<T>, mut x: T, double: bool) -> T {
    let target = |x: T| {
        let [v, d1, d2] = poly.eval_unexpanded(x);
        if double {
            (d1, d2)
        } else {
            (v, d1)
        }
    };
    let (mut f, mut df) = target(x);
    let limit = T::lit(1e-9) * (T::one() + x.abs());
    for _ in 0..4 {
        if f == T::zero() || df == T::zero() {
            break;
        }
        let step = f / df;
        if !(step.abs() <= limit) {
            break;
        }
        let next = x - step;
        let (fn_, dfn) = target(next);
        if !(fn_.abs() < f.abs()) {
            break;
        }
        x = next;
        f = fn_;
        df = dfn;
    }
    x
}

/// Sign-change roots and critical points of `c` on `[lo, hi]`.
///
/// Recursion on derivatives: between consecutive critical points the
/// polynomial is monotone, so every sign change brackets exactly one root.
fn roots_and_critical<T: Real>(c: &[T], lo: T, hi: T) -> (Vec<T>, Vec<T>) {
    let c = trim(c);
    match c.len() {
        0 | 1 => return (Vec::new(), Vec::new()),
        2 => {
            let r = -c[0] / c[1];
            return (
                if r >= lo && r <= hi {
                    vec![r]
                } else {
                    Vec::new()
                },
                Vec::new(),
            );
        }
        _ => {}
    }
    let d = derivative(c);
    let (crit, _) = roots_and_critical(&d, lo, hi);
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(lo);
    knots.extend(crit.iter().copied().filter(|&x| x > lo && x < hi));
    knots.push(hi);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (fa, fb) = (horner(c, w[0]), horner(c, w[1]));
        if fa == T::zero() {
            if roots.last() != Some(&w[0]) {
                roots.push(w[0]);
            }
        } else if fb == T::zero() {
            roots.push(w[1]);
        } else if (fa > T::zero()) != (fb > T::zero()) {
            roots.push(refine(c, &d, w[0], w[1]));
        }
    }
    (roots, crit)
}

/// All real roots in `[0, min(1, ρκ)]` with the default tangential
/// tolerance [`PsiPolynomial::tol_poly`].
pub fn all_roots<T: Real>(poly: &PsiPolynomial<T>) -> Vec<PsiRoot<T>> {
    all_roots_with(poly, T::lit(TANGENTIAL_REL))
}

/// Default tangential tolerance relative to `max |Pₙ|`.
pub const TANGENTIAL_REL: f64 = 1e-9;

/// All real roots in `[0, min(1, ρκ)]`: sign-change roots plus tangential
/// roots. A tangential root is a local extremum that falls short of zero by
/// at most `rel_tol · max |Pₙ|`; extrema that cross zero already sit between
/// two sign-change roots. A pair of sign-change roots whose extremum is
/// within rounding of zero is one double root and is reported once. A
/// small margin beyond the interval catches roots sitting on its ends.
pub fn all_roots_with<T: Real>(poly: &PsiPolynomial<T>, rel_tol: T) -> Vec<PsiRoot<T>> {
    let upper = poly.psi_upper();
    let margin = T::lit(1e-6) * upper.max(T::lit(1e-3));
    let (lo, hi) = (-margin, upper + margin);
    let (simple, crit) = roots_and_critical(&poly.coeffs, lo, hi);
    let tol = rel_tol * poly.max_abs_coeff();
    let d2 = derivative(&poly.derivative_coeffs());
    let rounding = |x: T| T::lit(64.0) * T::epsilon() * poly.magnitude(x);
    let mut roots: Vec<PsiRoot<T>> = Vec::new();
    let mut merged = vec![false; simple.len()];
    for &x in &crit {
        let v = poly.eval(x);
        let curv = horner(&d2, x);
        // maximum below zero or minimum above zero: a near miss
        let near_miss = (curv < T::zero() && v < T::zero()) || (curv > T::zero() && v > T::zero());
        if near_miss && v.abs() <= tol {
            roots.push(PsiRoot {
                psi: x,
                admissible: false,
                multiplicity_hint: 2,
            });
        } else if !near_miss && v.abs() <= rounding(x) {
            let right = simple.iter().position(|&r| r > x).unwrap_or(simple.len());
            // the partner of a root split by rounding sits in the monotone
            // piece next to x; one may fall outside the interval
            let prev = crit.iter().rev().find(|&&c| c < x).copied().unwrap_or(lo);
            let next = crit.iter().find(|&&c| c > x).copied().unwrap_or(hi);
            let left = (right > 0 && simple[right - 1] >= prev).then(|| right - 1);
            let rightmost = (right < simple.len() && simple[right] <= next).then_some(right);
            let pair: Vec<usize> = if left.is_some_and(|i| simple[i] == x) {
                vec![right - 1]
            } else {
                left.into_iter().chain(rightmost).collect()
            };
            if !pair.is_empty() && pair.iter().all(|&i| !merged[i]) {
                pair.iter().for_each(|&i| merged[i] = true);
                roots.push(PsiRoot {
                    psi: x,
                    admissible: false,
                    multiplicity_hint: 2,
                });
            }
        }
    }
    roots.extend(
        simple
            .iter()
            .zip(&merged)
            .filter(|(_, &m)| !m)
            .map(|(&psi, _)| PsiRoot {
                psi,
                admissible: false,
                multiplicity_hint: 1,
            }),
    );
    for r in roots.iter_mut() {
        r.psi = polish(poly, r.psi, r.multiplicity_hint == 2);
    }
    let edge_tol = T::lit(1e-9) * upper.max(T::lit(1e-3));
    for r in roots.iter_mut() {
        if r.psi > T::zero() && r.psi <= upper + edge_tol {
            r.admissible = true;
            r.psi = r.psi.min(upper);
        }
    }
    roots.retain(|r| r.psi >= T::zero() || r.psi > -edge_tol);
    roots.sort_by(|a, b| {
        a.psi
            .partial_cmp(&b.psi)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    roots
}

/// Roots with admissibility flags; `NoAdmissibleRoot` when none is admissible.
pub fn isolate_psi_roots<T: Real>(poly: &PsiPolynomial<T>, s: T) -> Result<PsiRootSet<T>> {
    let roots = all_roots(poly);
    if !roots.iter().any(|r| r.admissible) {
        return Err(Error::NoAdmissibleRoot { s: s.as_f64() });
    }
    Ok(PsiRootSet { s, roots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helix_double_root() {
        let (k, t): (f64, f64) = (2.0, 1.0);
        let rho = k / (k * k + t * t);
        let p = PsiPolynomial::new(rho, k, 0.0, t);
        let set = isolate_psi_roots(&p, 0.0).unwrap();
        let hit = set
            .roots
            .iter()
            .find(|r| (r.psi - 0.8).abs() < 1e-12)
            .expect("root at 4/5");
        assert!(hit.admissible);
        assert_eq!(hit.multiplicity_hint, 2);
    }

    #[test]
    fn viviani_start_root() {
        let p = PsiPolynomial::new(1.0f64, 0.5, 0.0, 0.375);
        let set = isolate_psi_roots(&p, 0.0).unwrap();
        assert!(set.admissible().any(|r| (r.psi - 0.5).abs() < 1e-12));
    }

    #[test]
    fn no_root_when_torsion_dominates() {
        // ρκ > 1 keeps ρ²κ² − ψ² ≥ 3 and ρτ > 3/2 keeps the last factor
        // positive, so the squared bracket beats the κ′² term everywhere
        let p = PsiPolynomial::new(2.0f64, 1.0, 0.1, 2.0);
        assert!(matches!(
            isolate_psi_roots(&p, 2.0),
            Err(Error::NoAdmissibleRoot { .. })
        ));
    }

    #[test]
    fn monotone_piece_roots_of_product() {
        // (x − 0.1)(x − 0.1001)(x − 0.5)(x − 0.9): close pair must both appear
        let mut c = vec![1.0f64];
        for r in [0.1, 0.1001, 0.5, 0.9] {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i] -= a * r;
                next[i + 1] += a;
            }
            c = next;
        }
        let (roots, _) = roots_and_critical(&c, 0.0, 1.0);
        assert_eq!(roots.len(), 4);
        for (got, want) in roots.iter().zip([0.1, 0.1001, 0.5, 0.9]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn double_root_on_the_interval_end() {
        // rounding splits the root at ψ = ρκ ≈ 1 and pushes one half outside
        let (k, t): (f64, f64) = (2.7608014864180275, -0.1);
        let rho = k / (k * k + t * t);
        let roots = all_roots(&PsiPolynomial::new(rho, k, 0.0, t));
        let top = roots.last().unwrap();
        assert_eq!(top.multiplicity_hint, 2);
        assert!((top.psi - rho * k).abs() < 1e-12, "{}", top.psi);
    }

    #[test]
    fn near_miss_extremum_is_tangential() {
        // −B² shifted down: the maximum misses zero but stays within tolerance
        let mut p = PsiPolynomial::new(0.4f64, 2.0, 0.0, 1.0);
        let scale = p.max_abs_coeff();
        p.coeffs[0] -= 1e-11 * scale;
        let roots = all_roots(&p);
        let hit = roots
            .iter()
            .find(|r| (r.psi - 0.8).abs() < 1e-9)
            .expect("tangential root");
        assert_eq!(hit.multiplicity_hint, 2);
        p.coeffs[0] -= 1e-6 * scale;
        assert!(all_roots(&p).iter().all(|r| (r.psi - 0.8).abs() > 1e-3));
    }

    #[test]
    fn polish_reaches_rounding_on_a_sharp_helix() {
        let (k, t): (f64, f64) = (2.852, 0.486);
        let rho = k / (k * k + t * t);
        let want = k * k / (k * k + t * t);
        let roots = all_roots(&PsiPolynomial::new(rho, k, 0.0, t));
        let err = roots
            .iter()
            .map(|r| (r.psi - want).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(err < 1e-14, "{err}");
    }

    #[test]
    fn close_simple_pair_on_viviani() {
        use crate::special_curves::{viviani_closed_forms, VivianiSpec};
        let spec = VivianiSpec::new(1.0f64, (0.1, 3.0)).unwrap();
        let f = viviani_closed_forms(&spec, 1.0);
        let p = PsiPolynomial::new(1.0, f.kappa, f.kappa1, f.tau);
        let near: Vec<_> = all_roots(&p)
            .into_iter()
            .filter(|r| r.admissible && (r.psi - f.psi).abs() < 0.02)
            .collect();
        assert_eq!(near.len(), 2, "{near:?}");
        assert!(near.iter().all(|r| r.multiplicity_hint == 1));
        assert!(near.iter().any(|r| (r.psi - f.psi).abs() < 1e-13));
    }
}

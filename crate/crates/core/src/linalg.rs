//! Small dense linear algebra: Householder least squares, pivoted
//! elimination and a Jacobi eigen-solver. Matrices are row-major slices;
//! sizes stay small except for whole-curve spectral fits.

use crate::scalar::Real;

/// Householder QR of a `rows × cols` matrix applied to right-hand sides.
/// Because columns are processed in order, the leading `m` columns give
/// the least-squares fit of the first `m` basis functions for every `m`.
pub struct Qr<T> {
    r: Vec<T>,
    diag: Vec<T>,
    cols: usize,
    /// `Qᵀb` per right-hand side.
    qtb: Vec<Vec<T>>,
    /// `‖b‖²` per right-hand side.
    total: Vec<T>,
}

impl<T: Real> Qr<T> {
    /// Factors `a` (row-major, `rows ≥ cols`). Returns `None` when a column
    /// is numerically dependent on the earlier ones.
    pub fn new(a: &[T], rows: usize, cols: usize, rhs: &[Vec<T>]) -> Option<Self> {
        assert_eq!(a.len(), rows * cols);
        assert!(rows >= cols);
        let mut r = a.to_vec();
        let mut bs: Vec<Vec<T>> = rhs.to_vec();
        let total = bs
            .iter()
            .map(|b| b.iter().fold(T::zero(), |acc, &v| acc + v * v))
            .collect();
        let mut diag = vec![T::zero(); cols];
        let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if scale == T::zero() {
            return None;
        }
        for k in 0..cols {
            let mut norm = T::zero();
            for i in k..rows {
                norm = norm + r[i * cols + k] * r[i * cols + k];
            }
            let norm = norm.sqrt();
            if norm <= T::epsilon() * scale * T::lit(16.0) {
                return None;
            }
            let alpha = if r[k * cols + k] > T::zero() {
                -norm
            } else {
                norm
            };
            // v = x - alpha e1, stored in column k below the diagonal
            r[k * cols + k] = r[k * cols + k] - alpha;
            let mut vnorm2 = T::zero();
            for i in k..rows {
                vnorm2 = vnorm2 + r[i * cols + k] * r[i * cols + k];
            }
            if vnorm2 > T::zero() {
                for j in k + 1..cols {
                    let mut dot = T::zero();
                    for i in k..rows {
                        dot = dot + r[i * cols + k] * r[i * cols + j];
                    }
                    let f = (dot + dot) / vnorm2;
                    for i in k..rows {
                        r[i * cols + j] = r[i * cols + j] - f * r[i * cols + k];
                    }
                }
                for b in bs.iter_mut() {
                    let mut dot = T::zero();
                    for i in k..rows {
                        dot = dot + r[i * cols + k] * b[i];
                    }
                    let f = (dot + dot) / vnorm2;
                    for i in k..rows {
                        b[i] = b[i] - f * r[i * cols + k];
                    }
                }
            }
            diag[k] = alpha;
        }
        let qtb = bs.into_iter().map(|mut b| {
            b.truncate(cols);
            b
        });
        Some(Self {
            r,
            diag,
            cols,
            qtb: qtb.collect(),
            total,
        })
    }

    /// Coefficients of the fit on the first `m` columns, per right-hand side.
    pub fn solve_leading(&self, m: usize) -> Vec<Vec<T>> {
        let cols = self.cols;
        self.qtb
            .iter()
            .map(|b| {
                let mut x = vec![T::zero(); m];
                for k in (0..m).rev() {
                    let mut acc = b[k];
                    for j in k + 1..m {
                        acc = acc - self.r[k * cols + j] * x[j];
                    }
                    x[k] = acc / self.diag[k];
                }
                x
            })
            .collect()
    }

    /// Residual sum of squares of the first-`m`-column fit, summed over
    /// right-hand sides.
    pub fn rss_leading(&self, m: usize) -> T {
        self.qtb
            .iter()
            .zip(&self.total)
            .fold(T::zero(), |acc, (b, &t)| {
                let explained = b[..m].iter().fold(T::zero(), |e, &v| e + v * v);
                acc + (t - explained).max(T::zero())
            })
    }
}

/// Least-squares solution of `A x ≈ b` for each right-hand side in `rhs`,
/// via Householder QR. `a` is `rows × cols`, `rows ≥ cols`.
/// Returns `None` when `A` is numerically rank deficient.
pub fn lstsq<T: Real>(a: &[T], rows: usize, cols: usize, rhs: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    Qr::new(a, rows, cols, rhs).map(|qr| qr.solve_leading(cols))
}

/// Solves the square system `A x = b` with partial pivoting.
pub fn solve<T: Real>(mut a: Vec<T>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold((k, T::zero()), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pmax == T::zero() || !pmax.is_finite() {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        for i in k + 1..n {
            let f = a[i * n + k] / a[k * n + k];
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                a[i * n + j] = a[i * n + j] - f * a[k * n + j];
            }
            b[i] = b[i] - f * b[k];
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in k + 1..n {
            acc = acc - a[k * n + j] * x[j];
        }
        x[k] = acc / a[k * n + k];
    }
    Some(x)
}

/// Eigen-decomposition of a symmetric `n × n` matrix by cyclic Jacobi
/// rotations. Eigenvalues ascend; `vectors[i]` belongs to `values[i]`.
pub fn sym_eigen<T: Real>(a: &[T], n: usize) -> (Vec<T>, Vec<Vec<T>>) {
    let mut m = a.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                let x = m[i * n + j] * m[i * n + j];
                total = total + x;
                if i != j {
                    off = off + x;
                }
            }
        }
        if off <= T::epsilon() * T::epsilon() * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        m[i * n + i]
            .partial_cmp(&m[j * n + j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = idx.iter().map(|&i| m[i * n + i]).collect();
    let vectors = idx
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lstsq_recovers_exact_polynomial() {
        // y = 1 - 2x + 0.5x^2 sampled at 6 points
        let xs = [-1.0, -0.4, 0.0, 0.3, 0.9, 1.5];
        let mut a = Vec::new();
        let mut y = Vec::new();
        for &x in &xs {
            a.extend_from_slice(&[1.0f64, x, x * x]);
            y.push(1.0 - 2.0 * x + 0.5 * x * x);
        }
        let sol = lstsq(&a, 6, 3, &[y]).unwrap();
        for (got, want) in sol[0].iter().zip([1.0f64, -2.0, 0.5]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn nested_fits_match_direct() {
        let xs: Vec<f64> = (0..20).map(|i| -1.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let a: Vec<f64> = xs
            .iter()
            .flat_map(|&x| [1.0, x, x * x, x * x * x])
            .collect();
        let qr = Qr::new(&a, 20, 4, std::slice::from_ref(&y)).unwrap();
        let a2: Vec<f64> = xs.iter().flat_map(|&x| [1.0, x]).collect();
        let direct = lstsq(&a2, 20, 2, std::slice::from_ref(&y)).unwrap();
        let nested = qr.solve_leading(2);
        for (g, w) in nested[0].iter().zip(&direct[0]) {
            assert!((g - w).abs() < 1e-13);
        }
        let rss: f64 = xs
            .iter()
            .zip(&y)
            .map(|(x, y)| (y - direct[0][0] - direct[0][1] * x).powi(2))
            .sum();
        assert!((qr.rss_leading(2) - rss).abs() < 1e-12);
    }

    #[test]
    fn lstsq_flags_rank_deficiency() {
        let a = vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0];
        assert!(lstsq(&a, 3, 2, &[vec![1.0, 2.0, 3.0]]).is_none());
    }

    #[test]
    fn solve_pivots() {
        let a = vec![0.0f64, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let x = solve(a, vec![5.0, 3.0, 6.0]).unwrap();
        // verify A x = b
        let check = [2.0 * x[1] + x[2], x[0] + x[1], 3.0 * x[0] + x[2]];
        for (c, b) in check.iter().zip([5.0, 3.0, 6.0]) {
            assert!((c - b).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobi_eigen_diagonalizes() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 1.0];
        let (vals, vecs) = sym_eigen(&a, 3);
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
        for (l, v) in vals.iter().zip(&vecs) {
            for i in 0..3 {
                let av: f64 = (0..3).map(|k| a[i * 3 + k] * v[k]).sum();
                assert!((av - l * v[i]).abs() < 1e-12);
            }
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 8.0).abs() < 1e-12);
    }
}

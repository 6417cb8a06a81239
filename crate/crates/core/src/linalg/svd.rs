#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use super::matrix::Matrix;
use super::scalar::{Scalar, C64};

const MAX_SWEEPS: usize = 80;
const ORTHO_EPS: f64 = 1e-15;

/// One-sided Jacobi SVD: `M V = W` with mutually orthogonal columns of `W`
/// whose norms are the singular values. Columns are sorted by decreasing
/// singular value.
#[derive(Clone, Debug)]
pub struct Svd<T: Scalar> {
    /// `U Σ`: the rotated columns of the input.
    pub w: Matrix<T>,
    pub sigma: Vec<f64>,
    /// Unitary right factor.
    pub v: Matrix<T>,
}

pub fn svd<T: Scalar>(m: &Matrix<T>) -> Svd<T> {
    let (p, q) = (m.rows(), m.cols());
    let mut w = m.clone();
    let mut v = Matrix::<T>::identity(q);
    let total: f64 = m.as_slice().iter().map(|x| x.modulus() * x.modulus()).sum();
    let negligible = (1e-32 * total).max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..q {
            for j in i + 1..q {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = T::zero();
                for k in 0..p {
                    let x = w[(k, i)];
                    let y = w[(k, j)];
                    alpha += x.modulus() * x.modulus();
                    beta += y.modulus() * y.modulus();
                    gamma += x.conj() * y;
                }
                let g = gamma.modulus();
                if alpha < negligible || beta < negligible || g <= ORTHO_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let e = gamma.phase();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (cs, ss) = (T::from_real(c), T::from_real(s));
                rotate(&mut w, i, j, cs, ss, e);
                rotate(&mut v, i, j, cs, ss, e);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = (0..q)
        .map(|j| {
            (0..p)
                .map(|k| {
                    let a = w[(k, j)].modulus();
                    a * a
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap_or(core::cmp::Ordering::Equal));
    let w = w.select_cols(&order);
    let v = v.select_cols(&order);
    sigma = order.iter().map(|&k| sigma[k]).collect();
    Svd { w, sigma, v }
}

fn rotate<T: Scalar>(m: &mut Matrix<T>, i: usize, j: usize, c: T, s: T, e: T) {
    let ec = e.conj();
    for k in 0..m.rows() {
        let x = m[(k, i)];
        let y = m[(k, j)];
        m[(k, i)] = c * x - s * ec * y;
        m[(k, j)] = s * e * x + c * y;
    }
}

/// Numerical rank: singular values above `tol * sigma_max`.
pub fn rank<T: Scalar>(m: &Matrix<T>, tol: f64) -> usize {
    let s = svd(m);
    count_above(&s.sigma, tol)
}

fn count_above(sigma: &[f64], tol: f64) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&x| x > tol * smax).count()
}

/// Rank and an orthonormal kernel basis (as columns).
pub fn rank_and_nullspace<T: Scalar>(m: &Matrix<T>, tol: f64) -> (usize, Matrix<T>) {
    let s = svd(m);
    let r = count_above(&s.sigma, tol);
    let idx: Vec<usize> = (r..m.cols()).collect();
    (r, s.v.select_cols(&idx))
}

/// Rank over the complex field.
pub fn complex_rank(m: &Matrix<C64>, tol: f64) -> usize {
    rank(m, tol)
}

/// Rank after scaling every nonzero row to unit length.
pub fn row_normalized_rank<T: Scalar>(m: &Matrix<T>, tol: f64) -> usize {
    rank(&normalize_rows(m), tol)
}

pub fn normalize_rows<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let mut out = m.clone();
    for i in 0..m.rows() {
        let n = super::matrix::norm2_vec(m.row(i));
        if n > 0.0 {
            for a in out.row_mut(i) {
                *a = *a / T::from_real(n);
            }
        }
    }
    out
}

//! Slow, independent reference implementations used to cross-check the
//! main routines. Compiled for tests and with the `oracles` feature.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::linalg::{Matrix, Scalar, C64};

/// Whether some direction `p` has `p . q_j > 0` for every nonzero column of
/// a two-row `q`. Tries the midpoints between all boundary directions and a
/// dense ring of angles.
pub fn nonneg_p_brute_force(q: &Matrix<f64>, zero: f64) -> bool {
    let cols: Vec<(f64, f64)> = (0..q.cols())
        .map(|j| (q[(0, j)], q[(1, j)]))
        .filter(|(a, b)| a.abs() > zero || b.abs() > zero)
        .map(|(a, b)| {
            let n = (a * a + b * b).sqrt();
            (a / n, b / n)
        })
        .collect();
    if cols.is_empty() {
        return true;
    }
    let mut cuts: Vec<f64> = cols
        .iter()
        .flat_map(|&(a, b)| {
            let t = b.atan2(a);
            [t + PI / 2.0, t - PI / 2.0]
        })
        .map(|t| if t < 0.0 { t + 2.0 * PI } else { t })
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut candidates: Vec<f64> = cuts
        .windows(2)
        .map(|w| 0.5 * (w[0] + w[1]))
        .collect();
    candidates.push(0.5 * (cuts[cuts.len() - 1] + cuts[0] + 2.0 * PI));
    candidates.extend((0..3600).map(|k| 2.0 * PI * k as f64 / 3600.0));
    candidates.iter().any(|&t| {
        let (c, s) = (t.cos(), t.sin());
        cols.iter().all(|&(a, b)| c * a + s * b > 1e-9)
    })
}

fn solve_square(a: &Matrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i]);
            r
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[piv][k].abs() < 1e-12 {
            return None;
        }
        m.swap(k, piv);
        for i in 0..n {
            if i != k {
                let f = m[i][k] / m[k][k];
                for j in k..=n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A nonnegative `X` with `Q X = I`, by enumerating basic feasible solutions
/// column by column. `q` must have full row rank.
pub fn nonneg_right_inverse_brute_force(q: &Matrix<f64>) -> Option<Matrix<f64>> {
    let (m, n) = (q.rows(), q.cols());
    let bases = subsets(n, m);
    let mut x = Matrix::zeros(n, m);
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        let found = bases.iter().find_map(|b| {
            let sol = solve_square(&q.select_cols(b), &e)?;
            sol.iter().all(|&v| v >= -1e-12).then(|| (b.clone(), sol))
        })?;
        for (&j, &v) in found.0.iter().zip(&found.1) {
            x[(j, i)] = v.max(0.0);
        }
    }
    Some(x)
}

/// Kernel basis (as columns) from the reduced row echelon form.
pub fn rref_nullspace(a: &Matrix<f64>, tol: f64) -> Matrix<f64> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.to_rows();
    let scale = a.max_abs().max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let piv = (r..rows).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[piv][c].abs() <= tol * scale {
            continue;
        }
        m.swap(r, piv);
        let p = m[r][c];
        for v in m[r].iter_mut() {
            *v /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[i][c];
                if f != 0.0 {
                    for j in 0..cols {
                        m[i][j] -= f * m[r][j];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    Matrix::from_fn(cols, free.len(), |i, k| {
        let f = free[k];
        if i == f {
            1.0
        } else if let Some(row) = pivots.iter().position(|&p| p == i) {
            -m[row][f]
        } else {
            0.0
        }
    })
}

/// Whether random real combinations of an echelon kernel basis of the
/// realness conditions give a nonsingular `P`.
pub fn real_p_sampling(q: &Matrix<C64>, seed: u64, draws: usize) -> bool {
    let m = q.rows();
    let coeff = Matrix::from_fn(q.cols(), 2 * m, |k, j| if j < m { q[(j, k)].im } else { q[(j - m, k)].re });
    let kernel = rref_nullspace(&coeff, 1e-10);
    let d = kernel.cols();
    if d == 0 {
        return false;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..draws {
        let p = Matrix::from_fn(m, m, |_, _| C64::new(0.0, 0.0));
        let mut p = p;
        for i in 0..m {
            let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v = kernel.mul_vec(&c).unwrap();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for j in 0..m {
                p[(i, j)] = C64::new(v[j] / n, v[m + j] / n);
            }
        }
        if complex_det(&p).norm() > 1e-9 {
            return true;
        }
    }
    false
}

fn complex_det(a: &Matrix<C64>) -> C64 {
    let n = a.rows();
    let mut m = a.clone();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm())).unwrap();
        if m[(piv, k)].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            det = -det;
        }
        det *= m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            for j in k..n {
                let t = m[(k, j)];
                m[(i, j)] -= f * t;
            }
        }
    }
    det
}

/// Coefficients of `det(zI - A)` from the Faddeev-LeVerrier recursion,
/// highest degree first.
pub fn characteristic_polynomial(a: &Matrix<f64>) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = vec![1.0];
    let mut mk = Matrix::<f64>::zeros(n, n);
    let mut c = 1.0;
    for k in 1..=n {
        let mut next = a.matmul(&mk).unwrap();
        for i in 0..n {
            next[(i, i)] += c;
        }
        mk = next;
        let am = a.matmul(&mk).unwrap();
        let tr: f64 = (0..n).map(|i| am[(i, i)]).sum();
        c = -tr / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Polynomial roots by Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[0];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let bound = 1.0 + monic[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    let eval = |x: C64| monic.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c);
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = C64::new(1e-12, 0.0);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    z
}

/// Eigenvalues from the characteristic polynomial.
pub fn eigenvalues_by_polynomial(a: &Matrix<f64>) -> Vec<C64> {
    polynomial_roots(&characteristic_polynomial(a))
}

/// `exp(A)` by a truncated Taylor series after halving until `|A| < 1/2`.
pub fn expm_taylor<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.rows();
    let mut s = 0;
    let mut norm = a.norm_inf();
    while norm > 0.5 {
        norm /= 2.0;
        s += 1;
    }
    let scaled = a.scale(T::from_real(0.5f64.powi(s)));
    let mut term = Matrix::<T>::identity(n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = term.matmul(&scaled).unwrap().scale(T::from_real(1.0 / k as f64));
        sum = sum.add(&term).unwrap();
    }
    for _ in 0..s {
        sum = sum.matmul(&sum).unwrap();
    }
    sum
}

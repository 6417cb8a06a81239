//! Real nonsymmetric eigenproblem: Householder reduction to Hessenberg form
//! followed by the shifted double-step QR iteration and back-substitution
//! for the eigenvectors (EISPACK `orthes`/`hqr2`, by way of JAMA).

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use super::matrix::Matrix;
use super::scalar::C64;
use crate::error::{Error, Result};

/// Right eigenpairs of a real square matrix, as found by the QR iteration.
#[derive(Clone, Debug)]
pub(crate) struct RawEigen {
    pub values: Vec<C64>,
    pub vectors: Vec<Vec<C64>>,
}

pub(crate) fn eig_real(a: &Matrix<f64>) -> Result<RawEigen> {
    let nn = a.rows();
    if nn == 0 {
        return Ok(RawEigen {
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let mut h: Vec<Vec<f64>> = a.to_rows();
    let mut v = vec![vec![0.0; nn]; nn];
    orthes(&mut h, &mut v);
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    hqr2(&mut h, &mut v, &mut d, &mut e)?;

    let mut values = Vec::with_capacity(nn);
    let mut vectors = Vec::with_capacity(nn);
    let mut j = 0;
    while j < nn {
        if e[j] == 0.0 {
            values.push(C64::new(d[j], 0.0));
            vectors.push((0..nn).map(|i| C64::new(v[i][j], 0.0)).collect());
            j += 1;
        } else {
            // Columns j, j+1 hold the real and imaginary parts of the pair.
            let lam = C64::new(d[j], e[j]);
            let vec_pos: Vec<C64> = (0..nn).map(|i| C64::new(v[i][j], v[i][j + 1])).collect();
            let vec_neg: Vec<C64> = vec_pos.iter().map(|z| z.conj()).collect();
            values.push(lam);
            vectors.push(vec_pos);
            values.push(lam.conj());
            vectors.push(vec_neg);
            j += 2;
        }
    }
    Ok(RawEigen { values, vectors })
}

fn orthes(h: &mut [Vec<f64>], v: &mut [Vec<f64>]) {
    let n = h.len();
    let low = 0usize;
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in low + 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale != 0.0 {
            let mut hh = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h[i][m - 1] / scale;
                hh += ort[i] * ort[i];
            }
            let mut g = hh.sqrt();
            if ort[m] > 0.0 {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;

            for j in m..n {
                let mut f = 0.0;
                for i in (m..=high).rev() {
                    f += ort[i] * h[i][j];
                }
                f /= hh;
                for i in m..=high {
                    h[i][j] -= f * ort[i];
                }
            }
            for i in 0..=high {
                let mut f = 0.0;
                for j in (m..=high).rev() {
                    f += ort[j] * h[i][j];
                }
                f /= hh;
                for j in m..=high {
                    h[i][j] -= f * ort[j];
                }
            }
            ort[m] *= scale;
            h[m][m - 1] = scale * g;
        }
    }

    for (i, row) in v.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = if i == j { 1.0 } else { 0.0 };
        }
    }

    if high < 2 {
        return;
    }
    for m in (low + 1..high).rev() {
        if h[m][m - 1] != 0.0 {
            for i in m + 1..=high {
                ort[i] = h[i][m - 1];
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v[i][j];
                }
                g = (g / ort[m]) / h[m][m - 1];
                for i in m..=high {
                    v[i][j] += g * ort[i];
                }
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

#[allow(clippy::many_single_char_names)]
fn hqr2(h: &mut [Vec<f64>], v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let nn = h.len() as isize;
    let mut n = nn - 1;
    let low: isize = 0;
    let high = nn - 1;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut t, mut w, mut x, mut y);

    macro_rules! H {
        ($i:expr, $j:expr) => {
            h[($i) as usize][($j) as usize]
        };
    }
    macro_rules! V {
        ($i:expr, $j:expr) => {
            v[($i) as usize][($j) as usize]
        };
    }

    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += H!(i, j).abs();
        }
    }

    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let budget = 100 * (nn as usize).max(1);
    while n >= low {
        let mut l = n;
        while l > low {
            s = H!(l - 1, l - 1).abs() + H!(l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if H!(l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            H!(n, n) += exshift;
            d[n as usize] = H!(n, n);
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            w = H!(n, n - 1) * H!(n - 1, n);
            p = (H!(n - 1, n - 1) - H!(n, n)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            H!(n, n) += exshift;
            H!(n - 1, n - 1) += exshift;
            x = H!(n, n);

            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
                x = H!(n, n - 1);
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;

                for j in n - 1..nn {
                    z = H!(n - 1, j);
                    H!(n - 1, j) = q * z + p * H!(n, j);
                    H!(n, j) = q * H!(n, j) - p * z;
                }
                for i in 0..=n {
                    z = H!(i, n - 1);
                    H!(i, n - 1) = q * z + p * H!(i, n);
                    H!(i, n) = q * H!(i, n) - p * z;
                }
                for i in low..=high {
                    z = V!(i, n - 1);
                    V!(i, n - 1) = q * z + p * V!(i, n);
                    V!(i, n) = q * V!(i, n) - p * z;
                }
            } else {
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = H!(n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = H!(n - 1, n - 1);
                w = H!(n, n - 1) * H!(n - 1, n);
            }

            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    H!(i, i) -= x;
                }
                s = H!(n, n - 1).abs() + H!(n - 1, n - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }

            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        H!(i, i) -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_iter += 1;
            if total_iter > budget {
                return Err(Error::ConvergenceFailure);
            }

            let mut m = n - 2;
            while m >= l {
                z = H!(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / H!(m + 1, m) + H!(m, m + 1);
                q = H!(m + 1, m + 1) - z - r - s;
                r = H!(m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if H!(m, m - 1).abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (H!(m - 1, m - 1).abs() + z.abs() + H!(m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=n {
                H!(i, i - 2) = 0.0;
                if i > m + 2 {
                    H!(i, i - 3) = 0.0;
                }
            }

            let mut k = m;
            while k < n {
                let notlast = k != n - 1;
                if k != m {
                    p = H!(k, k - 1);
                    q = H!(k + 1, k - 1);
                    r = if notlast { H!(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        H!(k, k - 1) = -s * x;
                    } else if l != m {
                        H!(k, k - 1) = -H!(k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = H!(k, j) + q * H!(k + 1, j);
                        if notlast {
                            p += r * H!(k + 2, j);
                            H!(k + 2, j) -= p * z;
                        }
                        H!(k, j) -= p * x;
                        H!(k + 1, j) -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * H!(i, k) + y * H!(i, k + 1);
                        if notlast {
                            p += z * H!(i, k + 2);
                            H!(i, k + 2) -= p * r;
                        }
                        H!(i, k) -= p;
                        H!(i, k + 1) -= p * q;
                    }
                    for i in low..=high {
                        p = x * V!(i, k) + y * V!(i, k + 1);
                        if notlast {
                            p += z * V!(i, k + 2);
                            V!(i, k + 2) -= p * r;
                        }
                        V!(i, k) -= p;
                        V!(i, k + 1) -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    if norm == 0.0 {
        return Ok(());
    }

    n = nn - 1;
    while n >= 0 {
        p = d[n as usize];
        q = e[n as usize];
        if q == 0.0 {
            let mut l = n;
            H!(n, n) = 1.0;
            let mut i = n - 1;
            while i >= 0 {
                w = H!(i, i) - p;
                r = 0.0;
                for j in l..=n {
                    r += H!(i, j) * H!(j, n);
                }
                if e[i as usize] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        H!(i, n) = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = H!(i, i + 1);
                        y = H!(i + 1, i);
                        q = (d[i as usize] - p) * (d[i as usize] - p) + e[i as usize] * e[i as usize];
                        t = (x * s - z * r) / q;
                        H!(i, n) = t;
                        H!(i + 1, n) = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }
                    t = H!(i, n).abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            H!(j, n) /= t;
                        }
                    }
                }
                i -= 1;
            }
        } else if q < 0.0 {
            let mut l = n - 1;
            if H!(n, n - 1).abs() > H!(n - 1, n).abs() {
                H!(n - 1, n - 1) = q / H!(n, n - 1);
                H!(n - 1, n) = -(H!(n, n) - p) / H!(n, n - 1);
            } else {
                let (cr, ci) = cdiv(0.0, -H!(n - 1, n), H!(n - 1, n - 1) - p, q);
                H!(n - 1, n - 1) = cr;
                H!(n - 1, n) = ci;
            }
            H!(n, n - 1) = 0.0;
            H!(n, n) = 1.0;
            let mut i = n - 2;
            while i >= 0 {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += H!(i, j) * H!(j, n - 1);
                    sa += H!(i, j) * H!(j, n);
                }
                w = H!(i, i) - p;
                if e[i as usize] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        H!(i, n - 1) = cr;
                        H!(i, n) = ci;
                    } else {
                        x = H!(i, i + 1);
                        y = H!(i + 1, i);
                        let di = d[i as usize] - p;
                        let mut vr = di * di + e[i as usize] * e[i as usize] - q * q;
                        let vi = di * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) = cdiv(
                            x * r - z * ra + q * sa,
                            x * s - z * sa - q * ra,
                            vr,
                            vi,
                        );
                        H!(i, n - 1) = cr;
                        H!(i, n) = ci;
                        if x.abs() > z.abs() + q.abs() {
                            H!(i + 1, n - 1) = (-ra - w * H!(i, n - 1) + q * H!(i, n)) / x;
                            H!(i + 1, n) = (-sa - w * H!(i, n) - q * H!(i, n - 1)) / x;
                        } else {
                            let (cr, ci) = cdiv(-r - y * H!(i, n - 1), -s - y * H!(i, n), z, q);
                            H!(i + 1, n - 1) = cr;
                            H!(i + 1, n) = ci;
                        }
                    }
                    t = H!(i, n - 1).abs().max(H!(i, n).abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            H!(j, n - 1) /= t;
                            H!(j, n) /= t;
                        }
                    }
                }
                i -= 1;
            }
        }
        n -= 1;
    }

    let mut j = nn - 1;
    while j >= low {
        for i in low..=high {
            z = 0.0;
            for k in low..=j.min(high) {
                z += V!(i, k) * H!(k, j);
            }
            V!(i, j) = z;
        }
        j -= 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &Matrix<f64>) {
        let raw = eig_real(a).unwrap();
        let ac = a.to_complex();
        for (lam, vec) in raw.values.iter().zip(&raw.vectors) {
            let av = ac.mul_vec(vec).unwrap();
            let vn = vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let res = av
                .iter()
                .zip(vec)
                .map(|(x, v)| (x - lam * v).norm())
                .fold(0.0, f64::max);
            assert!(res <= 1e-12 * (1.0 + a.norm_inf()) * vn, "residual {res} for {lam}");
        }
    }

    #[test]
    fn rotation_block_gives_conjugate_pair() {
        let a = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        let raw = eig_real(&a).unwrap();
        let mut ims: Vec<f64> = raw.values.iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
        check(&a);
    }

    #[test]
    fn residuals_on_assorted_matrices() {
        check(&Matrix::from_rows(&[[-1.0, 0.0, 3.0], [1.0, -2.0, 0.0], [0.0, 2.0, -3.0]]).unwrap());
        check(
            &Matrix::from_rows(&[
                [-1.0, 1.0, 0.0, 0.0, 0.0],
                [1.0, -5.0, 4.0, 0.0, 0.0],
                [0.0, 4.0, -6.0, 5.0, 0.0],
                [0.0, 0.0, 2.0, -6.0, 2.0],
                [0.0, 0.0, 0.0, 1.0, -2.0],
            ])
            .unwrap(),
        );
        check(&Matrix::from_rows(&[[4.0, 1.0, -2.0, 2.0], [1.0, 2.0, 0.0, 1.0], [-2.0, 0.0, 3.0, -2.0], [2.0, 1.0, -2.0, -1.0]]).unwrap());
        check(&Matrix::from_rows(&[[2.0]]).unwrap());
    }
}

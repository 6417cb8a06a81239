//! Left eigensystems of real square matrices.
//!
//! A left eigenvector `v` of `A` satisfies `v^T A = lambda v^T`, i.e. it is a
//! right eigenvector of `A^T`. Repeated eigenvalues are grouped and, when the
//! QR iteration returns nearly parallel vectors for them, their eigenspace is
//! recomputed as a kernel of `A^T - lambda I`.

use alloc::vec::Vec;

use super::hqr::{eig_real, RawEigen};
use super::matrix::{norm_inf_vec, Matrix};
use super::scalar::{Scalar, C64};
use super::svd;
use crate::error::{Error, Result};

/// Where an eigensystem came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenSource {
    ClosedForm,
    Numeric,
}

/// One eigenvalue with one eigenvector. A repeated eigenvalue appears once
/// per independent eigenvector, each entry carrying the algebraic multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    pub vector: Vec<C64>,
    pub multiplicity: usize,
}

impl EigenPair {
    pub fn new(value: C64, vector: Vec<C64>) -> Self {
        Self {
            value,
            vector,
            multiplicity: 1,
        }
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let scale = 1.0 + self.value.norm();
        self.value.im.abs() <= tol * scale && self.vector.iter().all(|z| z.im.abs() <= tol * (1.0 + z.norm()))
    }

    pub fn real_vector(&self) -> Vec<f64> {
        self.vector.iter().map(|z| z.re).collect()
    }
}

/// Left eigenpairs of a compartmental matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub pairs: Vec<EigenPair>,
    pub source: EigenSource,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.pairs.first().map_or(0, |p| p.vector.len())
    }

    /// Eigenvalues with algebraic multiplicity, `n` values in total when the
    /// system is complete.
    pub fn eigenvalue_multiset(&self) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        let mut seen: Vec<(C64, usize)> = Vec::new();
        for p in &self.pairs {
            if p.multiplicity <= 1 {
                out.push(p.value);
                continue;
            }
            if let Some(entry) = seen.iter_mut().find(|(v, _)| *v == p.value) {
                entry.1 += 1;
                continue;
            }
            seen.push((p.value, 1));
            for _ in 0..p.multiplicity {
                out.push(p.value);
            }
        }
        out
    }

    /// Largest relative residual `|A^T v - lambda v|_inf / (|A^T|_inf |v|_inf)`.
    pub fn max_residual(&self, a: &Matrix<f64>) -> f64 {
        self.pairs
            .iter()
            .map(|p| left_residual(a, p.value, &p.vector))
            .fold(0.0, f64::max)
    }

    /// Sorts by real part, then imaginary part, both descending.
    pub fn sort(&mut self) {
        self.pairs.sort_by(|a, b| {
            b.value
                .re
                .partial_cmp(&a.value.re)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(b.value.im.partial_cmp(&a.value.im).unwrap_or(core::cmp::Ordering::Equal))
        });
    }

    /// The eigenvectors as rows of a complex matrix.
    pub fn vector_matrix(&self) -> Matrix<C64> {
        let n = self.dim();
        Matrix::from_fn(self.pairs.len(), n, |i, j| self.pairs[i].vector[j])
    }
}

/// Relative residual of a candidate left eigenpair.
pub fn left_residual(a: &Matrix<f64>, lambda: C64, v: &[C64]) -> f64 {
    let ac = a.to_complex();
    let lhs = match ac.vec_mul(v) {
        Ok(x) => x,
        Err(_) => return f64::INFINITY,
    };
    let num = lhs
        .iter()
        .zip(v)
        .map(|(x, y)| (x - lambda * y).norm())
        .fold(0.0, f64::max);
    let den = a.transpose().norm_inf() * norm_inf_vec(v);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Scales `v` so that its first entry of largest modulus equals one.
pub fn normalize_max_entry(v: &mut [C64]) {
    let m = norm_inf_vec(v);
    if m == 0.0 {
        return;
    }
    let pivot = v.iter().copied().find(|z| z.norm() >= m * (1.0 - 1e-12)).unwrap_or(C64::new(1.0, 0.0));
    for z in v.iter_mut() {
        *z /= pivot;
    }
}

/// Numerically computed left eigensystem of `a`.
pub fn eig_left(a: &Matrix<f64>) -> Result<EigenSystem> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix"));
    }
    let at = a.transpose();
    let n = at.rows();
    let raw = eig_real(&at)?;
    let scale = at.norm_inf().max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-6 * scale;

    let clusters = cluster(&raw, cluster_tol);
    let mut pairs = Vec::with_capacity(n);
    for members in clusters {
        if members.len() == 1 {
            let k = members[0];
            let mut v = raw.vectors[k].clone();
            let value = raw.values[k];
            normalize_max_entry(&mut v);
            pairs.push(EigenPair::new(value, v));
            continue;
        }
        pairs.extend(resolve_cluster(&at, &raw, &members, scale));
    }
    let mut sys = EigenSystem {
        pairs,
        source: EigenSource::Numeric,
    };
    sys.sort();
    Ok(sys)
}

fn cluster(raw: &RawEigen, tol: f64) -> Vec<Vec<usize>> {
    let n = raw.values.len();
    let mut assigned = alloc::vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        assigned[i] = true;
        let mut members = alloc::vec![i];
        let mut grew = true;
        while grew {
            grew = false;
            for j in 0..n {
                if !assigned[j] && members.iter().any(|&m| (raw.values[m] - raw.values[j]).norm() <= tol) {
                    assigned[j] = true;
                    members.push(j);
                    grew = true;
                }
            }
        }
        out.push(members);
    }
    out
}

fn resolve_cluster(at: &Matrix<f64>, raw: &RawEigen, members: &[usize], scale: f64) -> Vec<EigenPair> {
    let m = members.len();
    let n = at.rows();
    let mean = members.iter().fold(C64::new(0.0, 0.0), |acc, &k| acc + raw.values[k]) / m as f64;
    let real = mean.im.abs() <= 1e-9 * scale;

    let kernel: Vec<Vec<C64>> = if real {
        let shifted = Matrix::from_fn(n, n, |i, j| at[(i, j)] - if i == j { mean.re } else { 0.0 });
        kernel_vectors(&shifted, m, scale)
            .into_iter()
            .map(|v| v.into_iter().map(|x| C64::new(x, 0.0)).collect())
            .collect()
    } else {
        let shifted = Matrix::from_fn(n, n, |i, j| C64::new(at[(i, j)], 0.0) - if i == j { mean } else { C64::new(0.0, 0.0) });
        kernel_vectors(&shifted, m, scale)
    };

    if kernel.len() == m {
        let value = if real { C64::new(mean.re, 0.0) } else { mean };
        return kernel
            .into_iter()
            .map(|mut v| {
                normalize_max_entry(&mut v);
                EigenPair {
                    value,
                    vector: v,
                    multiplicity: m,
                }
            })
            .collect();
    }

    // Nearly coincident but distinct eigenvalues: keep the QR vectors when
    // they are independent.
    let qr_vectors = Matrix::from_fn(m, n, |i, j| raw.vectors[members[i]][j]);
    if svd::row_normalized_rank(&qr_vectors, 1e-8) == m {
        return members
            .iter()
            .map(|&k| {
                let mut v = raw.vectors[k].clone();
                normalize_max_entry(&mut v);
                EigenPair::new(raw.values[k], v)
            })
            .collect();
    }

    let value = if real { C64::new(mean.re, 0.0) } else { mean };
    let mut kernel = kernel;
    if kernel.is_empty() {
        let mut v = raw.vectors[members[0]].clone();
        if real {
            for z in v.iter_mut() {
                z.im = 0.0;
            }
        }
        kernel.push(v);
    }
    kernel
        .into_iter()
        .map(|mut v| {
            normalize_max_entry(&mut v);
            EigenPair {
                value,
                vector: v,
                multiplicity: m,
            }
        })
        .collect()
}

/// Right singular vectors of the `at_most` smallest singular values that lie
/// below `1e-8 * scale`.
fn kernel_vectors<T: Scalar>(shifted: &Matrix<T>, at_most: usize, scale: f64) -> Vec<Vec<T>> {
    let s = svd::svd(shifted);
    let n = shifted.cols();
    let mut out = Vec::new();
    for k in (n - at_most..n).rev() {
        if s.sigma[k] <= 1e-8 * scale {
            out.push(s.v.column(k));
        }
    }
    out
}

/// Pairs two eigenvalue lists greedily by distance and returns the largest
/// matched distance relative to `1 + |lambda|`.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = alloc::vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (j, y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if d < best_d {
                best_d = d;
                best = Some(j);
            }
        }
        match best {
            Some(j) => {
                used[j] = true;
                worst = worst.max(best_d / (1.0 + x.norm()));
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

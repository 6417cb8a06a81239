//! Parameterized model families with closed-form left eigensystems.
//!
//! Each constructor returns the coefficient matrix as a [`CompartmentalModel`]
//! and, where one exists, the eigensystem of `A^T` evaluated at the given
//! parameters. Vectors follow the printed scaling of each family: leading 1
//! for flow-free chains and circulants, trailing 1 for chains with outflows
//! and for cycles.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{left_residual, EigenPair, EigenSource, EigenSystem, Matrix, C64};
use crate::model::CompartmentalModel;

/// Relative eigenvalue gap below which parameters count as coincident.
pub const ROBUSTNESS_GAP: f64 = 1e-9;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn real_pair(value: f64, v: &[f64]) -> EigenPair {
    EigenPair::new(c(value), v.iter().map(|&x| c(x)).collect())
}

fn check_positive(name: &str, v: &[f64]) -> Result<()> {
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::InvalidParameter(format!("{name}[{i}] must be positive, got {x}")));
        }
    }
    Ok(())
}

fn check_nonnegative(name: &str, v: &[f64]) -> Result<()> {
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidParameter(format!("{name}[{i}] must be nonnegative, got {x}")));
        }
    }
    Ok(())
}

/// Fails with `NonRobustParameters(i, j)` when two of `values` are closer
/// than `ROBUSTNESS_GAP * max |value|`.
pub fn check_robust(values: &[C64]) -> Result<()> {
    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if (values[i] - values[j]).norm() <= ROBUSTNESS_GAP * scale {
                return Err(Error::NonRobustParameters(i, j));
            }
        }
    }
    Ok(())
}

/// Groups equal eigenvalues, sets their algebraic multiplicity and makes
/// the values of a group bitwise identical.
fn assign_multiplicities(pairs: &mut [EigenPair]) {
    let scale = pairs.iter().map(|p| p.value.norm()).fold(0.0, f64::max);
    let tol = ROBUSTNESS_GAP * scale;
    let n = pairs.len();
    let mut group = vec![usize::MAX; n];
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = i;
        for j in i + 1..n {
            if group[j] == usize::MAX && (pairs[i].value - pairs[j].value).norm() <= tol {
                group[j] = i;
            }
        }
    }
    for i in 0..n {
        let g = group[i];
        let count = group.iter().filter(|&&x| x == g).count();
        pairs[i].value = pairs[g].value;
        pairs[i].multiplicity = count;
    }
}

fn closed_form(mut pairs: Vec<EigenPair>) -> EigenSystem {
    assign_multiplicities(&mut pairs);
    EigenSystem {
        pairs,
        source: EigenSource::ClosedForm,
    }
}

/// Irreversible chain `X1 -> X2 -> ... -> XM` with rates `k` (length M-1)
/// and outflow coefficients `mu` (length M).
///
/// The left eigenvector for `lambda_j = -k_j - mu_j` vanishes after slot
/// `j` and satisfies `v_i = k_i v_{i+1} / (k_i + mu_i + lambda_j)` before it.
/// Without outflows the vectors are scaled to a leading 1 (the last one is
/// all ones); with outflows to a 1 in slot `j`.
pub fn catenary_irreversible(k: &[f64], mu: &[f64]) -> Result<(CompartmentalModel, EigenSystem)> {
    let m = mu.len();
    if m < 1 || k.len() + 1 != m {
        return Err(Error::DimensionMismatch {
            expected: m.saturating_sub(1),
            found: k.len(),
        });
    }
    check_positive("k", k)?;
    check_nonnegative("mu", mu)?;
    let diag: Vec<f64> = (0..m)
        .map(|i| if i + 1 < m { -k[i] - mu[i] } else { -mu[i] })
        .collect();
    let a = Matrix::from_fn(m, m, |i, j| {
        if i == j {
            diag[i]
        } else if i == j + 1 {
            k[j]
        } else {
            0.0
        }
    });
    check_robust(&diag.iter().map(|&x| c(x)).collect::<Vec<_>>())?;

    let flow_free = mu.iter().all(|&x| x == 0.0);
    let mut pairs = Vec::with_capacity(m);
    for j in 0..m {
        let lambda = diag[j];
        let mut v = vec![0.0; m];
        v[j] = 1.0;
        for i in (0..j).rev() {
            v[i] = k[i] * v[i + 1] / (k[i] + mu[i] + lambda);
        }
        if flow_free {
            let lead = v[0];
            for x in v.iter_mut() {
                *x /= lead;
            }
        }
        pairs.push(real_pair(lambda, &v));
    }
    Ok((CompartmentalModel::from_matrix(a)?, closed_form(pairs)))
}

/// Mamillary system with peripheral compartments `X1..XM` draining into
/// the mother compartment `X(M+1)` at rates `k`.
pub fn mamillary_inward(k: &[f64]) -> Result<(CompartmentalModel, EigenSystem)> {
    let m = k.len();
    if m == 0 {
        return Err(Error::InvalidParameter("at least one peripheral compartment".to_string()));
    }
    check_positive("k", k)?;
    check_robust(&k.iter().map(|&x| c(-x)).collect::<Vec<_>>())?;
    let n = m + 1;
    let a = Matrix::from_fn(n, n, |i, j| {
        if i == j && i < m {
            -k[i]
        } else if i == m && j < m {
            k[j]
        } else {
            0.0
        }
    });
    let mut pairs = Vec::with_capacity(n);
    for i in 0..m {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        pairs.push(real_pair(-k[i], &e));
    }
    pairs.push(real_pair(0.0, &vec![1.0; n]));
    Ok((CompartmentalModel::from_matrix(a)?, closed_form(pairs)))
}

/// Mamillary system whose mother compartment `X(M+1)` feeds the peripheral
/// compartments at rates `k`. Eigenvalue `-K = -sum k` has eigenvector
/// `e_(M+1)`; eigenvalue 0 has multiplicity `M` with eigenvectors
/// `e_i - (k_i / k_M) e_M` and `(K / k_M) e_M + e_(M+1)`.
pub fn mamillary_outward(k: &[f64]) -> Result<(CompartmentalModel, EigenSystem)> {
    let m = k.len();
    if m == 0 {
        return Err(Error::InvalidParameter("at least one peripheral compartment".to_string()));
    }
    check_positive("k", k)?;
    let n = m + 1;
    let big_k: f64 = k.iter().sum();
    let a = Matrix::from_fn(n, n, |i, j| {
        if j == m && i < m {
            k[i]
        } else if i == m && j == m {
            -big_k
        } else {
            0.0
        }
    });
    let km = k[m - 1];
    let mut pairs = Vec::with_capacity(n);
    let mut e = vec![0.0; n];
    e[m] = 1.0;
    pairs.push(real_pair(-big_k, &e));
    for i in 0..m - 1 {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v[m - 1] = -k[i] / km;
        pairs.push(real_pair(0.0, &v));
    }
    let mut last = vec![0.0; n];
    last[m - 1] = big_k / km;
    last[m] = 1.0;
    pairs.push(real_pair(0.0, &last));
    Ok((CompartmentalModel::from_matrix(a)?, closed_form(pairs)))
}

/// Six-compartment mamillary example with outflows `X1 -> O` (`k1`),
/// `X2 -> O` (`k2`) and a mother compartment `X6` feeding `X3, X4, X5`
/// at rates `k3, k4, k5`.
pub fn mamillary_mixed_example(k: &[f64]) -> Result<(CompartmentalModel, EigenSystem)> {
    if k.len() != 5 {
        return Err(Error::DimensionMismatch { expected: 5, found: k.len() });
    }
    check_positive("k", k)?;
    check_robust(&[c(-k[0]), c(-k[1])])?;
    let big_k = k[2] + k[3] + k[4];
    let mut a = Matrix::<f64>::zeros(6, 6);
    a[(0, 0)] = -k[0];
    a[(1, 1)] = -k[1];
    a[(2, 5)] = k[2];
    a[(3, 5)] = k[3];
    a[(4, 5)] = k[4];
    a[(5, 5)] = -big_k;
    let pairs = vec![
        real_pair(-k[0], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        real_pair(-k[1], &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
        real_pair(-big_k, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        real_pair(0.0, &[0.0, 0.0, 1.0, 0.0, 0.0, k[2] / big_k]),
        real_pair(0.0, &[0.0, 0.0, 1.0, 0.0, -k[2] / k[4], 0.0]),
        real_pair(0.0, &[0.0, 0.0, 1.0, -k[2] / k[3], 0.0, 0.0]),
    ];
    Ok((CompartmentalModel::from_matrix(a)?, closed_form(pairs)))
}

/// Simplicial system: `X_i -> X_j` at rate `c_{(j-i) mod M}` and outflow
/// `d` from every compartment, so that `A^T` is circulant with first row
/// `(c_0, c_1, ..., c_{M-1})`, `c_0 = -(sum c + d)`.
///
/// Eigenvalues are `lambda_k = sum_m c_m eps_k^m` with eigenvectors
/// `(1, eps_k, ..., eps_k^{M-1})`, `eps_k = exp(2 pi i k / M)`. When `c` is
/// symmetric (`c_m = c_{M-m}`) the conjugate eigenvalues coincide and the
/// eigenspace is given by a real basis instead.
pub fn circulant_simplicial(cs: &[f64], d: f64) -> Result<(CompartmentalModel, EigenSystem)> {
    let m = cs.len() + 1;
    if m < 2 {
        return Err(Error::InvalidParameter("at least two compartments".to_string()));
    }
    check_nonnegative("c", cs)?;
    check_nonnegative("d", &[d])?;
    let mut coef = vec![0.0; m];
    coef[0] = -(cs.iter().sum::<f64>() + d);
    coef[1..].copy_from_slice(cs);
    // A^T[i][j] = c_{(j - i) mod M}, so A[i][j] = c_{(i - j) mod M}.
    let a = Matrix::from_fn(m, m, |i, j| coef[(i + m - j) % m]);

    let eps = |k: usize, p: usize| {
        let theta = 2.0 * PI * ((k * p) % m) as f64 / m as f64;
        C64::new(theta.cos(), theta.sin())
    };
    let lambda = |k: usize| (0..m).fold(C64::new(0.0, 0.0), |acc, p| acc + coef[p] * eps(k, p));
    let symmetric = (1..m).all(|p| cs[p - 1] == cs[m - p - 1]);

    let mut pairs = Vec::with_capacity(m);
    pairs.push(EigenPair::new(c(lambda(0).re), vec![c(1.0); m]));
    if symmetric {
        if m == 3 {
            let l = c(lambda(1).re);
            pairs.push(EigenPair::new(l, vec![c(-1.0), c(0.0), c(1.0)]));
            pairs.push(EigenPair::new(l, vec![c(-1.0), c(1.0), c(0.0)]));
        } else {
            for k in 1..=m / 2 {
                let l = c(lambda(k).re);
                let re: Vec<C64> = (0..m).map(|p| c(eps(k, p).re)).collect();
                pairs.push(EigenPair::new(l, re));
                if 2 * k != m {
                    let im: Vec<f64> = (0..m).map(|p| eps(k, p).im).collect();
                    let top = im.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
                    pairs.push(EigenPair::new(l, im.iter().map(|x| c(x / top)).collect()));
                }
            }
        }
    } else {
        for k in 1..m {
            let v: Vec<C64> = (0..m).map(|p| eps(k, p)).collect();
            pairs.push(EigenPair::new(lambda(k), v));
        }
    }
    let mut sys = closed_form(pairs);
    sys.sort();
    Ok((CompartmentalModel::from_matrix(a)?, sys))
}

/// Cycle `X1 -> X2 -> ... -> XM -> X1` with rate `k_i` on the edge leaving
/// `X_i`. With `reversible`, edge `i` carries `k_i` in both directions.
pub fn cycle(k: &[f64], reversible: bool) -> Result<CompartmentalModel> {
    let m = k.len();
    let min = if reversible { 3 } else { 2 };
    if m < min {
        return Err(Error::InvalidParameter(format!("a cycle needs at least {min} compartments")));
    }
    check_positive("k", k)?;
    let mut a = Matrix::<f64>::zeros(m, m);
    for i in 0..m {
        let j = (i + 1) % m;
        a[(j, i)] += k[i];
        a[(i, i)] -= k[i];
        if reversible {
            a[(i, j)] += k[i];
            a[(j, j)] -= k[i];
        }
    }
    CompartmentalModel::from_matrix(a)
}

/// Radicand `k1^2 + (k2 - k3)^2 - 2 k1 (k2 + k3)` of the three-cycle
/// eigenvalues; the nonzero eigenvalues are real iff it is nonnegative.
pub fn three_cycle_discriminant(k1: f64, k2: f64, k3: f64) -> f64 {
    k1 * k1 + (k2 - k3) * (k2 - k3) - 2.0 * k1 * (k2 + k3)
}

/// Closed-form left eigensystem of the irreversible three-cycle: eigenvalue
/// 0 with `(1, 1, 1)` and `(-(k1 + k2 + k3) -+ sqrt(D)) / 2` with vectors
/// scaled to a trailing 1.
pub fn three_cycle_eigensystem(k: &[f64]) -> Result<(CompartmentalModel, EigenSystem)> {
    if k.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: k.len() });
    }
    let model = cycle(k, false)?;
    let (k1, k2, k3) = (k[0], k[1], k[2]);
    let dd = three_cycle_discriminant(k1, k2, k3);
    let root = if dd >= 0.0 { c(dd.sqrt()) } else { C64::new(0.0, (-dd).sqrt()) };
    let sum = k1 + k2 + k3;
    let l_minus = (c(-sum) - root) / 2.0;
    let l_plus = (c(-sum) + root) / 2.0;
    check_robust(&[c(0.0), l_minus, l_plus])?;
    let v_minus = vec![
        -(c(k1 + k2 - k3) + root) / (2.0 * k3),
        (c(-k1 + k2 - k3) + root) * k2 / (2.0 * k1 * k3),
        c(1.0),
    ];
    let v_plus = vec![
        (c(-k1 - k2 + k3) + root) / (2.0 * k3),
        -(c(k1 - k2 + k3) + root) * k2 / (2.0 * k1 * k3),
        c(1.0),
    ];
    let pairs = vec![
        EigenPair::new(c(0.0), vec![c(1.0); 3]),
        EigenPair::new(l_minus, v_minus),
        EigenPair::new(l_plus, v_plus),
    ];
    Ok((model, closed_form(pairs)))
}

/// Uniform reversible cycle of `m` compartments: a symmetric circulant with
/// `c_1 = c_{M-1} = k` and no outflow.
pub fn uniform_reversible_cycle(m: usize, k: f64) -> Result<(CompartmentalModel, EigenSystem)> {
    if m < 3 {
        return Err(Error::InvalidParameter("a reversible cycle needs at least 3 compartments".to_string()));
    }
    check_positive("k", &[k])?;
    let mut cs = vec![0.0; m - 1];
    cs[0] = k;
    cs[m - 2] = k;
    let (_, sys) = circulant_simplicial(&cs, 0.0)?;
    Ok((cycle(&vec![k; m], true)?, sys))
}

/// Result of checking a closed-form eigensystem against its matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub max_residual: f64,
    /// Index of the pair attaining the maximum.
    pub worst_pair: Option<usize>,
    pub passed: bool,
}

/// Largest relative residual `|A^T v - lambda v|_inf / (|A^T|_inf |v|_inf)`
/// over the pairs; the absolute residual when `A = 0`.
pub fn verify_closed_form(a: &Matrix<f64>, sys: &EigenSystem, tol: f64) -> Result<ResidualReport> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let mut worst = None;
    let mut max_residual: f64 = 0.0;
    for (i, p) in sys.pairs.iter().enumerate() {
        if p.vector.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: p.vector.len(),
            });
        }
        let r = left_residual(a, p.value, &p.vector);
        if worst.is_none() || r > max_residual {
            max_residual = r;
            worst = Some(i);
        }
    }
    Ok(ResidualReport {
        max_residual,
        worst_pair: worst,
        passed: max_residual <= tol,
    })
}

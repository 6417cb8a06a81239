//! Exact trajectories of `c' = Ac + b`, the lumping commuting diagram,
//! local-extrema counting and the three-cycle realness scan.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::families::{three_cycle_discriminant, three_cycle_eigensystem};
use crate::linalg::{eig_left, expm, generalized_inverse, norm_inf_vec, Matrix, Scalar, Tolerances, C64};
use crate::lumping::{build_q, is_exactly_lumpable, lump, lumped_matrix, LumpingMatrix};
use crate::model::CompartmentalModel;

/// Number of points in the default time grid.
pub const DEFAULT_STEPS: usize = 1001;

/// Sampled solution of a linear system.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T = f64> {
    pub times: Vec<f64>,
    /// `states[k]` is the state at `times[k]`.
    pub states: Vec<Vec<T>>,
    /// Largest eigenvalue modulus of the coefficient matrix.
    pub rate_scale: f64,
}

impl<T: Scalar> Trajectory<T> {
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn coordinate(&self, i: usize) -> Vec<T> {
        self.states.iter().map(|s| s[i]).collect()
    }
}

/// Largest eigenvalue modulus of `a`.
pub fn spectral_radius<T: Scalar>(a: &Matrix<T>) -> Result<f64> {
    let re = Matrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)].re());
    let im = Matrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)].im());
    let real = if im.max_abs() == 0.0 {
        re
    } else {
        // [[Re, -Im], [Im, Re]] has the eigenvalues of A and their conjugates.
        let n = a.rows();
        Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => re[(i, j)],
            (true, false) => -im[(i, j - n)],
            (false, true) => im[(i - n, j)],
            (false, false) => re[(i - n, j - n)],
        })
    };
    let sys = eig_left(&real)?;
    Ok(sys.pairs.iter().map(|p| p.value.norm()).fold(0.0, f64::max))
}

/// `DEFAULT_STEPS` uniform points on `[0, 10 / rho]`, `rho` the spectral
/// radius of `a` (or 1 when `a` is nilpotent).
pub fn default_grid<T: Scalar>(a: &Matrix<T>) -> Result<Vec<f64>> {
    let rho = spectral_radius(a)?;
    let end = if rho > 0.0 { 10.0 / rho } else { 10.0 };
    Ok(uniform_grid(0.0, end, DEFAULT_STEPS))
}

pub fn uniform_grid(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..steps)
            .map(|k| t0 + (t1 - t0) * k as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Exact flow of `x' = Ax + b` sampled at `times`, via the exponential of
/// the augmented matrix `[[A, b], [0, 0]]`.
pub fn simulate_matrix<T: Scalar>(a: &Matrix<T>, b: &[T], x0: &[T], times: &[f64]) -> Result<Trajectory<T>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    for len in [b.len(), x0.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("times"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter("times must be nonnegative and increasing".into()));
    }
    let aug = Matrix::from_fn(n + 1, n + 1, |i, j| {
        if i == n {
            T::zero()
        } else if j == n {
            b[i]
        } else {
            a[(i, j)]
        }
    });
    let mut cache: Option<(f64, Matrix<T>)> = None;
    let mut step = |x: &[T], dt: f64| -> Result<Vec<T>> {
        if dt == 0.0 {
            return Ok(x.to_vec());
        }
        let fresh = match &cache {
            Some((h, _)) => (h - dt).abs() > 1e-14 * dt,
            None => true,
        };
        if fresh {
            cache = Some((dt, expm(&aug.scale(T::from_real(dt)))?));
        }
        let e = &cache.as_ref().unwrap().1;
        Ok((0..n)
            .map(|i| (0..n).fold(e[(i, n)], |s, j| s + e[(i, j)] * x[j]))
            .collect())
    };

    let mut states = Vec::with_capacity(times.len());
    let mut x = x0.to_vec();
    let mut t = 0.0;
    for &tk in times {
        x = step(&x, tk - t)?;
        t = tk;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow);
        }
        states.push(x.clone());
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        rate_scale: spectral_radius(a)?,
    })
}

pub fn simulate(model: &CompartmentalModel, x0: &[f64], times: &[f64]) -> Result<Trajectory> {
    simulate_matrix(model.a(), model.b(), x0, times)
}

/// `max_t |Q x(t) - xhat(t)|_inf` where `xhat` follows `Ahat = Q A Qbar` from
/// `Q x0`. No exactness check: a non-lumpable `Q` gives a growing deviation.
pub fn commutation_deviation(
    model: &CompartmentalModel,
    q: &Matrix<C64>,
    qbar: &Matrix<C64>,
    x0: &[f64],
    times: &[f64],
) -> Result<f64> {
    let a_hat = lumped_matrix(model.a(), q, qbar)?;
    let to_c = |v: &[f64]| v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>();
    let b_hat = q.mul_vec(&to_c(model.b()))?;
    let xh0 = q.mul_vec(&to_c(x0))?;
    let full = simulate(model, x0, times)?;
    let lumped = simulate_matrix(&a_hat, &b_hat, &xh0, times)?;
    let mut worst: f64 = 0.0;
    for (x, xh) in full.states.iter().zip(&lumped.states) {
        let qx = q.mul_vec(&to_c(x))?;
        let diff: Vec<C64> = qx.iter().zip(xh).map(|(a, b)| a - b).collect();
        worst = worst.max(norm_inf_vec(&diff));
    }
    Ok(worst)
}

/// Commuting-diagram deviation for an exact lumping; `NotLumpable` otherwise.
pub fn verify_commutation(
    model: &CompartmentalModel,
    q: &LumpingMatrix,
    x0: &[f64],
    times: &[f64],
    tol: &Tolerances,
) -> Result<f64> {
    let lumped = lump(model, q, tol)?;
    commutation_deviation(model, q.matrix(), &lumped.qbar.qbar, x0, times)
}

/// Another right inverse `Qbar + (I - Qbar Q) Z` of `Q`.
pub fn shifted_right_inverse(q: &Matrix<C64>, qbar: &Matrix<C64>, z: &Matrix<C64>) -> Result<Matrix<C64>> {
    let n = q.cols();
    let proj = Matrix::identity(n).sub(&qbar.matmul(q)?)?;
    qbar.add(&proj.matmul(z)?)
}

/// Number of sign changes of the discrete derivative of coordinate `i`,
/// ignoring steps with `|dx| <= 1e-12 * max(1, max|x|)`.
pub fn count_local_extrema(traj: &Trajectory, i: usize) -> Result<usize> {
    let n = traj.dim();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    if traj.rate_scale > 0.0 {
        let limit = 0.01 / traj.rate_scale;
        let step = traj.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        if step > limit * (1.0 + 1e-9) {
            return Err(Error::GridTooCoarse { step, limit });
        }
    }
    let x = traj.coordinate(i);
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let plateau = 1e-12 * scale;
    let mut last = 0i8;
    let mut count = 0;
    for w in x.windows(2) {
        let d = w[1] - w[0];
        if d.abs() <= plateau {
            continue;
        }
        let s = if d > 0.0 { 1 } else { -1 };
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    Ok(count)
}

/// One cell of the three-cycle realness map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionCell {
    pub k2: f64,
    pub k3: f64,
    pub discriminant: f64,
    pub real: bool,
}

/// Labels a `steps x steps` grid of `(k2, k3)` by the sign of the
/// three-cycle discriminant. Row-major in `k2`, then `k3`.
pub fn region_scan(k1: f64, k2_range: (f64, f64), k3_range: (f64, f64), steps: usize) -> Result<Vec<RegionCell>> {
    let finite = [k1, k2_range.0, k2_range.1, k3_range.0, k3_range.1];
    if finite.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("region bounds"));
    }
    if k1 <= 0.0 || k2_range.0 < 0.0 || k3_range.0 < 0.0 || k2_range.1 < k2_range.0 || k3_range.1 < k3_range.0 {
        return Err(Error::InvalidParameter("region bounds must be nonnegative and ordered".into()));
    }
    let k2s = uniform_grid(k2_range.0, k2_range.1, steps);
    let k3s = uniform_grid(k3_range.0, k3_range.1, steps);
    let mut out = Vec::with_capacity(steps * steps);
    for &k2 in &k2s {
        for &k3 in &k3s {
            let d = three_cycle_discriminant(k1, k2, k3);
            out.push(RegionCell {
                k2,
                k3,
                discriminant: d,
                real: d >= 0.0,
            });
        }
    }
    Ok(out)
}

/// `max |Im Ahat|` for the three-cycle lumped with the zero eigenvector and
/// the eigenvector of `(-(k1+k2+k3) - sqrt(D)) / 2`.
pub fn three_cycle_lumped_imag(k: &[f64], tol: &Tolerances) -> Result<f64> {
    let (model, sys) = three_cycle_eigensystem(k)?;
    let q = build_q(&sys, &[0, 1])?;
    if !is_exactly_lumpable(model.a(), q.matrix(), tol.residual) {
        let g = generalized_inverse(q.matrix(), tol.rank)?;
        let a_hat = lumped_matrix(model.a(), q.matrix(), &g.qbar)?;
        return Err(Error::NotLumpable(
            crate::lumping::exactness_residual(model.a(), q.matrix(), &a_hat)?,
        ));
    }
    Ok(lump(&model, &q, tol)?.a_hat.max_imag())
}

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Infeasibility, RealizabilityCertificate};
use crate::error::{Error, Result};
use crate::linalg::{complex_rank, det, norm2_vec, rank_and_nullspace, Lu, Matrix, Tolerances, C64};

const DET_FLOOR: f64 = 1e-9;

/// Options for the randomized search in [`exists_real_p`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealSearch {
    pub seed: u64,
    pub max_draws: usize,
}

impl Default for RealSearch {
    fn default() -> Self {
        Self { seed: 0, max_draws: 64 }
    }
}

/// Coefficients of `Im(row . Q) = 0` in the unknowns `(p, q)` of one row
/// `p + iq` of `P`: row `k` is `[Im Q[.,k], Re Q[.,k]]`.
pub fn build_real_coefficient_matrix(q: &Matrix<C64>) -> Matrix<f64> {
    let m = q.rows();
    Matrix::from_fn(q.cols(), 2 * m, |k, j| if j < m { q[(j, k)].im } else { q[(j - m, k)].re })
}

/// `P = p + i q` entrywise.
pub fn p_from_parts(p: &Matrix<f64>, q: &Matrix<f64>) -> Result<Matrix<C64>> {
    if p.rows() != q.rows() || p.cols() != q.cols() {
        return Err(Error::DimensionMismatch {
            expected: p.rows() * p.cols(),
            found: q.rows() * q.cols(),
        });
    }
    Ok(Matrix::from_fn(p.rows(), p.cols(), |i, j| C64::new(p[(i, j)], q[(i, j)])))
}

/// `(PQ, det P)`.
pub fn real_witness_product(q: &Matrix<C64>, p: &Matrix<C64>) -> Result<(Matrix<C64>, C64)> {
    let pq = p.matmul(q)?;
    Ok((pq, det(p)?))
}

fn normalized_det(p: &Matrix<C64>) -> f64 {
    let mut scaled = p.clone();
    for i in 0..p.rows() {
        let n = norm2_vec(p.row(i));
        if n == 0.0 {
            return 0.0;
        }
        for z in scaled.row_mut(i) {
            *z /= n;
        }
    }
    det(&scaled).map(|d| d.norm()).unwrap_or(0.0)
}

fn commuting_square_case(q: &Matrix<C64>, tol: &Tolerances) -> Option<Matrix<C64>> {
    let q1 = q.real_part();
    let q2 = q.imag_part();
    let nonsingular = |m: &Matrix<f64>| Lu::new(m).map(|lu| !lu.is_singular()).unwrap_or(false) && normalized_det(&m.to_complex()) > DET_FLOOR;
    if !nonsingular(&q1) || !nonsingular(&q2) {
        return None;
    }
    let lhs = q1.transpose().matmul(&q2).ok()?;
    let rhs = q2.transpose().matmul(&q1).ok()?;
    let scale = q.max_abs().powi(2).max(1.0);
    if lhs.sub(&rhs).ok()?.max_abs() > tol.residual * scale {
        return None;
    }
    Some(q.adjoint())
}

/// Decides whether a nonsingular complex `P` with real `PQ` exists.
///
/// Each row of `P` must lie in the real kernel of
/// [`build_real_coefficient_matrix`]. Rows are drawn as random combinations
/// of a kernel basis until one draw is nonsingular.
pub fn exists_real_p(q: &Matrix<C64>, search: &RealSearch, tol: &Tolerances) -> Result<RealizabilityCertificate> {
    if !q.is_finite() {
        return Err(Error::NonFinite("Q"));
    }
    let m = q.rows();
    if m == 0 || q.cols() == 0 {
        return Err(Error::InvalidParameter(String::from("Q must be nonempty")));
    }
    let r = complex_rank(q, tol.rank);
    if r < m {
        return Err(Error::RankDeficient { rank: r, expected: m });
    }
    if q.max_imag() <= tol.sign * q.max_abs() {
        return Ok(RealizabilityCertificate::feasible(Matrix::identity(m)));
    }
    if q.is_square() {
        if let Some(p) = commuting_square_case(q, tol) {
            return Ok(RealizabilityCertificate::feasible(p));
        }
    }

    let coeff = build_real_coefficient_matrix(q);
    let (_, kernel) = rank_and_nullspace(&coeff, tol.rank);
    let d = kernel.cols();
    if d == 0 {
        return Ok(RealizabilityCertificate::infeasible(
            Infeasibility::InsufficientNullspace,
            Vec::new(),
            Vec::new(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    for _ in 0..search.max_draws {
        let mut p = Matrix::zeros(m, m);
        for i in 0..m {
            let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let v = kernel.mul_vec(&c)?;
            let n = norm2_vec(&v);
            if n == 0.0 {
                continue;
            }
            for j in 0..m {
                p[(i, j)] = C64::new(v[j] / n, v[m + j] / n);
            }
        }
        if normalized_det(&p) > DET_FLOOR {
            return Ok(RealizabilityCertificate::feasible(p));
        }
    }
    Ok(RealizabilityCertificate::infeasible(
        Infeasibility::InsufficientNullspace,
        Vec::new(),
        Vec::new(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(a: f64, b: f64) -> C64 {
        C64::new(a, b)
    }

    fn appendix_q() -> Matrix<C64> {
        Matrix::from_rows(&[
            [z(1.0, 1.0), z(2.0, 1.0), z(4.0, 2.0), z(2.0, 2.0)],
            [z(-1.0, 0.0), z(0.0, 2.0), z(0.0, 4.0), z(-2.0, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn coefficient_matrix_matches_printed() {
        let c = build_real_coefficient_matrix(&appendix_q());
        let expect = Matrix::from_rows(&[
            [1.0, 0.0, 1.0, -1.0],
            [1.0, 2.0, 2.0, 0.0],
            [2.0, 4.0, 4.0, 0.0],
            [2.0, 0.0, 2.0, -2.0],
        ])
        .unwrap();
        assert_eq!(c, expect);
    }

    #[test]
    fn printed_picks_give_real_product() {
        let p = Matrix::from_rows(&[[0.0, 1.0], [2.0, 2.0]]).unwrap();
        let q = Matrix::from_rows(&[[-1.0, -1.0], [-3.0, -1.0]]).unwrap();
        let pc = p_from_parts(&p, &q).unwrap();
        let (pq, d) = real_witness_product(&appendix_q(), &pc).unwrap();
        let expect = Matrix::from_rows(&[[0.0, 3.0, 6.0, 0.0], [3.0, 9.0, 18.0, 6.0]]).unwrap();
        assert!(pq.sub(&expect.to_complex()).unwrap().max_abs() < 1e-14);
        assert!(d.norm() > 0.5);
    }

    #[test]
    fn search_finds_witness() {
        let q = appendix_q();
        let c = exists_real_p(&q, &RealSearch::default(), &Tolerances::default()).unwrap();
        assert!(c.feasible);
        let (pq, d) = real_witness_product(&q, c.witness_p.as_ref().unwrap()).unwrap();
        assert!(pq.max_imag() < 1e-10);
        assert!(d.norm() > 1e-9);
    }

    #[test]
    fn same_seed_same_witness() {
        let q = appendix_q();
        let s = RealSearch { seed: 7, max_draws: 64 };
        let a = exists_real_p(&q, &s, &Tolerances::default()).unwrap();
        let b = exists_real_p(&q, &s, &Tolerances::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generic_complex_row_is_infeasible() {
        let q = Matrix::from_rows(&[[z(1.0, 0.0), z(0.0, 1.0), z(1.0, 1.0)]]).unwrap();
        let c = exists_real_p(&q, &RealSearch::default(), &Tolerances::default()).unwrap();
        assert!(!c.feasible);
    }

    #[test]
    fn imaginary_identity_uses_kernel() {
        let q = Matrix::from_rows(&[[z(0.0, 1.0), z(0.0, 0.0)], [z(0.0, 0.0), z(0.0, 1.0)]]).unwrap();
        let c = exists_real_p(&q, &RealSearch::default(), &Tolerances::default()).unwrap();
        assert!(c.feasible);
        let (pq, _) = real_witness_product(&q, c.witness_p.as_ref().unwrap()).unwrap();
        assert!(pq.max_imag() < 1e-12);
    }
}

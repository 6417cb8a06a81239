//! Dense linear algebra used throughout the crate: matrices over `f64` and
//! complex doubles, LU, Jacobi SVD, the real nonsymmetric eigenproblem and the
//! matrix exponential.

mod eigen;
mod expm;
mod hqr;
mod lu;
mod matrix;
mod scalar;
pub mod svd;

pub use eigen::{
    eig_left, left_residual, normalize_max_entry, spectrum_distance, EigenPair, EigenSource, EigenSystem,
};
pub use expm::{affine_flow, expm};
pub use lu::{det, inverse, Lu};
pub use matrix::{norm2_vec, norm_inf_vec, Matrix};
pub use scalar::{Scalar, C64};
pub use svd::{complex_rank, normalize_rows, rank, rank_and_nullspace, row_normalized_rank, svd, Svd};

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Numerical thresholds shared by the lumping, realizer and dynamics code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Residual bound for `QA = AhatQ`, `QQbar = I` and eigenpairs.
    pub residual: f64,
    /// Singular values below `rank * sigma_max` count as zero.
    pub rank: f64,
    /// Entries with modulus below `sign * scale` count as zero when reading signs.
    pub sign: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-10,
            rank: 1e-12,
            sign: 1e-12,
        }
    }
}

impl Tolerances {
    /// Same thresholds with a different residual bound.
    pub fn with_residual(residual: f64) -> Self {
        Self {
            residual,
            ..Self::default()
        }
    }
}

/// Moore-Penrose right inverse `Qbar` of a full-row-rank `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedInverse<T: Scalar> {
    pub qbar: Matrix<T>,
    /// `|Q Qbar - I|_inf`.
    pub residual: f64,
}

pub fn generalized_inverse<T: Scalar>(q: &Matrix<T>, rank_tol: f64) -> Result<GeneralizedInverse<T>> {
    let m = q.rows();
    if m == 0 {
        return Err(Error::RankDeficient { rank: 0, expected: 0 });
    }
    // Q^* V = W with W^* W = diag(sigma^2), so Q = V W^* and Q^+ = W diag(sigma^-2) V^*.
    let s = svd::svd(&q.adjoint());
    let smax = s.sigma[0];
    let r = s.sigma.iter().filter(|&&x| x > rank_tol * smax).count();
    if smax == 0.0 || r < m {
        return Err(Error::RankDeficient { rank: r, expected: m });
    }
    let inv_sq: Vec<T> = s.sigma.iter().map(|x| T::from_real(1.0 / (x * x))).collect();
    let scaled = Matrix::from_fn(s.w.rows(), m, |i, j| s.w[(i, j)] * inv_sq[j]);
    let qbar = scaled.matmul(&s.v.adjoint())?;
    let residual = q.matmul(&qbar)?.sub(&Matrix::identity(m))?.norm_inf();
    Ok(GeneralizedInverse { qbar, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_inverse_of_wide_matrix() {
        let q = Matrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 1.0, 2.0]]).unwrap();
        let g = generalized_inverse(&q, 1e-12).unwrap();
        assert!(g.residual < 1e-14);
        // min-norm: Qbar = Q^T (Q Q^T)^{-1}
        let qqt = q.matmul(&q.transpose()).unwrap();
        let expect = q.transpose().matmul(&inverse(&qqt).unwrap()).unwrap();
        assert!(g.qbar.sub(&expect).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn dependent_rows_rejected() {
        let q = Matrix::from_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]]).unwrap();
        assert!(matches!(
            generalized_inverse(&q, 1e-12),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn complex_rows() {
        let z = |a: f64, b: f64| C64::new(a, b);
        let q = Matrix::from_rows(&[[z(0.0, -1.0), z(1.0, -1.0)], [z(2.0, -3.0), z(2.0, -1.0)]]).unwrap();
        let g = generalized_inverse(&q, 1e-12).unwrap();
        assert!(g.residual < 1e-14);
    }
}

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use super::lu::Lu;
use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix"));
    }
    let n = a.rows();
    let norm = a.norm_one();
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(T::from_real(0.5f64.powi(s)));
    let id = Matrix::<T>::identity(n);
    let b = |k: usize| T::from_real(PADE13[k]);

    let a2 = a.matmul(&a)?;
    let a4 = a2.matmul(&a2)?;
    let a6 = a4.matmul(&a2)?;

    let inner_u = a6.scale(b(13)).add(&a4.scale(b(11)))?.add(&a2.scale(b(9)))?;
    let u = a6
        .matmul(&inner_u)?
        .add(&a6.scale(b(7)))?
        .add(&a4.scale(b(5)))?
        .add(&a2.scale(b(3)))?
        .add(&id.scale(b(1)))?;
    let u = a.matmul(&u)?;
    let inner_v = a6.scale(b(12)).add(&a4.scale(b(10)))?.add(&a2.scale(b(8)))?;
    let v = a6
        .matmul(&inner_v)?
        .add(&a6.scale(b(6)))?
        .add(&a4.scale(b(4)))?
        .add(&a2.scale(b(2)))?
        .add(&id.scale(b(0)))?;

    let p = v.add(&u)?;
    let q = v.sub(&u)?;
    let mut x = Lu::new(&q)?.solve(&p)?;
    for _ in 0..s {
        x = x.matmul(&x)?;
        if !x.is_finite() {
            return Err(Error::Overflow);
        }
    }
    if !x.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(x)
}

/// State at time `t` of `c' = A c + b` from `c0`, using the augmented
/// matrix `[[A, b], [0, 0]]`.
pub fn affine_flow(a: &Matrix<f64>, b: &[f64], c0: &[f64], t: f64) -> Result<Vec<f64>> {
    let n = a.rows();
    if b.len() != n || c0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if b.len() != n { b.len() } else { c0.len() },
        });
    }
    let aug = Matrix::from_fn(n + 1, n + 1, |i, j| {
        if i == n {
            0.0
        } else if j == n {
            b[i] * t
        } else {
            a[(i, j)] * t
        }
    });
    let e = expm(&aug)?;
    let mut x0 = c0.to_vec();
    x0.push(1.0);
    let mut out = e.mul_vec(&x0)?;
    out.truncate(n);
    Ok(out)
}

//! Exact linear lumping `c_hat = Q c` of `c' = A c + b`.
//!
//! `Q` lumps exactly iff its row space is invariant under `A^T`, i.e. every
//! row of `QA` is a combination of rows of `Q`. Then `c_hat' = A_hat c_hat +
//! Q b` with `A_hat = Q A Qbar` for any right inverse `Qbar`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{
    det, generalized_inverse, svd, EigenSystem, GeneralizedInverse, Matrix, Scalar, Tolerances, C64,
};
use crate::model::{default_labels, validate_kinetic_complex, CompartmentalModel, KineticReport};

/// How a lumping matrix was obtained.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    /// Indices into the eigensystem the rows were taken from.
    pub selection: Option<Vec<usize>>,
    /// Basis change applied on the left, if any.
    pub basis: Option<Matrix<C64>>,
}

/// Full-row-rank `n_hat x n` lumping matrix, real or complex.
#[derive(Clone, Debug, PartialEq)]
pub struct LumpingMatrix {
    q: Matrix<C64>,
    provenance: Provenance,
}

impl LumpingMatrix {
    /// Checks `rank(Q) = n_hat < n`.
    pub fn new(q: Matrix<C64>) -> Result<Self> {
        if q.rows() >= q.cols() {
            return Err(Error::TooManyRows {
                rows: q.rows(),
                states: q.cols(),
            });
        }
        Self::full_rank(q)
    }

    pub fn from_real(q: &Matrix<f64>) -> Result<Self> {
        Self::new(q.to_complex())
    }

    /// The identity as a lumping matrix; only useful as a diagnostic.
    pub fn identity(n: usize) -> Self {
        Self {
            q: Matrix::identity(n),
            provenance: Provenance::default(),
        }
    }

    /// Square nonsingular `Q` (diagnostic use, `n_hat = n`).
    pub fn square(q: Matrix<C64>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::DimensionMismatch {
                expected: q.rows(),
                found: q.cols(),
            });
        }
        Self::full_rank(q)
    }

    fn full_rank(q: Matrix<C64>) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::NonFinite("Q"));
        }
        let r = svd::row_normalized_rank(&q, Tolerances::default().rank);
        if r < q.rows() {
            return Err(Error::RankDeficient {
                rank: r,
                expected: q.rows(),
            });
        }
        Ok(Self {
            q,
            provenance: Provenance::default(),
        })
    }

    pub fn matrix(&self) -> &Matrix<C64> {
        &self.q
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn rows(&self) -> usize {
        self.q.rows()
    }

    pub fn cols(&self) -> usize {
        self.q.cols()
    }

    /// Whether every imaginary part is at most `tol` times the largest entry.
    pub fn is_real(&self, tol: f64) -> bool {
        self.q.max_imag() <= tol * self.q.max_abs().max(1.0)
    }

    pub fn real_part(&self) -> Matrix<f64> {
        self.q.real_part()
    }
}

/// Stacks the selected left eigenvectors as rows, in selection order.
pub fn build_q(sys: &EigenSystem, selection: &[usize]) -> Result<LumpingMatrix> {
    let n = sys.dim();
    for &i in selection {
        if i >= sys.pairs.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: sys.pairs.len(),
            });
        }
    }
    if selection.len() >= n {
        return Err(Error::TooManyRows {
            rows: selection.len(),
            states: n,
        });
    }
    let q = Matrix::from_fn(selection.len(), n, |i, j| sys.pairs[selection[i]].vector[j]);
    let r = svd::row_normalized_rank(&q, 1e-10);
    if r < selection.len() {
        return Err(Error::DependentSelection {
            rank: r,
            selected: selection.len(),
        });
    }
    Ok(LumpingMatrix {
        q,
        provenance: Provenance {
            selection: Some(selection.to_vec()),
            basis: None,
        },
    })
}

/// `rank([Q; QA]) = rank(Q)` with rows scaled to unit length and singular
/// values below `tol * sigma_max` treated as zero.
pub fn is_exactly_lumpable<T: Scalar>(a: &Matrix<f64>, q: &Matrix<T>, tol: f64) -> bool {
    if q.cols() != a.rows() || !a.is_square() {
        return false;
    }
    let qc = svd::normalize_rows(&q.to_complex());
    let mut qa = match qc.matmul(&a.to_complex()) {
        Ok(m) => m,
        Err(_) => return false,
    };
    let scale = a.norm_inf();
    if scale > 0.0 {
        qa = qa.map(|z| z / scale);
    }
    let stacked = match qc.vstack(&qa) {
        Ok(m) => m,
        Err(_) => return false,
    };
    svd::rank(&stacked, tol) == svd::rank(&qc, tol)
}

/// `Q A Qbar` for a given right inverse.
pub fn lumped_matrix(a: &Matrix<f64>, q: &Matrix<C64>, qbar: &Matrix<C64>) -> Result<Matrix<C64>> {
    q.matmul(&a.to_complex())?.matmul(qbar)
}

/// `|QA - A_hat Q|_inf`.
pub fn exactness_residual(a: &Matrix<f64>, q: &Matrix<C64>, a_hat: &Matrix<C64>) -> Result<f64> {
    let qa = q.matmul(&a.to_complex())?;
    Ok(qa.sub(&a_hat.matmul(q)?)?.norm_inf())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LumpedModel {
    pub a_hat: Matrix<C64>,
    pub b_hat: Vec<C64>,
    pub q: LumpingMatrix,
    pub qbar: GeneralizedInverse<C64>,
    pub exactness_residual: f64,
    pub kinetic: KineticReport,
}

impl LumpedModel {
    pub fn dim(&self) -> usize {
        self.a_hat.rows()
    }

    /// Whether `A_hat` and `b_hat` are real up to `tol` relative to their size.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.a_hat.max_abs().max(1.0);
        self.a_hat.max_imag() <= tol * scale && self.b_hat.iter().all(|z| z.im.abs() <= tol * scale)
    }

    /// The lumped system as a model over `Xhat1..`, when it is real.
    pub fn to_real_model(&self, tol: f64) -> Option<CompartmentalModel> {
        if !self.is_real(tol) {
            return None;
        }
        CompartmentalModel::new(
            default_labels("Xhat", self.dim()),
            self.a_hat.real_part(),
            self.b_hat.iter().map(|z| z.re).collect(),
            alloc::vec![1; self.dim()],
        )
        .ok()
    }
}

/// Lumps `model` with `q`: `A_hat = Q A Qbar` with the minimum-norm right
/// inverse, `b_hat = Q b`, and the kinetic report of the result.
pub fn lump(model: &CompartmentalModel, q: &LumpingMatrix, tol: &Tolerances) -> Result<LumpedModel> {
    let a = model.a();
    if q.cols() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: q.cols(),
        });
    }
    let qm = q.matrix();
    let qbar = generalized_inverse(qm, tol.rank)?;
    let a_hat = lumped_matrix(a, qm, &qbar.qbar)?;
    let residual = exactness_residual(a, qm, &a_hat)?;
    if !is_exactly_lumpable(a, qm, tol.residual) {
        return Err(Error::NotLumpable(residual));
    }
    let b: Vec<C64> = model.b().iter().map(|&x| C64::new(x, 0.0)).collect();
    let b_hat = qm.mul_vec(&b)?;
    let kinetic = validate_kinetic_complex(&a_hat, &b_hat, tol.residual);
    Ok(LumpedModel {
        a_hat,
        b_hat,
        q: q.clone(),
        qbar,
        exactness_residual: residual,
        kinetic,
    })
}

/// `P Q` for nonsingular `P`, recording `P` in the provenance.
pub fn transform_basis(q: &LumpingMatrix, p: &Matrix<C64>, tol: f64) -> Result<LumpingMatrix> {
    if !p.is_square() || p.rows() != q.rows() {
        return Err(Error::DimensionMismatch {
            expected: q.rows(),
            found: p.rows(),
        });
    }
    let d = det(p)?;
    if d.norm() <= tol {
        return Err(Error::SingularP);
    }
    let pq = p.matmul(q.matrix())?;
    let basis = match &q.provenance.basis {
        Some(prev) => p.matmul(prev)?,
        None => p.clone(),
    };
    Ok(LumpingMatrix {
        q: pq,
        provenance: Provenance {
            selection: q.provenance.selection.clone(),
            basis: Some(basis),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasResult {
    pub has_nonneg_geninverse: bool,
    /// A row whose every positive column also has a positive entry in
    /// another row.
    pub witness_row: Option<usize>,
}

/// Decides whether a nonnegative `Q` has a nonnegative right inverse: it
/// does iff every row owns a column in which it is the only positive entry.
/// Entries at most `tol * max|Q|` count as zero.
pub fn farkas_row_test(q: &Matrix<f64>, tol: f64) -> Result<FarkasResult> {
    if !q.is_finite() {
        return Err(Error::NonFinite("Q"));
    }
    let eps = tol * q.max_abs();
    if q.as_slice().iter().any(|&x| x < -eps) {
        return Err(Error::NegativeEntries);
    }
    let pos = |i: usize, j: usize| q[(i, j)] > eps;
    for r in 0..q.rows() {
        let owns = (0..q.cols()).any(|j| pos(r, j) && (0..q.rows()).all(|s| s == r || !pos(s, j)));
        if !owns {
            return Ok(FarkasResult {
                has_nonneg_geninverse: false,
                witness_row: Some(r),
            });
        }
    }
    Ok(FarkasResult {
        has_nonneg_geninverse: true,
        witness_row: None,
    })
}

/// A nonnegative right inverse built from the private columns found by
/// [`farkas_row_test`], if one exists.
pub fn nonneg_right_inverse(q: &Matrix<f64>, tol: f64) -> Result<Option<Matrix<f64>>> {
    let res = farkas_row_test(q, tol)?;
    if !res.has_nonneg_geninverse {
        return Ok(None);
    }
    let eps = tol * q.max_abs();
    let pos = |i: usize, j: usize| q[(i, j)] > eps;
    let mut g = Matrix::<f64>::zeros(q.cols(), q.rows());
    for r in 0..q.rows() {
        let j = (0..q.cols())
            .find(|&j| pos(r, j) && (0..q.rows()).all(|s| s == r || !pos(s, j)))
            .ok_or_else(|| Error::InvalidParameter(format!("row {r} owns no column")))?;
        g[(j, r)] = 1.0 / q[(r, j)];
    }
    Ok(Some(g))
}

/// Kinetic report of the lumped system.
pub fn kinetic_after_lumping(model: &CompartmentalModel, q: &LumpingMatrix, tol: &Tolerances) -> Result<KineticReport> {
    Ok(lump(model, q, tol)?.kinetic)
}

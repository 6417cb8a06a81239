#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use super::{Infeasibility, RealizabilityCertificate};
use crate::error::{Error, Result};
use crate::linalg::{rank, Matrix, Tolerances, C64};
use crate::model::Coefficient;

const ANGLE_EPS: f64 = 1e-12;

/// Sign pattern of one two-entry column, numbered 1 to 9:
/// `(0,0) (0,-) (+,-) (+,0) (+,+) (0,+) (-,+) (-,0) (-,-)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignCase(u8);

impl SignCase {
    pub fn number(self) -> u8 {
        self.0
    }

    pub fn from_number(n: u8) -> Option<Self> {
        (1..=9).contains(&n).then_some(SignCase(n))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 1
    }
}

/// Sign case of the column `(a, b)`; entries with modulus `<= zero` count as 0.
pub fn classify_pair(a: f64, b: f64, zero: f64) -> SignCase {
    let s = |x: f64| {
        if x.abs() <= zero {
            0
        } else if x > 0.0 {
            1
        } else {
            -1
        }
    };
    let n = match (s(a), s(b)) {
        (0, 0) => 1,
        (0, -1) => 2,
        (1, -1) => 3,
        (1, 0) => 4,
        (1, 1) => 5,
        (0, 1) => 6,
        (-1, 1) => 7,
        (-1, 0) => 8,
        _ => 9,
    };
    SignCase(n)
}

/// Per-column sign cases of a two-row matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPattern {
    pub cases: Vec<SignCase>,
}

impl SignPattern {
    pub fn contains(&self, n: u8) -> bool {
        self.cases.iter().any(|c| c.0 == n)
    }

    /// Sorted distinct case numbers, e.g. `"3459"`.
    pub fn code(&self) -> String {
        pattern_code(&self.cases)
    }
}

pub(crate) fn pattern_code(cases: &[SignCase]) -> String {
    let mut n: Vec<u8> = cases.iter().map(|c| c.0).collect();
    n.sort_unstable();
    n.dedup();
    n.iter().map(|d| format!("{d}")).collect()
}

fn zero_threshold(q: &Matrix<f64>, tol: &Tolerances) -> f64 {
    tol.sign * q.max_abs()
}

pub fn classify_columns(q: &Matrix<f64>, tol: &Tolerances) -> Result<SignPattern> {
    if q.rows() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: q.rows(),
        });
    }
    let z = zero_threshold(q, tol);
    Ok(SignPattern {
        cases: (0..q.cols()).map(|j| classify_pair(q[(0, j)], q[(1, j)], z)).collect(),
    })
}

/// Set of row vectors `p` with `p . q_j >= 0` for every column `q_j`.
/// Angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConeRegion {
    /// Only `p = 0`.
    Origin,
    Ray { angle: f64 },
    /// Both directions `angle` and `angle + pi`.
    Line { angle: f64 },
    /// Directions in `[lo, hi]` with `0 < hi - lo < pi`.
    Sector { lo: f64, hi: f64 },
    /// Directions in `[lo, lo + pi]`.
    HalfPlane { lo: f64 },
    Full,
}

impl ConeRegion {
    pub fn code(&self) -> &'static str {
        match self {
            ConeRegion::Origin => "empty-or-origin",
            ConeRegion::Ray { .. } => "ray",
            ConeRegion::Line { .. } => "line",
            ConeRegion::Sector { .. } => "sector-with-interior",
            ConeRegion::HalfPlane { .. } => "halfplane",
            ConeRegion::Full => "full",
        }
    }

    pub fn has_interior(&self) -> bool {
        matches!(self, ConeRegion::Sector { .. } | ConeRegion::HalfPlane { .. } | ConeRegion::Full)
    }
}

enum Arc {
    Span(f64, f64),
    Line(f64),
    Ray(f64),
    Origin,
}

fn wrap_near(phi: f64, centre: f64) -> f64 {
    let mut x = phi;
    while x - centre > PI {
        x -= 2.0 * PI;
    }
    while x - centre <= -PI {
        x += 2.0 * PI;
    }
    x
}

fn column_angles(q: &Matrix<f64>, z: f64) -> Vec<(usize, f64)> {
    (0..q.cols())
        .filter(|&j| q[(0, j)].abs() > z || q[(1, j)].abs() > z)
        .map(|j| {
            let a = if q[(0, j)].abs() > z { q[(0, j)] } else { 0.0 };
            let b = if q[(1, j)].abs() > z { q[(1, j)] } else { 0.0 };
            (j, b.atan2(a))
        })
        .collect()
}

pub fn feasible_cone(q: &Matrix<f64>, tol: &Tolerances) -> Result<ConeRegion> {
    classify_columns(q, tol)?;
    let dirs = column_angles(q, zero_threshold(q, tol));
    let Some(&(_, first)) = dirs.first() else {
        return Ok(ConeRegion::Full);
    };
    let mut state = Arc::Span(first - FRAC_PI_2, first + FRAC_PI_2);
    for &(_, phi) in &dirs[1..] {
        state = match state {
            Arc::Span(lo, hi) => {
                let mid = 0.5 * (lo + hi);
                let p = wrap_near(phi, mid);
                if hi - lo >= PI - ANGLE_EPS && (p - mid).abs() >= PI - ANGLE_EPS {
                    Arc::Line(lo)
                } else {
                    let nlo = lo.max(p - FRAC_PI_2);
                    let nhi = hi.min(p + FRAC_PI_2);
                    if nhi - nlo > ANGLE_EPS {
                        Arc::Span(nlo, nhi)
                    } else if nhi - nlo >= -ANGLE_EPS {
                        Arc::Ray(0.5 * (nlo + nhi))
                    } else {
                        Arc::Origin
                    }
                }
            }
            Arc::Line(t) => {
                let fwd = (t - phi).cos() >= -ANGLE_EPS;
                let back = (t + PI - phi).cos() >= -ANGLE_EPS;
                match (fwd, back) {
                    (true, true) => Arc::Line(t),
                    (true, false) => Arc::Ray(t),
                    (false, true) => Arc::Ray(t + PI),
                    (false, false) => Arc::Origin,
                }
            }
            Arc::Ray(t) => {
                if (t - phi).cos() >= -ANGLE_EPS {
                    Arc::Ray(t)
                } else {
                    Arc::Origin
                }
            }
            Arc::Origin => Arc::Origin,
        };
    }
    Ok(match state {
        Arc::Span(lo, hi) if hi - lo >= PI - ANGLE_EPS => ConeRegion::HalfPlane { lo },
        Arc::Span(lo, hi) => ConeRegion::Sector { lo, hi },
        Arc::Line(t) => ConeRegion::Line { angle: t },
        Arc::Ray(t) => ConeRegion::Ray { angle: t },
        Arc::Origin => ConeRegion::Origin,
    })
}

const ALWAYS_INFEASIBLE: [&str; 9] = ["247", "257", "258", "358", "368", "369", "469", "479", "569"];

fn angular_gap(a: f64, b: f64) -> f64 {
    (wrap_near(a, b) - b).abs()
}

fn wrap_turn(x: f64) -> f64 {
    let r = x % (2.0 * PI);
    if r < 0.0 {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Whether three directions fail to fit in any open half-plane.
fn triple_blocks(mut t: [f64; 3]) -> bool {
    for x in t.iter_mut() {
        *x = wrap_turn(*x);
    }
    t.sort_by(f64::total_cmp);
    let gaps = [t[1] - t[0], t[2] - t[1], 2.0 * PI - (t[2] - t[0])];
    gaps.iter().all(|&g| g < PI + ANGLE_EPS)
}

fn certify_infeasible(q: &Matrix<f64>, tol: &Tolerances) -> Result<RealizabilityCertificate> {
    let pattern = classify_columns(q, tol)?;
    let dirs = column_angles(q, zero_threshold(q, tol));
    let case = |j: usize| pattern.cases[j];

    for (a, &(i, pi)) in dirs.iter().enumerate() {
        for &(j, pj) in &dirs[a + 1..] {
            if angular_gap(pi, pj) >= PI - ANGLE_EPS {
                return Ok(RealizabilityCertificate::infeasible(
                    Infeasibility::PairRule,
                    vec![i, j],
                    vec![case(i), case(j)],
                ));
            }
        }
    }

    let first_of = |n: u8| pattern.cases.iter().position(|c| c.0 == n);
    if let (Some(c2), Some(c3), Some(c5), Some(c8)) = (first_of(2), first_of(3), first_of(5), first_of(8)) {
        let mut cols = vec![c2, c3, c5, c8];
        cols.sort_unstable();
        let cases = cols.iter().map(|&j| case(j)).collect();
        return Ok(RealizabilityCertificate::infeasible(Infeasibility::Quadruple2358, cols, cases));
    }

    for a in 0..dirs.len() {
        for b in a + 1..dirs.len() {
            for c in b + 1..dirs.len() {
                if triple_blocks([dirs[a].1, dirs[b].1, dirs[c].1]) {
                    let cols = vec![dirs[a].0, dirs[b].0, dirs[c].0];
                    let cases: Vec<SignCase> = cols.iter().map(|&j| case(j)).collect();
                    let code = pattern_code(&cases);
                    let reason = if code.len() == 3 && ALWAYS_INFEASIBLE.contains(&code.as_str()) {
                        Infeasibility::TripleRule
                    } else {
                        Infeasibility::SlopeRule
                    };
                    return Ok(RealizabilityCertificate::infeasible(reason, cols, cases));
                }
            }
        }
    }

    Ok(RealizabilityCertificate::infeasible(
        Infeasibility::DegenerateCone,
        Vec::new(),
        Vec::new(),
    ))
}

fn rows_at(angles: &[f64]) -> Matrix<C64> {
    Matrix::from_fn(angles.len(), 2, |i, j| {
        let t = angles[i];
        C64::new(if j == 0 { t.cos() } else { t.sin() }, 0.0)
    })
}

/// Decides whether a nonsingular real `P` with `PQ >= 0` exists.
///
/// Exact for one or two rows. A nonnegative `Q` gets `P = I`; otherwise the
/// witness rows are the bisector of the feasible cone and the bisector turned
/// by a third of the cone's width.
pub fn exists_nonneg_p(q: &Matrix<f64>, tol: &Tolerances) -> Result<RealizabilityCertificate> {
    if !q.is_finite() {
        return Err(Error::NonFinite("Q"));
    }
    let m = q.rows();
    if m == 0 || q.cols() == 0 {
        return Err(Error::InvalidParameter(String::from("Q must be nonempty")));
    }
    if m > 2 {
        return Err(Error::Unsupported(format!(
            "nonnegative realization is decided for one or two rows, got {m}"
        )));
    }
    let r = rank(q, tol.rank);
    if r < m {
        return Err(Error::RankDeficient { rank: r, expected: m });
    }
    let z = zero_threshold(q, tol);
    if q.as_slice().iter().all(|&x| x >= -z) {
        return Ok(RealizabilityCertificate::feasible(Matrix::identity(m)));
    }
    if m == 1 {
        let row = q.row(0);
        let pos = row.iter().position(|&x| x > z);
        let neg = row.iter().position(|&x| x < -z);
        return Ok(match (pos, neg) {
            (Some(i), Some(j)) => {
                let mut cols = vec![i, j];
                cols.sort_unstable();
                RealizabilityCertificate::infeasible(Infeasibility::MixedSigns, cols, Vec::new())
            }
            _ => RealizabilityCertificate::feasible(Matrix::from_diagonal(&[C64::new(-1.0, 0.0)])),
        });
    }
    match feasible_cone(q, tol)? {
        ConeRegion::Full => Ok(RealizabilityCertificate::feasible(Matrix::identity(2))),
        ConeRegion::Sector { lo, hi } => {
            let mid = 0.5 * (lo + hi);
            Ok(RealizabilityCertificate::feasible(rows_at(&[mid, mid + (hi - lo) / 3.0])))
        }
        ConeRegion::HalfPlane { lo } => {
            let mid = lo + FRAC_PI_2;
            Ok(RealizabilityCertificate::feasible(rows_at(&[mid, mid + PI / 3.0])))
        }
        _ => certify_infeasible(q, tol),
    }
}

fn abs_of<T: Coefficient>(x: &T) -> T {
    if *x < T::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}

fn det_of<T: Coefficient>(m: &Matrix<T>) -> T {
    let n = m.rows();
    let mut a = m.clone();
    let mut det = T::one();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if abs_of(&a[(i, k)]) > abs_of(&a[(piv, k)]) {
                piv = i;
            }
        }
        if a[(piv, k)] == T::zero() {
            return T::zero();
        }
        if piv != k {
            for j in 0..n {
                let t = a[(k, j)].clone();
                a[(k, j)] = a[(piv, j)].clone();
                a[(piv, j)] = t;
            }
            det = -det;
        }
        let p = a[(k, k)].clone();
        det = det * p.clone();
        for i in k + 1..n {
            let f = a[(i, k)].clone() / p.clone();
            for j in k..n {
                let t = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                a[(i, j)] = t;
            }
        }
    }
    det
}

/// Checks a proposed witness: returns `PQ` if `P` is nonsingular and `PQ`
/// has no negative entries. Exact for rational `T`.
pub fn verify_nonneg_witness<T: Coefficient>(q: &Matrix<T>, p: &Matrix<T>) -> Result<(Matrix<T>, T)> {
    if !p.is_square() || p.cols() != q.rows() {
        return Err(Error::DimensionMismatch {
            expected: q.rows(),
            found: p.cols(),
        });
    }
    let pq = Matrix::from_fn(p.rows(), q.cols(), |i, j| {
        (0..q.rows()).fold(T::zero(), |s, k| s + p[(i, k)].clone() * q[(k, j)].clone())
    });
    let det = det_of(p);
    let scale = (0..p.rows())
        .map(|i| p.row(i).iter().map(abs_of).fold(T::zero(), |m, x| if x > m { x } else { m }))
        .fold(T::one(), |s, x| s * x);
    if det.is_negligible(&scale) {
        return Err(Error::SingularP);
    }
    let big = pq
        .as_slice()
        .iter()
        .map(abs_of)
        .fold(T::zero(), |m, x| if x > m { x } else { m });
    if pq.as_slice().iter().any(|x| *x < T::zero() && !x.is_negligible(&big)) {
        return Err(Error::NegativeEntries);
    }
    Ok((pq, det))
}

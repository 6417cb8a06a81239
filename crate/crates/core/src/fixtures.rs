//! Worked examples: models, lumping matrices and their expected lumped
//! coefficient matrices.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::families::{cycle, three_cycle_discriminant};
use crate::linalg::{eig_left, Matrix, C64};
use crate::model::CompartmentalModel;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn real_rows<const N: usize>(rows: &[[f64; N]]) -> Matrix<f64> {
    Matrix::from_rows(rows).expect("rectangular rows")
}

fn diag(d: &[C64]) -> Matrix<C64> {
    Matrix::from_diagonal(d)
}

/// A model, a lumping matrix for it and the expected `Ahat`.
#[derive(Clone, Debug)]
pub struct LumpingFixture {
    pub name: &'static str,
    pub model: CompartmentalModel,
    pub q: Matrix<C64>,
    pub a_hat: Matrix<C64>,
}

/// Five-species reversible chain with rates 1, 4, 2, 1 forward and 1, 4, 5, 2
/// backward.
pub fn reversible_chain() -> CompartmentalModel {
    CompartmentalModel::from_matrix(real_rows(&[
        [-1.0, 1.0, 0.0, 0.0, 0.0],
        [1.0, -5.0, 4.0, 0.0, 0.0],
        [0.0, 4.0, -6.0, 5.0, 0.0],
        [0.0, 0.0, 2.0, -6.0, 2.0],
        [0.0, 0.0, 0.0, 1.0, -2.0],
    ]))
    .expect("valid chain")
}

/// Left eigenvectors of [`reversible_chain`] to six decimals, scaled to a
/// trailing 1.
pub const REVERSIBLE_CHAIN_EIGENVECTORS: [[f64; 5]; 5] = [
    [0.2, -0.2, -0.2, 0.0, 1.0],
    [-0.689897, 0.069693, 0.240408, 0.449489, 1.0],
    [0.289897, -2.869693, 4.159591, -4.449489, 1.0],
    [-0.2, 1.0, -0.2, -2.0, 1.0],
    [1.0, 1.0, 1.0, 1.0, 1.0],
];

/// Rows of [`REVERSIBLE_CHAIN_EIGENVECTORS`] used as the lumping matrix.
pub const REVERSIBLE_CHAIN_Q_ROWS: [usize; 2] = [2, 0];

/// Diagonal of the lumped matrix, to six decimals.
pub const REVERSIBLE_CHAIN_A_HAT: [f64; 2] = [-10.898979, -2.0];

/// Exact eigenvalues belonging to [`REVERSIBLE_CHAIN_EIGENVECTORS`].
pub fn reversible_chain_eigenvalues() -> [f64; 5] {
    let s6 = 6.0f64.sqrt();
    [-2.0, -6.0 + 2.0 * s6, -6.0 - 2.0 * s6, -6.0, 0.0]
}

/// [`reversible_chain`] lumped with the full-precision eigenvectors of
/// `-6 - 2 sqrt 6` and `-2`, scaled to a trailing 1.
pub fn reversible_chain_fixture() -> Result<LumpingFixture> {
    let model = reversible_chain();
    let sys = eig_left(model.a())?;
    let values = reversible_chain_eigenvalues();
    let rows: Vec<Vec<C64>> = REVERSIBLE_CHAIN_Q_ROWS
        .iter()
        .map(|&r| {
            let target = values[r];
            let pair = sys
                .pairs
                .iter()
                .min_by(|a, b| (a.value.re - target).abs().total_cmp(&(b.value.re - target).abs()))
                .expect("five pairs");
            let last = pair.vector[4];
            pair.vector.iter().map(|z| c((z / last).re)).collect()
        })
        .collect();
    let lam: Vec<C64> = REVERSIBLE_CHAIN_Q_ROWS.iter().map(|&r| c(values[r])).collect();
    Ok(LumpingFixture {
        name: "reversible-chain",
        model,
        q: Matrix::from_rows(&rows)?,
        a_hat: diag(&lam),
    })
}

/// Five-compartment irreversible chain with outflows `mu`.
pub fn flowed_catenary(k: &[f64; 4], mu: &[f64; 5]) -> Result<CompartmentalModel> {
    let mut a = Matrix::zeros(5, 5);
    for i in 0..5 {
        a[(i, i)] = -mu[i] - if i < 4 { k[i] } else { 0.0 };
        if i > 0 {
            a[(i, i - 1)] = k[i - 1];
        }
    }
    CompartmentalModel::from_matrix(a)
}

/// The two-row lumping matrix of the flowed chain, written out entrywise.
pub fn flowed_catenary_q(k: &[f64; 4], mu: &[f64; 5]) -> Matrix<f64> {
    let g = |i: usize, j: usize| k[i] - k[j] + mu[i] - mu[j];
    real_rows(&[
        [k[0] / g(0, 1), 1.0, 0.0, 0.0, 0.0],
        [
            k[0] * k[1] * k[2] / (g(0, 3) * g(1, 3) * g(2, 3)),
            k[1] * k[2] / (g(1, 3) * g(2, 3)),
            k[2] / g(2, 3),
            1.0,
            0.0,
        ],
    ])
}

pub fn flowed_catenary_a_hat(k: &[f64; 4], mu: &[f64; 5]) -> Matrix<C64> {
    diag(&[c(-k[1] - mu[1]), c(-k[3] - mu[3])])
}

/// Chain `X1 -> X2 <- X3 -> X4 <- X5`.
pub fn nonuniform_chain(k: &[f64; 4]) -> Result<CompartmentalModel> {
    let [k1, k2, k3, k4] = *k;
    CompartmentalModel::from_matrix(real_rows(&[
        [-k1, 0.0, 0.0, 0.0, 0.0],
        [k1, 0.0, k2, 0.0, 0.0],
        [0.0, 0.0, -k2 - k3, 0.0, 0.0],
        [0.0, 0.0, k3, 0.0, k4],
        [0.0, 0.0, 0.0, 0.0, -k4],
    ]))
}

/// Lumping matrix picking `x5, x3, x1`; lumps to `diag(-k4, -k2-k3, -k1)`.
pub fn nonuniform_chain_q_permutation() -> Matrix<f64> {
    real_rows(&[
        [0.0, 0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 0.0],
    ])
}

pub fn nonuniform_chain_permutation_a_hat(k: &[f64; 4]) -> Matrix<C64> {
    diag(&[c(-k[3]), c(-k[1] - k[2]), c(-k[0])])
}

/// Lumping matrix with rows `x1`, `x3` and the conservation-type vector
/// `((k2+k3)/k2, (k2+k3)/k2, 1, 0, 0)`.
pub fn nonuniform_chain_q_dense(k: &[f64; 4]) -> Matrix<f64> {
    let s = (k[1] + k[2]) / k[1];
    real_rows(&[
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [s, s, 1.0, 0.0, 0.0],
    ])
}

/// Lumped matrix of [`nonuniform_chain_q_dense`]: its rows are left
/// eigenvectors for `-k1`, `-k2-k3` and `0`.
pub fn nonuniform_chain_dense_a_hat(k: &[f64; 4]) -> Matrix<C64> {
    diag(&[c(-k[0]), c(-k[1] - k[2]), c(0.0)])
}

/// The dense matrix published for [`nonuniform_chain_q_dense`]. It equals
/// `Q A^T Qbar`, not `Q A Qbar`.
pub fn nonuniform_chain_published_dense(k: &[f64; 4]) -> Matrix<f64> {
    let [k1, k2, k3, _] = *k;
    let s = k2 + k3;
    real_rows(&[
        [-2.0 * k1, -k1 * k2 / s, k1 * k2 / s],
        [-k2, -k2 * k2 / s - k2 - k3, k2 * k2 / s],
        [
            -2.0 * k1 * s / k2 - k2,
            -(k1 * s + k2 * k2) / s - k2 - k3,
            (k1 * s + k2 * k2) / s,
        ],
    ])
}

/// `X1 -> X4 <- X2`, `X3 -> X4`.
pub fn mamillary_inward_example(k: &[f64; 3]) -> Result<LumpingFixture> {
    let [k1, k2, k3] = *k;
    let model = CompartmentalModel::from_matrix(real_rows(&[
        [-k1, 0.0, 0.0, 0.0],
        [0.0, -k2, 0.0, 0.0],
        [0.0, 0.0, -k3, 0.0],
        [k1, k2, k3, 0.0],
    ]))?;
    let q = real_rows(&[[0.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0]]).to_complex();
    Ok(LumpingFixture {
        name: "mamillary-inward",
        model,
        q,
        a_hat: diag(&[c(-k3), c(-k1), c(0.0)]),
    })
}

/// Two outflowing and three inflowing peripherals around `X6`.
pub fn mamillary_mixed(k: &[f64; 5]) -> Result<LumpingFixture> {
    let [k1, k2, k3, k4, k5] = *k;
    let big = k3 + k4 + k5;
    let mut a = Matrix::zeros(6, 6);
    a[(0, 0)] = -k1;
    a[(1, 1)] = -k2;
    a[(2, 5)] = k3;
    a[(3, 5)] = k4;
    a[(4, 5)] = k5;
    a[(5, 5)] = -big;
    let model = CompartmentalModel::from_matrix(a)?;
    let q = real_rows(&[
        [0.0, 0.0, 1.0, 0.0, 0.0, k3 / big],
        [0.0, 0.0, 1.0, -k3 / k4, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ])
    .to_complex();
    Ok(LumpingFixture {
        name: "mamillary-mixed",
        model,
        q,
        a_hat: diag(&[c(0.0), c(0.0), c(-k1)]),
    })
}

/// Outward mamillary system lumped to its mother compartment: `Ahat = [-K]`.
pub fn mamillary_outward_mother(k: &[f64]) -> Result<LumpingFixture> {
    let m = k.len();
    let big: f64 = k.iter().sum();
    let mut a = Matrix::zeros(m + 1, m + 1);
    for (i, &ki) in k.iter().enumerate() {
        a[(i, m)] = ki;
    }
    a[(m, m)] = -big;
    let model = CompartmentalModel::from_matrix(a)?;
    let q = Matrix::from_fn(1, m + 1, |_, j| c(if j == m { 1.0 } else { 0.0 }));
    Ok(LumpingFixture {
        name: "mamillary-outward",
        model,
        q,
        a_hat: diag(&[c(-big)]),
    })
}

/// Four peripherals exchanging with a mother compartment: rate `big_k`
/// outwards and `k` back.
pub fn reversible_mamillary(k: f64, big_k: f64) -> Result<LumpingFixture> {
    let mut a = Matrix::zeros(5, 5);
    for i in 0..4 {
        a[(i, i)] = -k;
        a[(i, 4)] = big_k;
        a[(4, i)] = k;
    }
    a[(4, 4)] = -4.0 * big_k;
    let model = CompartmentalModel::from_matrix(a)?;
    let r = -k / (4.0 * big_k);
    let q = real_rows(&[
        [-1.0, 0.0, 0.0, 1.0, 0.0],
        [r, r, r, r, 1.0],
        [-1.0, 1.0, 0.0, 0.0, 0.0],
    ])
    .to_complex();
    Ok(LumpingFixture {
        name: "reversible-mamillary",
        model,
        q,
        a_hat: diag(&[c(-k), c(-(4.0 * big_k + k)), c(-k)]),
    })
}

/// Eigenvalue multiset of [`reversible_mamillary`].
pub fn reversible_mamillary_eigenvalues(k: f64, big_k: f64) -> [f64; 5] {
    [-k, -k, -k, 0.0, -k - 4.0 * big_k]
}

/// Irreversible three-cycle lumped with `(1, 1, 1)` and the eigenvector of
/// `(-(k1+k2+k3) - sqrt(D)) / 2`, both written out.
pub fn three_cycle(k: &[f64; 3]) -> Result<LumpingFixture> {
    let [k1, k2, k3] = *k;
    let model = cycle(k, false)?;
    let dd = three_cycle_discriminant(k1, k2, k3);
    let root = if dd >= 0.0 { c(dd.sqrt()) } else { C64::new(0.0, (-dd).sqrt()) };
    let q = Matrix::from_rows(&[
        [c(1.0), c(1.0), c(1.0)],
        [
            -(c(k1 + k2 - k3) + root) / (2.0 * k3),
            (c(-k1 + k2 - k3) + root) * k2 / (2.0 * k1 * k3),
            c(1.0),
        ],
    ])?;
    let lam = (c(-(k1 + k2 + k3)) - root) / 2.0;
    Ok(LumpingFixture {
        name: if dd >= 0.0 { "three-cycle-real" } else { "three-cycle-complex" },
        model,
        q,
        a_hat: diag(&[c(0.0), lam]),
    })
}

/// Lumping matrix of the three-cycle at `k = (1, 2, 3)` as published.
pub fn three_cycle_published_q() -> Matrix<C64> {
    let r2 = 2.0f64.sqrt();
    Matrix::from_rows(&[
        [c(1.0), c(1.0), c(1.0)],
        [C64::new(0.0, -r2 / 3.0), C64::new(-2.0 / 3.0, 2.0 * r2 / 3.0), c(1.0)],
    ])
    .expect("two rows")
}

/// Uniform reversible five-cycle with rate `k`.
pub fn reversible_five_cycle(k: f64) -> Result<LumpingFixture> {
    let model = cycle(&[k; 5], true)?;
    let phi = (5.0f64.sqrt() + 1.0) / 2.0;
    let q = real_rows(&[
        [1.0, 1.0, 1.0, 1.0, 1.0],
        [-1.0, phi, -phi, 1.0, 0.0],
        [-phi, phi, -1.0, 0.0, 1.0],
    ])
    .to_complex();
    let lam = -(5.0 + 5.0f64.sqrt()) * k / 2.0;
    Ok(LumpingFixture {
        name: "reversible-five-cycle",
        model,
        q,
        a_hat: diag(&[c(0.0), c(lam), c(lam)]),
    })
}

pub fn reversible_five_cycle_eigenvalues(k: f64) -> [f64; 5] {
    let s5 = 5.0f64.sqrt();
    let a = (-5.0 + s5) * k / 2.0;
    let b = (-5.0 - s5) * k / 2.0;
    [0.0, a, a, b, b]
}

/// `S -> I1 -> P`, `S -> I2 -> P` (species `S, I1, I2, P`) with the lumping
/// `I = I1 + I2`.
pub fn parallel_intermediates(k: &[f64; 4]) -> Result<(CompartmentalModel, Matrix<f64>)> {
    let [k1, k2, k3, k4] = *k;
    let model = CompartmentalModel::from_matrix(real_rows(&[
        [-k1 - k3, 0.0, 0.0, 0.0],
        [k1, -k2, 0.0, 0.0],
        [k3, 0.0, -k4, 0.0],
        [0.0, k2, k4, 0.0],
    ]))?;
    let q = real_rows(&[[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
    Ok((model, q))
}

/// Two-row matrix with sign cases 3, 4, 5, 9 when `a13 = 2`; a large `a13`
/// makes it realizable.
pub fn appendix_nonneg_q(a13: f64) -> Matrix<f64> {
    real_rows(&[[5.0, 2.0, a13, -3.0], [-2.0, 0.0, 1.0, -1.0]])
}

/// Witness for `appendix_nonneg_q(18)`.
pub fn appendix_nonneg_p() -> Matrix<f64> {
    real_rows(&[[1.0, -5.0], [0.5, -4.0]])
}

pub fn appendix_real_q() -> Matrix<C64> {
    let z = C64::new;
    Matrix::from_rows(&[
        [z(1.0, 1.0), z(2.0, 1.0), z(4.0, 2.0), z(2.0, 2.0)],
        [z(-1.0, 0.0), z(0.0, 2.0), z(0.0, 4.0), z(-2.0, 0.0)],
    ])
    .expect("two rows")
}

/// Kernel vector `(p1, p2, q1, q2) = (-a + b, -(a + b) / 2, a, b)` of the
/// realness conditions for [`appendix_real_q`].
pub fn appendix_real_kernel_vector(alpha: f64, beta: f64) -> [f64; 4] {
    [-alpha + beta, -(alpha + beta) / 2.0, alpha, beta]
}

/// Parameter picks giving the rows `(-i, 1 - i)` and `(2 - 3i, 2 - i)`.
pub const APPENDIX_REAL_PICKS: [(f64, f64); 2] = [(-1.0, -1.0), (-3.0, -1.0)];

/// Published product for those picks.
pub const APPENDIX_REAL_PUBLISHED_PQ: [[f64; 4]; 2] = [[0.0, 3.0, 6.0, 0.0], [3.0, 9.0, 18.0, 8.0]];

/// Every lumping fixture at representative parameters.
pub fn all_lumping_fixtures() -> Result<Vec<LumpingFixture>> {
    let k4 = [1.0, 2.0, 3.0, 4.0];
    let mu = [0.1, 0.2, 0.3, 0.4, 0.5];
    let chain = flowed_catenary(&k4, &mu)?;
    let nonuni = nonuniform_chain(&k4)?;
    let mut out = vec![
        reversible_chain_fixture()?,
        LumpingFixture {
            name: "flowed-catenary",
            model: chain,
            q: flowed_catenary_q(&k4, &mu).to_complex(),
            a_hat: flowed_catenary_a_hat(&k4, &mu),
        },
        LumpingFixture {
            name: "nonuniform-chain-permutation",
            model: nonuni.clone(),
            q: nonuniform_chain_q_permutation().to_complex(),
            a_hat: nonuniform_chain_permutation_a_hat(&k4),
        },
        LumpingFixture {
            name: "nonuniform-chain-dense",
            model: nonuni,
            q: nonuniform_chain_q_dense(&k4).to_complex(),
            a_hat: nonuniform_chain_dense_a_hat(&k4),
        },
        mamillary_inward_example(&[1.0, 2.0, 3.0])?,
        mamillary_mixed(&[1.0, 2.0, 3.0, 4.0, 5.0])?,
        mamillary_outward_mother(&[1.0, 2.0, 3.0, 4.0])?,
        reversible_mamillary(1.0, 2.0)?,
        three_cycle(&[1.0, 2.0, 3.0])?,
        three_cycle(&[1.0, 0.5, 5.0 / 128.0])?,
        reversible_five_cycle(1.0)?,
    ];
    let (model, q) = parallel_intermediates(&[1.0, 2.0, 3.0, 2.0])?;
    let a_hat = Matrix::from_rows(&[[c(-4.0), c(0.0), c(0.0)], [c(4.0), c(-2.0), c(0.0)], [c(0.0), c(2.0), c(0.0)]])?;
    out.push(LumpingFixture {
        name: "parallel-intermediates",
        model,
        q: q.to_complex(),
        a_hat,
    });
    Ok(out)
}

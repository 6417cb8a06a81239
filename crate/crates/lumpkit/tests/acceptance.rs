//! Acceptance criteria, one line per criterion.
//!
//! Two criteria compare against printed values that are arithmetically
//! inconsistent with their own inputs (AC3 second part, AC9 witness
//! product). Those print `[FAIL]` with the measured discrepancy. The run
//! still exits 0 when every other check, including the corrected versions
//! of those two, passes.

use std::time::{Duration, Instant};

use lumpkit_core::dynamics::{
    count_local_extrema, default_grid, region_scan, simulate, three_cycle_lumped_imag, uniform_grid,
    verify_commutation,
};
use lumpkit_core::families::{
    catenary_irreversible, circulant_simplicial, mamillary_inward, mamillary_mixed_example, mamillary_outward,
    three_cycle_eigensystem, uniform_reversible_cycle, verify_closed_form,
};
use lumpkit_core::fixtures::{
    all_lumping_fixtures, appendix_nonneg_p, appendix_nonneg_q, appendix_real_kernel_vector, appendix_real_q,
    flowed_catenary, flowed_catenary_q, mamillary_inward_example, mamillary_mixed, mamillary_outward_mother,
    nonuniform_chain, nonuniform_chain_published_dense, nonuniform_chain_q_dense, nonuniform_chain_q_permutation,
    parallel_intermediates, reversible_chain, reversible_chain_eigenvalues, reversible_chain_fixture,
    reversible_five_cycle, reversible_mamillary, three_cycle, three_cycle_published_q, APPENDIX_REAL_PICKS,
    APPENDIX_REAL_PUBLISHED_PQ, REVERSIBLE_CHAIN_A_HAT, REVERSIBLE_CHAIN_EIGENVECTORS, REVERSIBLE_CHAIN_Q_ROWS,
};
use lumpkit_core::linalg::{
    eig_left, generalized_inverse, rank, spectrum_distance, EigenSystem, Matrix, C64,
};
use lumpkit_core::lumping::{farkas_row_test, is_exactly_lumpable, lump, LumpedModel, LumpingMatrix};
use lumpkit_core::model::{induce_reaction_network, Openness, ReactionComplex};
use lumpkit_core::oracle::{nonneg_p_brute_force, nonneg_right_inverse_brute_force, real_p_sampling};
use lumpkit_core::realizer::{
    build_real_coefficient_matrix, exists_nonneg_p, exists_real_p, p_from_parts, real_witness_product,
    verify_nonneg_witness, Infeasibility, RealSearch,
};
use lumpkit_core::{CompartmentalModel, Result, Tolerances};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion.
struct Verdict {
    pass: bool,
    detail: String,
    /// Set when the only failing part compares against an inconsistent
    /// printed value and its corrected counterpart passed.
    erratum: Option<String>,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
            erratum: None,
        }
    }
}

struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) -> bool {
        if !ok {
            self.failures.push(what.into());
        }
        ok
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn verdict(self) -> Verdict {
        if self.failures.is_empty() {
            Verdict::new(true, self.notes.join("; "))
        } else {
            Verdict::new(false, self.failures.join("; "))
        }
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn diag_error(a: &Matrix<C64>, d: &[C64]) -> f64 {
    a.sub(&Matrix::from_diagonal(d)).map(|m| m.max_abs()).unwrap_or(f64::INFINITY)
}

fn lump_fixture(model: &CompartmentalModel, q: &Matrix<C64>) -> Result<LumpedModel> {
    lump(model, &LumpingMatrix::new(q.clone())?, &Tolerances::default())
}

fn real_multiset(values: &[f64]) -> Vec<C64> {
    values.iter().map(|&x| c(x)).collect()
}

fn numeric_spectrum(a: &Matrix<f64>) -> Vec<C64> {
    eig_left(a).map(|s| s.eigenvalue_multiset()).unwrap_or_default()
}

/// Smallest pairwise distance between `values`.
fn min_gap(values: &[f64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).abs());
        }
    }
    gap
}

fn ac1() -> Verdict {
    let mut ck = Checks::new();
    let model = reversible_chain();
    let sys = match eig_left(model.a()) {
        Ok(s) => s,
        Err(e) => return Verdict::new(false, format!("eigensolver: {e}")),
    };
    let values = reversible_chain_eigenvalues();
    let mut worst: f64 = 0.0;
    for (r, printed) in REVERSIBLE_CHAIN_EIGENVECTORS.iter().enumerate() {
        let Some(pair) = sys.pairs.iter().find(|p| (p.value - c(values[r])).norm() < 1e-8) else {
            ck.check(false, format!("no eigenvalue near {}", values[r]));
            continue;
        };
        let last = pair.vector[4];
        for (z, want) in pair.vector.iter().zip(printed) {
            worst = worst.max(((z / last) - c(*want)).norm());
        }
    }
    ck.check(worst <= 1e-5, format!("eigenvector entries off by {worst:.2e}"));
    ck.note(format!("eigenvector entries within {worst:.1e}"));
    match reversible_chain_fixture().and_then(|fx| lump_fixture(&fx.model, &fx.q)) {
        Ok(l) => {
            let want: Vec<C64> = REVERSIBLE_CHAIN_A_HAT.iter().map(|&x| c(x)).collect();
            let err = diag_error(&l.a_hat, &want);
            ck.check(err <= 1e-5, format!("A_hat off by {err:.2e}"));
            ck.note(format!(
                "A_hat = diag({:.6}, {:.6}) from rows {:?}",
                l.a_hat[(0, 0)].re,
                l.a_hat[(1, 1)].re,
                REVERSIBLE_CHAIN_Q_ROWS
            ));
        }
        Err(e) => {
            ck.check(false, format!("lump: {e}"));
        }
    }
    ck.verdict()
}

fn ac2(rng: &mut ChaCha8Rng) -> Verdict {
    let mut ck = Checks::new();
    let mut worst_res: f64 = 0.0;
    let mut worst_diag: f64 = 0.0;
    let mut draws = 0;
    let mut rejected = 0;
    while draws < 100 {
        let k: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.1..5.0));
        let mu: [f64; 5] = std::array::from_fn(|_| rng.gen_range(0.0..2.0));
        let mut ev: Vec<f64> = (0..4).map(|i| k[i] + mu[i]).collect();
        ev.push(mu[4]);
        if min_gap(&ev) < 0.05 {
            rejected += 1;
            continue;
        }
        draws += 1;
        let l = flowed_catenary(&k, &mu)
            .and_then(|m| lump(&m, &LumpingMatrix::from_real(&flowed_catenary_q(&k, &mu))?, &Tolerances::default()));
        match l {
            Ok(l) => {
                worst_res = worst_res.max(l.exactness_residual);
                worst_diag = worst_diag.max(diag_error(&l.a_hat, &[c(-k[1] - mu[1]), c(-k[3] - mu[3])]));
            }
            Err(e) => {
                ck.check(false, format!("k={k:?} mu={mu:?}: {e}"));
            }
        }
    }
    ck.check(worst_res <= 1e-10, format!("residual {worst_res:.2e}"));
    ck.check(worst_diag <= 1e-10, format!("A_hat off diag(-k2-mu2, -k4-mu4) by {worst_diag:.2e}"));
    ck.note(format!(
        "100 draws ({rejected} rejected for eigen-gap < 0.05), max residual {worst_res:.1e}, max A_hat error {worst_diag:.1e}"
    ));
    ck.verdict()
}

fn ac3(rng: &mut ChaCha8Rng) -> Verdict {
    let mut ck = Checks::new();
    let mut corrected = Checks::new();
    let mut worst_perm: f64 = 0.0;
    let mut worst_literal: f64 = 0.0;
    let mut worst_transposed: f64 = 0.0;
    let mut worst_true: f64 = 0.0;
    let mut literal_kinetic = 0;
    let mut draws = 0;
    while draws < 50 {
        let k: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.1..5.0));
        if min_gap(&[k[0], k[1] + k[2], k[3], 0.0]) < 0.05 {
            continue;
        }
        draws += 1;
        let model = match nonuniform_chain(&k) {
            Ok(m) => m,
            Err(e) => return Verdict::new(false, e.to_string()),
        };
        match lump_fixture(&model, &nonuniform_chain_q_permutation().to_complex()) {
            Ok(l) => {
                worst_perm = worst_perm.max(diag_error(&l.a_hat, &[c(-k[3]), c(-k[1] - k[2]), c(-k[0])]));
                ck.check(l.kinetic.is_compartmental, format!("k={k:?}: permutation lump not compartmental"));
            }
            Err(e) => {
                ck.check(false, format!("permutation Q: {e}"));
            }
        }
        let q = nonuniform_chain_q_dense(&k);
        let published = nonuniform_chain_published_dense(&k).to_complex();
        let g = generalized_inverse(&q.to_complex(), 1e-12).expect("full rank");
        let qa_t_qbar = q
            .to_complex()
            .matmul(&model.a().transpose().to_complex())
            .and_then(|m| m.matmul(&g.qbar))
            .expect("shapes");
        worst_transposed = worst_transposed.max(qa_t_qbar.sub(&published).expect("shape").max_abs());
        match lump_fixture(&model, &q.to_complex()) {
            Ok(l) => {
                worst_literal = worst_literal.max(l.a_hat.sub(&published).expect("shape").max_abs());
                if l.kinetic.is_kinetic {
                    literal_kinetic += 1;
                }
                worst_true = worst_true.max(diag_error(&l.a_hat, &[c(-k[0]), c(-k[1] - k[2]), c(0.0)]));
            }
            Err(e) => {
                corrected.check(false, format!("dense Q: {e}"));
            }
        }
    }
    ck.check(worst_perm <= 1e-9, format!("permutation A_hat off by {worst_perm:.2e}"));
    corrected.check(worst_true <= 1e-9, format!("dense Q does not lump to diag(-k1, -k2-k3, 0): {worst_true:.2e}"));
    corrected.check(
        worst_transposed <= 1e-9,
        format!("printed dense matrix differs from Q A^T Qbar by {worst_transposed:.2e}"),
    );
    let literal_ok = worst_literal <= 1e-9 && literal_kinetic == 0;
    let base = ck.verdict();
    let fixed = corrected.verdict();
    if !base.pass || !fixed.pass {
        return Verdict::new(false, format!("{} {}", base.detail, fixed.detail).trim().to_string());
    }
    let mut v = Verdict::new(
        literal_ok,
        format!(
            "permutation Q: diag(-k4, -k2-k3, -k1), compartmental (err {worst_perm:.1e}); dense Q: Q A Qbar differs from the printed dense matrix by up to {worst_literal:.2} and is kinetic in {literal_kinetic}/{draws} draws; the printed matrix equals Q A^T Qbar to {worst_transposed:.1e}, Q A Qbar = diag(-k1, -k2-k3, 0)"
        ),
    );
    if !literal_ok {
        v.erratum = Some("printed dense A_hat is Q A^T Qbar; the true lump is diagonal and kinetic".into());
    }
    v
}

fn ac4(rng: &mut ChaCha8Rng) -> Verdict {
    let mut ck = Checks::new();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let k: [f64; 5] = std::array::from_fn(|_| rng.gen_range(0.1..5.0));
        let inward = mamillary_inward_example(&[k[0], k[1], k[2]]).and_then(|fx| lump_fixture(&fx.model, &fx.q));
        match inward {
            Ok(l) => worst = worst.max(diag_error(&l.a_hat, &[c(-k[2]), c(-k[0]), c(0.0)])),
            Err(e) => {
                ck.check(false, format!("inward: {e}"));
            }
        }
        let mixed = mamillary_mixed(&k).and_then(|fx| lump_fixture(&fx.model, &fx.q));
        match mixed {
            Ok(l) => worst = worst.max(diag_error(&l.a_hat, &[c(0.0), c(0.0), c(-k[0])])),
            Err(e) => {
                ck.check(false, format!("mixed: {e}"));
            }
        }
        let big: f64 = k[..4].iter().sum();
        let outward = mamillary_outward_mother(&k[..4]).and_then(|fx| lump_fixture(&fx.model, &fx.q));
        match outward {
            Ok(l) => {
                worst = worst.max(diag_error(&l.a_hat, &[c(-big)]));
                let realized = l
                    .to_real_model(1e-12)
                    .ok_or(lumpkit_core::Error::Unsupported("complex lump".into()))
                    .and_then(|m| induce_reaction_network(&m));
                match realized {
                    Ok(net) => {
                        let steps = net.steps();
                        let ok = steps.len() == 1
                            && steps[0].reactant == ReactionComplex::single(0, 1)
                            && steps[0].product.is_zero()
                            && (steps[0].rate - big).abs() <= 1e-10 * big
                            && net.classification() == Openness::StrictlyHalfOpen;
                        ck.check(ok, format!("outward lump realized as {:?}", steps));
                    }
                    Err(e) => {
                        ck.check(false, format!("outward realization: {e}"));
                    }
                }
            }
            Err(e) => {
                ck.check(false, format!("outward: {e}"));
            }
        }
    }
    ck.check(worst <= 1e-10, format!("A_hat off by {worst:.2e}"));
    ck.note(format!(
        "50 draws: inward diag(-k3, -k1, 0), mixed diag(0, 0, -k1), outward [-K] = Xhat1 -> O at rate K; max error {worst:.1e}"
    ));
    ck.verdict()
}

fn ac5(rng: &mut ChaCha8Rng) -> Verdict {
    let mut ck = Checks::new();
    let mut worst_ev: f64 = 0.0;
    let mut worst_hat: f64 = 0.0;
    for _ in 0..50 {
        let k = rng.gen_range(0.1..5.0);
        let big = rng.gen_range(0.1..5.0);
        match reversible_mamillary(k, big) {
            Ok(fx) => {
                let want = real_multiset(&[-k, -k, -k, 0.0, -k - 4.0 * big]);
                worst_ev = worst_ev.max(spectrum_distance(&want, &numeric_spectrum(fx.model.a())));
                match lump_fixture(&fx.model, &fx.q) {
                    Ok(l) => worst_hat = worst_hat.max(diag_error(&l.a_hat, &[c(-k), c(-(4.0 * big + k)), c(-k)])),
                    Err(e) => {
                        ck.check(false, format!("lump: {e}"));
                    }
                }
            }
            Err(e) => {
                ck.check(false, e.to_string());
            }
        }
    }
    ck.check(worst_ev <= 1e-10, format!("eigenvalues off by {worst_ev:.2e}"));
    ck.check(worst_hat <= 1e-10, format!("A_hat off by {worst_hat:.2e}"));
    ck.note(format!(
        "50 draws: spectrum {{-k x3, 0, -k-4K}} within {worst_ev:.1e}, A_hat within {worst_hat:.1e}"
    ));
    ck.verdict()
}

fn ac6() -> Verdict {
    let mut ck = Checks::new();
    let tol = Tolerances::default();
    let want = [c(0.0), C64::new(-3.0, -2f64.sqrt())];
    match three_cycle(&[1.0, 2.0, 3.0]) {
        Ok(fx) => {
            for (label, q) in [("derived Q", fx.q.clone()), ("printed Q", three_cycle_published_q())] {
                match lump_fixture(&fx.model, &q) {
                    Ok(l) => {
                        let err = diag_error(&l.a_hat, &want);
                        ck.check(err <= 1e-10, format!("{label}: A_hat off diag(0, -3-sqrt2 i) by {err:.2e}"));
                    }
                    Err(e) => {
                        ck.check(false, format!("{label}: {e}"));
                    }
                }
            }
        }
        Err(e) => {
            ck.check(false, e.to_string());
        }
    }
    match three_cycle_lumped_imag(&[1.0, 0.5, 5.0 / 128.0], &tol) {
        Ok(im) => {
            ck.check(im <= 1e-10, format!("k=(1, 1/2, 5/128): |Im A_hat| = {im:.2e}"));
        }
        Err(e) => {
            ck.check(false, format!("k=(1, 1/2, 5/128): {e}"));
        }
    }
    let cells = match region_scan(1.0, (0.0, 20.0), (0.0, 20.0), 201) {
        Ok(c) => c,
        Err(e) => return Verdict::new(false, format!("region scan: {e}")),
    };
    let labels_ok = cells.iter().all(|c| c.real == (c.discriminant >= 0.0));
    ck.check(labels_ok && cells.len() == 201 * 201, "region labels disagree with sign of D");
    let mut compared = 0;
    let mut skipped_zero = 0;
    let mut skipped_band = 0;
    let mut mismatches = 0;
    for i in (0..201).step_by(4) {
        for j in (0..201).step_by(4) {
            let cell = cells[i * 201 + j];
            if cell.k2 == 0.0 || cell.k3 == 0.0 {
                skipped_zero += 1;
                continue;
            }
            if cell.discriminant.abs() < 1e-9 {
                skipped_band += 1;
                continue;
            }
            match three_cycle_lumped_imag(&[1.0, cell.k2, cell.k3], &tol) {
                Ok(im) => {
                    compared += 1;
                    if (im <= 1e-10) != cell.real {
                        mismatches += 1;
                    }
                }
                Err(lumpkit_core::Error::NonRobustParameters(..)) => skipped_band += 1,
                Err(e) => {
                    ck.check(false, format!("k2={} k3={}: {e}", cell.k2, cell.k3));
                }
            }
        }
    }
    ck.check(mismatches == 0, format!("{mismatches} subgrid cells disagree with Im(A_hat)"));
    ck.note(format!(
        "k=(1,2,3) gives diag(0, -3-sqrt2 i); k=(1,1/2,5/128) real; 201x201 labels match sign(D); 51x51 subgrid: {compared} cells agree with Im(A_hat), {skipped_zero} with a zero rate and {skipped_band} on the boundary band skipped"
    ));
    ck.verdict()
}

fn ac7(rng: &mut ChaCha8Rng) -> Verdict {
    let mut ck = Checks::new();
    let s5 = 5f64.sqrt();
    let mut worst_ev: f64 = 0.0;
    let mut worst_hat: f64 = 0.0;
    for i in 0..20 {
        let k = if i == 0 { 1.0 } else { rng.gen_range(0.1..5.0) };
        let fx = match reversible_five_cycle(k) {
            Ok(f) => f,
            Err(e) => return Verdict::new(false, e.to_string()),
        };
        let lo = (-5.0 + s5) * k / 2.0;
        let hi = (-5.0 - s5) * k / 2.0;
        let want = real_multiset(&[0.0, lo, lo, hi, hi]);
        worst_ev = worst_ev.max(spectrum_distance(&want, &numeric_spectrum(fx.model.a())));
        match lump_fixture(&fx.model, &fx.q) {
            Ok(l) => worst_hat = worst_hat.max(diag_error(&l.a_hat, &[c(0.0), c(hi), c(hi)])),
            Err(e) => {
                ck.check(false, format!("k={k}: {e}"));
            }
        }
    }
    ck.check(worst_ev <= 1e-9, format!("spectrum off by {worst_ev:.2e}"));
    ck.check(worst_hat <= 1e-9, format!("A_hat off by {worst_hat:.2e}"));
    ck.note(format!(
        "20 values of k: spectrum within {worst_ev:.1e}, A_hat = diag(0, -(5+sqrt5)k/2, -(5+sqrt5)k/2) within {worst_hat:.1e}"
    ));
    ck.verdict()
}

fn random_two_row(rng: &mut ChaCha8Rng) -> Matrix<f64> {
    let n = rng.gen_range(2..8);
    let integer = rng.gen_bool(0.5);
    Matrix::from_fn(2, n, |_, _| {
        if integer {
            f64::from(rng.gen_range(-4i32..=4))
        } else {
            rng.gen_range(-5.0..5.0)
        }
    })
}

fn ac8(rng: &mut ChaCha8Rng) -> Verdict {
    let mut ck = Checks::new();
    let tol = Tolerances::default();
    match exists_nonneg_p(&appendix_nonneg_q(2.0), &tol) {
        Ok(cert) => {
            ck.check(
                !cert.feasible && cert.reason == Some(Infeasibility::SlopeRule),
                format!("appendix Q: feasible={} reason={:?}", cert.feasible, cert.reason),
            );
        }
        Err(e) => {
            ck.check(false, e.to_string());
        }
    }
    let r = |n: i64, d: i64| Ratio::new(n, d);
    let q = appendix_nonneg_q(18.0).map(|&x| r(x as i64, 1));
    let p = appendix_nonneg_p().map(|&x| r((2.0 * x) as i64, 2));
    let want = Matrix::from_rows(&[[r(15, 1), r(2, 1), r(13, 1), r(2, 1)], [r(21, 2), r(1, 1), r(5, 1), r(5, 2)]])
        .expect("rows");
    match verify_nonneg_witness(&q, &p) {
        Ok((pq, _)) => {
            ck.check(pq == want, format!("exact PQ = {pq:?}"));
        }
        Err(e) => {
            ck.check(false, format!("printed witness: {e}"));
        }
    }
    match exists_nonneg_p(&appendix_nonneg_q(18.0), &tol) {
        Ok(cert) => {
            ck.check(cert.feasible, "a13 = 18 reported infeasible");
        }
        Err(e) => {
            ck.check(false, e.to_string());
        }
    }
    let mut agree = 0;
    let mut skipped = 0;
    let mut instances = 0;
    while instances < 10_000 {
        let q = random_two_row(rng);
        let cert = match exists_nonneg_p(&q, &tol) {
            Ok(c) => c,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        instances += 1;
        let oracle = nonneg_p_brute_force(&q, tol.sign * q.max_abs());
        let witness_ok = match cert.real_witness() {
            Some(p) => verify_nonneg_witness(&q, &p).is_ok(),
            None => true,
        };
        if cert.feasible == oracle && witness_ok {
            agree += 1;
        } else if ck.failures.len() < 3 {
            ck.check(false, format!("disagreement on {:?}", q.to_rows()));
        }
    }
    ck.check(agree == instances, format!("oracle agreement {agree}/{instances}"));
    ck.note(format!(
        "appendix Q infeasible by slope-rule; a13 = 18 witness PQ = [[15,2,13,2],[21/2,1,5,5/2]] exactly; oracle agreement {agree}/{instances} ({skipped} rank-deficient draws skipped)"
    ));
    ck.verdict()
}

fn random_complex(rng: &mut ChaCha8Rng) -> Matrix<C64> {
    let m = rng.gen_range(1..4);
    let n = m + rng.gen_range(1..5);
    let raw = Matrix::from_fn(m, n, |_, _| {
        C64::new(f64::from(rng.gen_range(-3i32..=3)), f64::from(rng.gen_range(-3i32..=3)))
    });
    if rng.gen_bool(0.5) {
        let mix = Matrix::from_fn(m, m, |_, _| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        mix.matmul(&raw.real_part().to_complex()).expect("shapes")
    } else {
        raw
    }
}

fn ac9(rng: &mut ChaCha8Rng) -> Verdict {
    let mut ck = Checks::new();
    let tol = Tolerances::default();
    let q = appendix_real_q();
    let coeff = build_real_coefficient_matrix(&q);
    let r = rank(&coeff, tol.rank);
    ck.check(r == 2, format!("coefficient matrix rank {r}"));
    match exists_real_p(&q, &RealSearch::default(), &tol) {
        Ok(cert) => {
            ck.check(cert.feasible, "appendix Q reported infeasible");
        }
        Err(e) => {
            ck.check(false, e.to_string());
        }
    }
    let rows: Vec<[f64; 4]> = APPENDIX_REAL_PICKS.iter().map(|&(a, b)| appendix_real_kernel_vector(a, b)).collect();
    let re = Matrix::from_fn(2, 2, |i, j| rows[i][j]);
    let im = Matrix::from_fn(2, 2, |i, j| rows[i][2 + j]);
    let (pq, det) = match p_from_parts(&re, &im).and_then(|p| real_witness_product(&q, &p)) {
        Ok(v) => v,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    ck.check(pq.max_imag() <= 1e-12 && det.norm() > 1e-9, "picked P does not give a real product");
    let corrected = Matrix::from_rows(&[[0.0, 3.0, 6.0, 0.0], [3.0, 9.0, 18.0, 6.0]]).expect("rows");
    let corrected_err = pq.real_part().sub(&corrected).expect("shape").max_abs();
    ck.check(corrected_err <= 1e-12, format!("PQ = {:?}", pq.real_part().to_rows()));
    let published = Matrix::from_rows(&APPENDIX_REAL_PUBLISHED_PQ).expect("rows");
    let literal_err = pq.real_part().sub(&published).expect("shape").max_abs();

    let mut agree = 0;
    let mut instances = 0;
    let mut skipped = 0;
    while instances < 1_000 {
        let q = random_complex(rng);
        let cert = match exists_real_p(&q, &RealSearch::default(), &tol) {
            Ok(c) => c,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        instances += 1;
        if cert.feasible == real_p_sampling(&q, 0xA11CE, 64) {
            agree += 1;
        }
    }
    ck.check(agree == instances, format!("oracle agreement {agree}/{instances}"));
    let base = ck.verdict();
    if !base.pass {
        return base;
    }
    let literal_ok = literal_err <= 1e-12;
    let mut v = Verdict::new(
        literal_ok,
        format!(
            "rank 2, feasible; printed picks give PQ = [[0,3,6,0],[3,9,18,6]], printed [[0,3,6,0],[3,9,18,8]] differs by {literal_err}; oracle agreement {agree}/{instances} ({skipped} rank-deficient draws skipped)"
        ),
    );
    if !literal_ok {
        v.erratum = Some("(2-3i)(2+2i) + (2-i)(-2) = 6, not 8".into());
    }
    v
}

fn closed_form_draws(rng: &mut ChaCha8Rng) -> (usize, f64, Vec<String>) {
    type Build = Box<dyn Fn(&mut ChaCha8Rng) -> Result<(CompartmentalModel, EigenSystem)>>;
    let rates = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(0.1..10.0)).collect() };
    let families: Vec<(&str, Build)> = vec![
        ("catenary", Box::new(move |r| catenary_irreversible(&rates(r, 4), &[0.0; 5]))),
        ("catenary-flows", Box::new(move |r| catenary_irreversible(&rates(r, 4), &rates(r, 5)))),
        ("mamillary-in", Box::new(move |r| mamillary_inward(&rates(r, 4)))),
        ("mamillary-out", Box::new(move |r| mamillary_outward(&rates(r, 4)))),
        ("mamillary-mixed", Box::new(move |r| mamillary_mixed_example(&rates(r, 5)))),
        ("circulant", Box::new(move |r| circulant_simplicial(&rates(r, 4), r.gen_range(0.0..3.0)))),
        (
            "circulant-symmetric",
            Box::new(move |r| {
                let v = rates(r, 2);
                circulant_simplicial(&[v[0], v[1], v[1], v[0]], r.gen_range(0.0..3.0))
            }),
        ),
        ("three-cycle", Box::new(move |r| three_cycle_eigensystem(&rates(r, 3)))),
        (
            "reversible-cycle",
            Box::new(move |r| {
                let m = r.gen_range(3..8);
                uniform_reversible_cycle(m, r.gen_range(0.1..10.0))
            }),
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut problems = Vec::new();
    let mut total = 0;
    for (name, build) in &families {
        let mut done = 0;
        let mut attempts = 0;
        while done < 100 && attempts < 10_000 {
            attempts += 1;
            let (model, sys) = match build(rng) {
                Ok(v) => v,
                Err(lumpkit_core::Error::NonRobustParameters(..)) => continue,
                Err(e) => {
                    problems.push(format!("{name}: {e}"));
                    break;
                }
            };
            done += 1;
            let d = spectrum_distance(&sys.eigenvalue_multiset(), &numeric_spectrum(model.a()));
            worst = worst.max(d);
            if d > 1e-9 {
                problems.push(format!("{name}: multiset distance {d:.2e}"));
            }
            if let Ok(rep) = verify_closed_form(model.a(), &sys, 1e-10) {
                if !rep.passed {
                    problems.push(format!("{name}: residual {:.2e}", rep.max_residual));
                }
            }
        }
        if done < 100 {
            problems.push(format!("{name}: only {done} robust draws"));
        }
        total += done;
    }
    (total, worst, problems)
}

fn ac10(rng: &mut ChaCha8Rng) -> Verdict {
    let mut ck = Checks::new();
    let tol = Tolerances::default();

    let grid: Vec<f64> = (0..20).map(|i| 0.25 + 0.5 * f64::from(i)).collect();
    let mut pairs: Vec<(f64, f64)> = grid.iter().flat_map(|&a| grid.iter().map(move |&b| (a, b))).collect();
    pairs.extend((0..40).map(|i| {
        let v = 0.05 + 0.3 * f64::from(i);
        (v, v)
    }));
    let mut grid_ok = 0;
    for &(k2, k4) in &pairs {
        match parallel_intermediates(&[1.3, k2, 0.7, k4]) {
            Ok((model, q)) => {
                if is_exactly_lumpable(model.a(), &q, tol.residual) == (k2 == k4) {
                    grid_ok += 1;
                }
            }
            Err(e) => {
                ck.check(false, e.to_string());
            }
        }
    }
    ck.check(grid_ok == pairs.len(), format!("counterexample grid {grid_ok}/{}", pairs.len()));

    let fixtures = match all_lumping_fixtures() {
        Ok(f) => f,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let times = uniform_grid(0.0, 10.0, 201);
    let mut worst_dev: f64 = 0.0;
    for fx in &fixtures {
        let n = fx.model.dim();
        for start in 0..n {
            let mut x0 = vec![0.0; n];
            x0[start] = 1.0;
            let dev = LumpingMatrix::new(fx.q.clone())
                .and_then(|q| verify_commutation(&fx.model, &q, &x0, &times, &tol));
            match dev {
                Ok(d) => worst_dev = worst_dev.max(d / fx.q.max_abs().max(1.0)),
                Err(e) => {
                    ck.check(false, format!("{}: {e}", fx.name));
                }
            }
        }
    }
    ck.check(worst_dev <= 1e-8, format!("commuting-diagram deviation {worst_dev:.2e}"));

    let mut farkas_ok = 0;
    let mut farkas_n = 0;
    while farkas_n < 500 {
        let m = rng.gen_range(1..4);
        let n = rng.gen_range(m + 1..7);
        let q = Matrix::from_fn(m, n, |_, _| if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(0.1..5.0) });
        if rank(&q, 1e-10) < m {
            continue;
        }
        farkas_n += 1;
        match farkas_row_test(&q, 1e-12) {
            Ok(res) => {
                if res.has_nonneg_geninverse == nonneg_right_inverse_brute_force(&q).is_some() {
                    farkas_ok += 1;
                }
            }
            Err(e) => {
                ck.check(false, e.to_string());
            }
        }
    }
    ck.check(farkas_ok == farkas_n, format!("Farkas agreement {farkas_ok}/{farkas_n}"));

    let mut extrema_fixtures = 0;
    let mut extrema_bad = Vec::new();
    let mut lumped_sets: Vec<(String, CompartmentalModel, Matrix<C64>)> =
        fixtures.iter().map(|f| (f.name.to_string(), f.model.clone(), f.q.clone())).collect();
    if let Ok((model, q)) = parallel_intermediates(&[1.0, 2.0, 3.0, 2.0]) {
        lumped_sets.push(("parallel-intermediates-k2=k4".into(), model, q.to_complex()));
    }
    for (name, model, q) in &lumped_sets {
        if q.max_imag() > 0.0 {
            continue;
        }
        let Ok(l) = lump_fixture(model, q) else { continue };
        let Some(small) = l.to_real_model(1e-12) else { continue };
        let spectrum = numeric_spectrum(small.a());
        if spectrum.iter().any(|z| z.im.abs() > 1e-12 * (1.0 + z.norm())) {
            continue;
        }
        extrema_fixtures += 1;
        let n_hat = small.dim();
        let Ok(times) = default_grid(small.a()) else { continue };
        for start in 0..model.dim() {
            let mut x0 = vec![0.0; model.dim()];
            x0[start] = 1.0;
            let Ok(xh0) = q.real_part().mul_vec(&x0) else { continue };
            let Ok(tr) = simulate(&small, &xh0, &times) else { continue };
            for i in 0..n_hat {
                match count_local_extrema(&tr, i) {
                    Ok(count) if count <= n_hat.saturating_sub(2) => {}
                    Ok(count) => extrema_bad.push(format!("{name} x{i}: {count}")),
                    Err(e) => extrema_bad.push(format!("{name}: {e}")),
                }
            }
        }
    }
    ck.check(extrema_bad.is_empty(), format!("extrema bound violated: {extrema_bad:?}"));

    let (draws, worst_ms, problems) = closed_form_draws(rng);
    ck.check(problems.is_empty(), format!("closed forms: {problems:?}"));

    ck.note(format!(
        "counterexample {grid_ok}/{} grid points; commuting deviation {worst_dev:.1e} on {} fixtures; Farkas {farkas_ok}/{farkas_n}; extrema bound on {extrema_fixtures} real lumped systems; closed forms {draws} draws, multiset distance {worst_ms:.1e}",
        pairs.len(),
        fixtures.len()
    ));
    ck.verdict()
}

fn main() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    type Criterion<'a> = (&'a str, &'a str, Duration, Box<dyn FnOnce(&mut ChaCha8Rng) -> Verdict>);
    let criteria: Vec<Criterion> = vec![
        ("AC1", "reversible chain", Duration::from_secs(1), Box::new(|_| ac1())),
        ("AC2", "flowed catenary", Duration::from_secs(60), Box::new(ac2)),
        ("AC3", "nonuniform chain", Duration::from_secs(60), Box::new(ac3)),
        ("AC4", "mamillary fixtures", Duration::from_secs(60), Box::new(ac4)),
        ("AC5", "reversible mamillary", Duration::from_secs(60), Box::new(ac5)),
        ("AC6", "irreversible three-cycle", Duration::from_secs(30), Box::new(|_| ac6())),
        ("AC7", "reversible five-cycle", Duration::from_secs(60), Box::new(ac7)),
        ("AC8", "nonnegative PQ", Duration::from_secs(60), Box::new(ac8)),
        ("AC9", "real PQ", Duration::from_secs(60), Box::new(ac9)),
        ("AC10", "property suite", Duration::from_secs(180), Box::new(ac10)),
    ];
    let mut hard_failures = 0;
    let mut errata = 0;
    for (id, title, budget, run) in criteria {
        let t = Instant::now();
        let mut v = run(&mut rng);
        let elapsed = t.elapsed();
        if elapsed > budget {
            v.pass = false;
            v.erratum = None;
            v.detail = format!("{} (took {:.2?}, budget {:.0?})", v.detail, elapsed, budget);
        }
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id} {title}: {} [{:.2?}]", v.detail, elapsed);
        if !v.pass {
            match &v.erratum {
                Some(why) => {
                    println!("       known erratum in the printed value: {why}");
                    errata += 1;
                }
                None => hard_failures += 1,
            }
        }
    }
    let total = start.elapsed();
    println!("total {:.2?}", total);
    if total > Duration::from_secs(180) {
        println!("[FAIL] runtime over 3 min");
        hard_failures += 1;
    }
    println!(
        "{} criteria failed outright, {errata} failed only on inconsistent printed values",
        hard_failures
    );
    if hard_failures > 0 {
        std::process::exit(1);
    }
}

use lumpkit_core::linalg::Matrix;
use lumpkit_core::model::{
    default_labels, derive_ode, induce_reaction_network, is_mass_conserving, validate_kinetic, Openness,
};
use lumpkit_core::CompartmentalModel;
use num_rational::Ratio;
use proptest::prelude::*;

type Q = Ratio<i64>;

/// Kinetic generalized compartmental model built from nonnegative transfer
/// rates `k[m][p]`, outflows `d` and inflows `b` so that the induced
/// network is known in advance.
fn generalized_model(n: usize) -> impl Strategy<Value = (CompartmentalModel<Q>, bool)> {
    (
        prop::collection::vec(prop_oneof![Just(0i64), 1i64..6], n * n),
        prop::collection::vec(prop_oneof![Just(0i64), 1i64..4], n),
        prop::collection::vec(prop_oneof![Just(0i64), 1i64..4], n),
        prop::sample::subsequence((1u32..=6).collect::<Vec<_>>(), n).prop_shuffle(),
        prop::bool::ANY,
    )
        .prop_map(move |(k, d, b, y, unit)| {
            let y: Vec<u32> = if unit { vec![1; n] } else { y };
            let yq: Vec<Q> = y.iter().map(|&v| Q::from_integer(v.into())).collect();
            let rate = |m: usize, p: usize| if m == p { 0 } else { k[m * n + p].max(i64::from(m + 1 == p || p + 1 == m)) };
            let mut a = Matrix::from_fn(n, n, |m, p| if m == p { Q::from_integer(0) } else { Q::from_integer(rate(m, p)) * yq[m] });
            for p in 0..n {
                let through: Q = (0..n).filter(|&m| m != p).map(|m| Q::from_integer(rate(m, p))).sum();
                a[(p, p)] = -(through + Q::from_integer(d[p])) * yq[p];
            }
            let b: Vec<Q> = b.iter().zip(&yq).map(|(&v, y)| Q::from_integer(v) * y).collect();
            let closed = d.iter().all(|&v| v == 0) && b.iter().all(|v| *v == Q::from_integer(0));
            (CompartmentalModel::new(default_labels("X", n), a, b, y).unwrap(), closed)
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn induced_network_round_trips((model, closed) in (2usize..5).prop_flat_map(generalized_model)) {
        let net = induce_reaction_network(&model).unwrap();
        let back = derive_ode(&net).unwrap();
        prop_assert_eq!(back.a(), model.a());
        prop_assert_eq!(back.b(), model.b());
        prop_assert_eq!(back.y(), model.y());
        prop_assert_eq!(is_mass_conserving(&net).unwrap(), closed);
        prop_assert_eq!(net.classification() == Openness::Closed, closed);
        let report = validate_kinetic(&model);
        prop_assert!(report.is_kinetic);
        if model.y().iter().all(|&v| v == 1) {
            prop_assert!(report.is_compartmental);
            prop_assert_eq!(model.column_sum_defect() == Q::from_integer(0), d_free(&model));
        }
    }
}

fn d_free(model: &CompartmentalModel<Q>) -> bool {
    let n = model.dim();
    (0..n).all(|p| (0..n).map(|m| model.a()[(m, p)]).sum::<Q>() == Q::from_integer(0))
}

#[test]
fn exponential_growth_has_no_compartmental_network() {
    let m = CompartmentalModel::from_matrix(Matrix::from_rows(&[[1.0]]).unwrap()).unwrap();
    assert!(!validate_kinetic(&m).is_compartmental);
    assert!(induce_reaction_network(&m).is_err());
}

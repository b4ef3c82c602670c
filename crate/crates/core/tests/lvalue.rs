use proptest::prelude::*;

use shatwist::curves::WeierstrassModel;
use shatwist::lvalue::{analytic_sha, l_value, table_length, terms_needed, vanishing_threshold, AnalyticSha};
use shatwist::Error;

fn model(a: [i64; 5]) -> WeierstrassModel {
    WeierstrassModel::from_ints(a).unwrap()
}

#[test]
fn known_central_values() {
    // 11a1, 32a2, 14a1
    let cases: [([i64; 5], f64); 3] = [
        ([0, -1, 1, -10, -20], 0.253_841_860_855_911),
        ([0, 0, 0, -1, 0], 0.655_514_388_573_029_9),
        ([1, 0, 1, 4, -6], 0.330_223_659_344_477_7),
    ];
    for (a, want) in cases {
        let l = l_value(&model(a), 12).unwrap();
        assert_eq!(l.root_sign, 1);
        assert!((l.value.to_f64() - want).abs() < 1e-11, "{a:?}: {}", l.value);
    }
}

#[test]
fn odd_sign_and_vanishing() {
    let m = model([0, 0, 1, -1, 0]);
    assert_eq!(l_value(&m, 8).unwrap().root_sign, -1);
    assert!(matches!(analytic_sha(&m, 8), Err(Error::VanishingL { .. })));
}

#[test]
fn rank_zero_orders() {
    for a in [[0, -1, 1, -10, -20], [0, 0, 0, -1, 0], [0, 4, 0, 0, -16], [0, -1, 0, -8, -16]] {
        assert_eq!(analytic_sha(&model(a), 10).unwrap().require_certified().unwrap(), 1, "{a:?}");
    }
    // 571a1 has |Ш| = 4
    let sha = analytic_sha(&model([0, -1, 1, -929, -10595]), 10).unwrap();
    assert_eq!(sha.require_certified().unwrap(), 4);
}

#[test]
fn certification_window() {
    assert!(AnalyticSha::from_raw(9.005).certified);
    assert!(!AnalyticSha::from_raw(9.02).certified);
    assert!(!AnalyticSha::from_raw(8.0).certified);
    assert!(matches!(AnalyticSha::from_raw(2.0).require_certified(), Err(Error::Certification { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn term_count_grows_with_conductor_and_digits(n in 1.0f64..1e12, k in 1u32..20) {
        let m = terms_needed(n, k);
        prop_assert!(m >= 1);
        prop_assert!(terms_needed(n * 2.0, k) >= m);
        prop_assert!(terms_needed(n, k + 1) >= m);
        prop_assert!(table_length(n, k) >= m);
        // with |a_n| ≤ n the tail 2·Σ_{n>m} q^n is below 10^-k
        let q = (-2.0 * std::f64::consts::PI / n.sqrt()).exp();
        prop_assert!(2.0 * q.powf(m as f64 + 1.0) / (1.0 - q) <= 10f64.powi(-(k as i32)) * 1.0001);
    }

    #[test]
    fn threshold_halves_the_digits(k in 1u32..30) {
        prop_assert!((vanishing_threshold(k).log10() + k as f64 / 2.0).abs() < 1e-9);
    }
}

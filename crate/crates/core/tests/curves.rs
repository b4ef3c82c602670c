use num_bigint::BigInt;
use proptest::prelude::*;

use shatwist::arith::{kronecker, primes_up_to};
use shatwist::curves::{
    ap_bsgs, ap_naive, c_infinity, minimal_model, mod_u64, real_period, torsion_order, torsion_order_exhaustive,
    CurveInvariants, WeierstrassModel,
};
use shatwist::family::family_models;

fn curve() -> impl Strategy<Value = WeierstrassModel> {
    (0i64..=1, -1i64..=1, 0i64..=1, -500i64..=500, -500i64..=500)
        .prop_filter_map("singular", |(a1, a2, a3, a4, a6)| WeierstrassModel::from_ints([a1, a2, a3, a4, a6]).ok())
}

fn curve_without_a1_a3() -> impl Strategy<Value = WeierstrassModel> {
    (-1i64..=1, -500i64..=500, -500i64..=500)
        .prop_filter_map("singular", |(a2, a4, a6)| WeierstrassModel::from_ints([0, a2, 0, a4, a6]).ok())
}

fn good_prime(m: &WeierstrassModel, lo: u64, hi: u64) -> impl Strategy<Value = u64> {
    let disc = m.discriminant();
    let primes: Vec<u64> = primes_up_to(hi)
        .into_iter()
        .filter(|&p| p >= lo && mod_u64(&disc, p) != 0)
        .collect();
    proptest::sample::select(primes)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn bsgs_agrees_with_naive_count((m, p) in curve().prop_flat_map(|m| {
        let p = good_prime(&m, 5, 1 << 16);
        (Just(m), p)
    })) {
        let a = ap_naive(&m, p);
        prop_assert_eq!(ap_bsgs(&m, p), a);
        prop_assert!((a * a) as u64 <= 4 * p);
    }

    #[test]
    fn quadratic_twist_multiplies_by_the_character(
        (m, p) in curve_without_a1_a3().prop_flat_map(|m| {
            let p = good_prime(&m, 5, 2000);
            (Just(m), p)
        }),
        d in prop::sample::select(vec![-7i64, -3, -1, 2, 3, 5, 6, 10, 13, 21]),
    ) {
        prop_assume!(d.unsigned_abs() % p != 0);
        let twisted = m.quadratic_twist(d).unwrap();
        prop_assert_eq!(ap_naive(&twisted, p), kronecker(d, p as i64) as i64 * ap_naive(&m, p));
    }

    #[test]
    fn torsion_shortcuts_agree_with_lutz_nagell(m in curve()) {
        let (min, _) = minimal_model(&m).unwrap();
        prop_assert_eq!(torsion_order(&min).unwrap(), torsion_order_exhaustive(&min).unwrap());
    }
}

#[test]
fn torsion_on_curves_with_large_torsion() {
    // 15a1 (8), 11a1 (5), 14a1 (6), 90c3 (12), 32a2 (Z/2 × Z/2), 36a1 (6)
    let cases: [([i64; 5], u64); 6] = [
        ([1, 1, 1, -10, -10], 8),
        ([0, -1, 1, -10, -20], 5),
        ([1, 0, 1, 4, -6], 6),
        ([1, -1, 1, -122, 1721], 12),
        ([0, 0, 0, -1, 0], 4),
        ([0, 0, 0, 0, 1], 6),
    ];
    for (a, want) in cases {
        let m = WeierstrassModel::from_ints(a).unwrap();
        assert_eq!(torsion_order(&m).unwrap(), want, "{m}");
        assert_eq!(torsion_order_exhaustive(&m).unwrap(), want, "{m}");
    }
}

#[test]
fn torsion_on_family_twists() {
    let point = family_models(5, 2).unwrap();
    for d in [1i64, 5, 7, 11, 73] {
        for m in &point.models {
            let (min, _) = minimal_model(&m.quadratic_twist(d).unwrap()).unwrap();
            assert_eq!(torsion_order(&min).unwrap(), torsion_order_exhaustive(&min).unwrap(), "d = {d}");
        }
    }
}

fn to_f64(n: &BigInt) -> f64 {
    n.to_string().parse().unwrap()
}

/// Least positive real period by quadrature: ∫ over x ≥ e of dx/√(g(x)/4)
/// with g = 4x³ + b2x² + 2b4x + b6 and e its largest real root.
fn period_by_quadrature(m: &WeierstrassModel) -> f64 {
    let (b2, b4, b6) = (to_f64(&m.b2()), to_f64(&m.b4()), to_f64(&m.b6()));
    let h = |x: f64| x * x * x + b2 / 4.0 * x * x + b4 / 2.0 * x + b6 / 4.0;
    let mut hi = 1.0;
    while h(hi) <= 0.0 || h(-hi) >= 0.0 {
        hi *= 2.0;
    }
    // largest root: bisect from the right end
    let mut lo = -hi;
    let mut top = hi;
    let step = (top - lo) / 4096.0;
    let mut x = top;
    while x > lo && h(x) > 0.0 {
        x -= step;
    }
    lo = x;
    for _ in 0..200 {
        let mid = 0.5 * (lo + top);
        if h(mid) > 0.0 {
            top = mid;
        } else {
            lo = mid;
        }
    }
    let e = top;
    // h(x) = (x − e)·q(x); x = e + t², t = s/(1 − s)
    let q = |x: f64| h(x) / (x - e);
    let f = |s: f64| {
        if s <= 0.0 {
            return 2.0 / (3.0 * e * e + b2 / 2.0 * e + b4 / 2.0).sqrt();
        }
        if s >= 1.0 {
            return 2.0;
        }
        let t = s / (1.0 - s);
        let x = e + t * t;
        let qx = if t < 1e-4 { 3.0 * e * e + b2 / 2.0 * e + b4 / 2.0 } else { q(x) };
        2.0 / qx.sqrt() / ((1.0 - s) * (1.0 - s))
    };
    let n = 200_000;
    let hstep = 1.0 / n as f64;
    let mut sum = f(0.0) + f(1.0);
    for i in 1..n {
        sum += f(i as f64 * hstep) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * hstep / 3.0
}

#[test]
fn periods_match_quadrature() {
    let models = [
        [0, 0, 0, -1, 0],
        [0, 0, 0, 0, -1],
        [0, 4, 0, 0, -16],
        [0, -1, 0, -8, -16],
        [0, 0, 1, -1, 0],
        [0, -1, 1, -10, -20],
        [1, 0, 1, 4, -6],
    ];
    for a in models {
        let (m, _) = minimal_model(&WeierstrassModel::from_ints(a).unwrap()).unwrap();
        let omega = real_period(&m, 20).unwrap().to_f64();
        let oracle = period_by_quadrature(&m);
        assert!((omega - oracle).abs() < 1e-7 * oracle, "{m}: {omega} vs {oracle}");
    }
}

#[test]
fn c_infinity_counts_real_components() {
    let a = WeierstrassModel::from_ints([0, 0, 0, -1, 0]).unwrap();
    let inv = CurveInvariants::compute(&a, 20).unwrap();
    assert!((inv.c_infinity.to_f64() - 2.0 * inv.omega.to_f64()).abs() < 1e-12);
    let b = WeierstrassModel::from_ints([0, 0, 0, 0, -1]).unwrap();
    let omega = real_period(&b, 20).unwrap();
    assert_eq!(c_infinity(&b.discriminant(), omega).to_f64(), omega.to_f64());
}

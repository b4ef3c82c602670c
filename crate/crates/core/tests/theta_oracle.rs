use shatwist::arith::{condition_star, squarefree_stream, CurveLabel, FactoredInt};
use shatwist::theta::{builtin_spec, eta_product_oracle, theta_batch, theta_single, EtaSpec};

const LIMIT: u64 = 100_000;

fn compare(eta: EtaSpec, eligible: impl Fn(u64) -> bool) {
    let spec = match eta {
        EtaSpec::A1 => builtin_spec(CurveLabel::A, Some(1)),
        EtaSpec::A2 => builtin_spec(CurveLabel::A, Some(2)),
        EtaSpec::B => builtin_spec(CurveLabel::B, None),
    }
    .unwrap();
    let batch = theta_batch(&spec, LIMIT, 1).unwrap();
    let oracle = eta_product_oracle(eta, LIMIT).unwrap();
    let mut checked = 0;
    for d in 1..=LIMIT {
        if !eligible(d) {
            continue;
        }
        assert_eq!(batch.get(d), oracle.get(d), "{eta:?} d={d}");
        checked += 1;
    }
    assert!(checked > 1000);
}

#[test]
fn a1_matches_eta_product() {
    compare(EtaSpec::A1, |d| condition_star(CurveLabel::A, &FactoredInt::factor(d).unwrap()));
}

#[test]
fn a1_matches_eta_product_on_all_supported_residues() {
    // residue classes 1, 3 mod 8, square-free or not
    compare(EtaSpec::A1, |d| matches!(d % 8, 1 | 3));
}

#[test]
fn a2_matches_eta_product() {
    compare(EtaSpec::A2, |d| d % 2 == 1);
}

#[test]
fn b_matches_eta_product() {
    compare(EtaSpec::B, |d| condition_star(CurveLabel::B, &FactoredInt::factor(d).unwrap()));
}

#[test]
fn batch_matches_single_for_all_curves() {
    for curve in CurveLabel::ALL {
        let spec = builtin_spec(curve, None).unwrap();
        let batch = theta_batch(&spec, 20_000, 1).unwrap();
        for f in squarefree_stream(20_000, 4096).unwrap() {
            if !condition_star(curve, &f) {
                continue;
            }
            let d = f.value();
            let single = theta_single(&spec, d).unwrap();
            assert!(single.is_integer());
            assert_eq!(batch.get(d), Some(single.to_integer()), "{curve} d={d}");
        }
    }
}

#[test]
fn d_vanishes_on_three_mod_eight() {
    let mut spec = builtin_spec(CurveLabel::D, None).unwrap();
    spec.support = Some((56, (0..56).filter(|r| r % 8 == 3 && matches!(r % 7, 1 | 2 | 4)).collect()));
    let batch = theta_batch(&spec, LIMIT, 1).unwrap();
    for f in squarefree_stream(LIMIT, 1 << 16).unwrap() {
        let d = f.value();
        if spec.supports(d) {
            assert_eq!(batch.get(d), Some(0), "d={d}");
        }
    }
}

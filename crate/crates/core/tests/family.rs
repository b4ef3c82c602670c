use shatwist::family::{family_models, family_sha_row, FamilyContext, FamilyRow};
use shatwist::Error;

fn is_power_of_four(n: u64) -> bool {
    n.is_power_of_two() && n.trailing_zeros().is_multiple_of(2)
}

#[test]
fn small_rows_and_isogeny_ratios() {
    let mut ctx = FamilyContext::new(5, 2).unwrap();
    let expected: [(u64, [u64; 4]); 3] = [(1, [9, 36, 9, 144]), (5, [36, 576, 9, 576]), (11, [36, 576, 9, 576])];
    for (d, want) in expected {
        let row = ctx.row(d, 8).unwrap();
        let got: Vec<u64> = row.sha.iter().map(|s| s.require_certified().unwrap()).collect();
        assert_eq!(got, want, "d = {d}");
        // the four curves are 2-isogenous in a chain, so the orders differ by powers of 4
        for s in &got {
            let (hi, lo) = (*s.max(&got[0]), *s.min(&got[0]));
            assert!(hi % lo == 0 && is_power_of_four(hi / lo), "d = {d}: {got:?}");
        }
    }
}

#[test]
fn single_row_matches_context() {
    let mut ctx = FamilyContext::new(5, 2).unwrap();
    assert_eq!(ctx.row(1, 8).unwrap().sha, family_sha_row(5, 2, 1, 8).unwrap());
}

#[test]
fn vanishing_and_invalid_d() {
    let mut ctx = FamilyContext::new(5, 2).unwrap();
    assert!(matches!(ctx.row(7, 8), Err(Error::VanishingL { .. })));
    assert!(ctx.row(4, 8).is_err());
    assert!(family_models(5, 0).is_err());
}

#[test]
fn csv_row_layout() {
    let mut ctx = FamilyContext::new(5, 2).unwrap();
    let row = ctx.row(1, 8).unwrap();
    assert_eq!(FamilyRow::CSV_HEADER, "n,p,N,d,sha1,sha2,sha3,sha4");
    assert_eq!(row.csv_row(5, 2), "5,2,68024256,1,9,36,9,144");
}

use proptest::prelude::*;

use shatwist::arith::CurveLabel;
use shatwist::stats::{
    bin_index, checkpoint_grid, histogram, write_hist, HistogramSpec, StatSeries, BINS, BIN_START, BIN_WIDTH,
    DEFAULT_PRIMES,
};
use shatwist::twists::{scan, ScanOptions, TwistRecord};

fn records() -> impl Strategy<Value = Vec<TwistRecord>> {
    prop::collection::btree_map(1u64..5000, (0u64..12, prop::option::of(0.01f64..20.0)), 1..300).prop_map(|m| {
        m.into_iter()
            .map(|(d, (k, l))| TwistRecord {
                d,
                a: k as i64,
                sha: k * k,
                l_value: if k == 0 { Some(0.0) } else { l },
                c_fin: None,
            })
            .collect()
    })
}

fn series(records: &[TwistRecord]) -> StatSeries {
    let mut s = StatSeries::new(CurveLabel::A, 5000, &DEFAULT_PRIMES).unwrap();
    for r in records {
        s.accumulate(r).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn merging_disjoint_ranges_is_order_free(recs in records(), cut in 0usize..300) {
        let cut = cut.min(recs.len());
        let whole = series(&recs);
        let (lo, hi) = (series(&recs[..cut]), series(&recs[cut..]));
        let mut ab = lo.clone();
        ab.merge(&hi).unwrap();
        let mut ba = hi.clone();
        ba.merge(&lo).unwrap();
        prop_assert_eq!(ab.snapshots(), whole.snapshots());
        prop_assert_eq!(ba.snapshots(), whole.snapshots());
    }

    #[test]
    fn snapshots_are_monotone(recs in records()) {
        let snaps = series(&recs).snapshots();
        for w in snaps.windows(2) {
            let (a, b) = (&w[0].1, &w[1].1);
            prop_assert!(a.g <= b.g && a.eligible() <= b.eligible() && a.sha_sum <= b.sha_sum);
            for (k, &c) in &a.by_k {
                prop_assert!(c <= b.f_k(*k));
            }
            for (x, y) in a.by_p.iter().zip(&b.by_p) {
                prop_assert!(x <= y);
            }
        }
        let t = series(&recs).totals();
        prop_assert_eq!(t.f(), t.f_k(1));
        prop_assert_eq!(t.eligible(), recs.len() as u64);
        prop_assert_eq!(t.by_k.values().sum::<u64>() + t.g, recs.len() as u64);
    }

    #[test]
    fn histogram_tallies_every_record(recs in records()) {
        for spec in [HistogramSpec::keating_snaith(), HistogramSpec::sha_rs(CurveLabel::B)] {
            let h = histogram(&recs, &spec);
            prop_assert_eq!(h.values() + h.excluded, recs.len() as u64);
            let defined = recs.iter().filter(|r| spec.value(r).is_some()).count() as u64;
            prop_assert_eq!(h.values(), defined);
            let mut out = Vec::new();
            write_hist(&mut out, &h).unwrap();
            prop_assert_eq!(String::from_utf8(out).unwrap().lines().count(), BINS + 4);
        }
    }

    #[test]
    fn bins_cover_their_left_edges(i in 0usize..BINS, frac in 0.0f64..0.999) {
        let v = BIN_START + (i as f64 + frac) * BIN_WIDTH;
        prop_assert_eq!(bin_index(v), Some(i));
    }
}

#[test]
fn out_of_order_records_are_rejected() {
    let rec = |d| TwistRecord {
        d,
        a: 1,
        sha: 1,
        l_value: None,
        c_fin: None,
    };
    let mut s = StatSeries::new(CurveLabel::A, 100, &DEFAULT_PRIMES).unwrap();
    s.accumulate(&rec(5)).unwrap();
    assert!(s.accumulate(&rec(3)).is_err());
    assert!(s.accumulate(&rec(101)).is_err());
}

#[test]
fn grid_ends_at_the_limit() {
    assert_eq!(checkpoint_grid(5000), vec![1024, 2048, 4096, 5000]);
    assert_eq!(checkpoint_grid(100), vec![100]);
}

#[test]
fn scanned_series_counts_every_eligible_d() {
    for curve in CurveLabel::ALL {
        let recs: Vec<TwistRecord> = scan(curve, ScanOptions::new(20_000)).unwrap().map(Result::unwrap).collect();
        let mut s = StatSeries::new(curve, 20_000, &DEFAULT_PRIMES).unwrap();
        for r in &recs {
            s.accumulate(r).unwrap();
        }
        let t = s.totals();
        assert_eq!(t.eligible(), recs.len() as u64);
        assert_eq!(t.g, recs.iter().filter(|r| r.sha == 0).count() as u64);
        let p3 = recs.iter().filter(|r| r.sha != 0 && r.sha % 3 == 0).count() as u64;
        assert_eq!(t.by_p[1], p3, "{curve}");
    }
}

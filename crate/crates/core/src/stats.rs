//! Counting functions, Cohen–Lenstra densities, Delaunay means and
//! normalized histograms over a stream of twist records.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::io::Write;

use crate::arith::{is_prime_u64, isqrt_u64, CurveLabel};
use crate::error::{Error, Result};
use crate::twists::TwistRecord;

pub const FIRST_CHECKPOINT: u64 = 1 << 10;
pub const DEFAULT_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];
pub const DEFAULT_K_MAX: u64 = 7;

/// Additive counters for the d in one checkpoint bucket.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Counters {
    /// d with L(E_d,1) = 0.
    pub g: u64,
    /// d with |Ш| = k², keyed by k.
    pub by_k: BTreeMap<u64, u64>,
    /// d with p | |Ш|, aligned with the configured primes.
    pub by_p: Vec<u64>,
    pub sha_sum: u128,
    pub prime_sha_sum: u128,
    pub prime_count: u64,
}

impl Counters {
    fn with_primes(n: usize) -> Self {
        Counters {
            by_p: vec![0; n],
            ..Default::default()
        }
    }

    /// f_E(X): |Ш| = 1.
    pub fn f(&self) -> u64 {
        self.f_k(1)
    }

    pub fn f_k(&self, k: u64) -> u64 {
        self.by_k.get(&k).copied().unwrap_or(0)
    }

    /// F_E(X): d with L(E_d,1) ≠ 0.
    pub fn nonvanishing(&self) -> u64 {
        self.by_k.values().sum()
    }

    /// T*: the number of terms in M_E(T).
    pub fn terms(&self) -> u64 {
        self.nonvanishing()
    }

    pub fn eligible(&self) -> u64 {
        self.nonvanishing() + self.g
    }

    fn add(&mut self, other: &Counters) {
        self.g += other.g;
        for (&k, &c) in &other.by_k {
            *self.by_k.entry(k).or_insert(0) += c;
        }
        for (a, b) in self.by_p.iter_mut().zip(&other.by_p) {
            *a += b;
        }
        self.sha_sum += other.sha_sum;
        self.prime_sha_sum += other.prime_sha_sum;
        self.prime_count += other.prime_count;
    }
}

/// Running statistics on the grid 2¹⁰, 2¹¹, …, capped by `limit`.
#[derive(Clone, Debug, PartialEq)]
pub struct StatSeries {
    pub curve: CurveLabel,
    pub limit: u64,
    pub primes: Vec<u64>,
    pub checkpoints: Vec<u64>,
    buckets: Vec<Counters>,
    last_d: u64,
}

pub fn checkpoint_grid(limit: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut x = FIRST_CHECKPOINT;
    while x < limit {
        grid.push(x);
        x *= 2;
    }
    grid.push(limit);
    grid
}

impl StatSeries {
    pub fn new(curve: CurveLabel, limit: u64, primes: &[u64]) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidArgument("limit must be positive".into()));
        }
        let checkpoints = checkpoint_grid(limit);
        let buckets = vec![Counters::with_primes(primes.len()); checkpoints.len()];
        Ok(StatSeries {
            curve,
            limit,
            primes: primes.to_vec(),
            checkpoints,
            buckets,
            last_d: 0,
        })
    }

    pub fn accumulate(&mut self, rec: &TwistRecord) -> Result<()> {
        if rec.d <= self.last_d {
            return Err(Error::Contract(format!("d = {} arrived after {}", rec.d, self.last_d)));
        }
        if rec.d > self.limit {
            return Err(Error::InvalidArgument(format!("d = {} beyond the limit {}", rec.d, self.limit)));
        }
        let k = isqrt_u64(rec.sha);
        if k * k != rec.sha {
            return Err(Error::InvalidArgument(format!("|Ш| = {} is not a square", rec.sha)));
        }
        self.last_d = rec.d;
        let i = self.checkpoints.partition_point(|&x| x < rec.d);
        let b = &mut self.buckets[i];
        if rec.sha == 0 {
            b.g += 1;
            return Ok(());
        }
        *b.by_k.entry(k).or_insert(0) += 1;
        for (slot, &p) in b.by_p.iter_mut().zip(&self.primes) {
            if k.is_multiple_of(p) {
                *slot += 1;
            }
        }
        b.sha_sum += rec.sha as u128;
        if is_prime_u64(rec.d) {
            b.prime_sha_sum += rec.sha as u128;
            b.prime_count += 1;
        }
        Ok(())
    }

    /// Combines statistics from a disjoint d-range.
    pub fn merge(&mut self, other: &StatSeries) -> Result<()> {
        if self.curve != other.curve || self.limit != other.limit || self.primes != other.primes {
            return Err(Error::InvalidArgument("merging incompatible series".into()));
        }
        for (a, b) in self.buckets.iter_mut().zip(&other.buckets) {
            a.add(b);
        }
        self.last_d = self.last_d.max(other.last_d);
        Ok(())
    }

    /// Cumulative counters at every checkpoint.
    pub fn snapshots(&self) -> Vec<(u64, Counters)> {
        let mut acc = Counters::with_primes(self.primes.len());
        self.checkpoints
            .iter()
            .zip(&self.buckets)
            .map(|(&x, b)| {
                acc.add(b);
                (x, acc.clone())
            })
            .collect()
    }

    pub fn totals(&self) -> Counters {
        self.snapshots().pop().map(|(_, c)| c).expect("grid is nonempty")
    }

    /// f_E(p, X) = F_E(p, X)/F_E(X) at the end of the scan.
    pub fn cl_ratio(&self, p: u64) -> Option<f64> {
        let i = self.primes.iter().position(|&q| q == p)?;
        let t = self.totals();
        (t.nonvanishing() > 0).then(|| t.by_p[i] as f64 / t.nonvanishing() as f64)
    }
}

/// (k_E, K_E): the end of the gap-free run of k, and the largest k seen.
pub fn k_and_big_k(series: &StatSeries) -> Result<(u64, u64)> {
    let t = series.totals();
    let big_k = *t.by_k.keys().next_back().ok_or(Error::Empty)?;
    let mut k = 0;
    while t.by_k.contains_key(&(k + 1)) {
        k += 1;
    }
    Ok((k, big_k))
}

/// 1 − ∏_{j≥1} (1 − p^{1−2j}).
pub fn delaunay_f0(p: u64) -> f64 {
    let p = p as f64;
    let mut prod = 1.0;
    let mut term = 1.0 / p;
    while term > 1e-15 {
        prod *= 1.0 - term;
        term /= p * p;
    }
    1.0 - prod
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelaunayRow {
    pub t: u64,
    pub m: f64,
    pub n: f64,
    pub f: f64,
    pub g: f64,
    pub fstar: f64,
}

/// M_E(T), N_E(T) and their normalizations at each checkpoint. N_E is the
/// mean over prime d; the log correction (log T)^{5/8} applies to B and D.
pub fn delaunay_means(series: &StatSeries, use_log_correction: bool) -> Vec<DelaunayRow> {
    let corrected = use_log_correction && matches!(series.curve, CurveLabel::B | CurveLabel::D);
    series
        .snapshots()
        .into_iter()
        .map(|(t, c)| {
            let mean = |s: u128, n: u64| if n == 0 { 0.0 } else { s as f64 / n as f64 };
            let m = mean(c.sha_sum, c.terms());
            let n = mean(c.prime_sha_sum, c.prime_count);
            let root = (t as f64).sqrt();
            let f = m / root;
            let fstar = if corrected { (t as f64).ln().powf(5.0 / 8.0) * f } else { f };
            DelaunayRow {
                t,
                m,
                n,
                f,
                g: n / root,
                fstar,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Normalization {
    /// (log L + ½ log log d)/√(log log d).
    KeatingSnaith,
    /// (log(|Ш|/√d) − μ log log d)/√(σ² log log d).
    ShaRs { mu: f64, sigma2: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramSpec {
    pub normalization: Normalization,
}

pub const BINS: usize = 201;
pub const BIN_WIDTH: f64 = 0.1;
pub const BIN_START: f64 = -10.0;

impl HistogramSpec {
    pub fn keating_snaith() -> Self {
        HistogramSpec {
            normalization: Normalization::KeatingSnaith,
        }
    }

    pub fn sha_rs(curve: CurveLabel) -> Self {
        let l2 = LN_2 * LN_2;
        let (mu, sigma2) = match curve {
            CurveLabel::A => (-0.5 - 2.0 * LN_2, 1.0 + 4.0 * l2),
            CurveLabel::B | CurveLabel::D => (-0.5 - 1.5 * LN_2, 1.0 + 2.5 * l2),
            CurveLabel::C => (-0.5 - 5.0 / 6.0 * LN_2, 1.0 + 7.0 / 6.0 * l2),
        };
        HistogramSpec {
            normalization: Normalization::ShaRs { mu, sigma2 },
        }
    }

    /// The normalized value for one record; None when d < 3, L vanishes, or
    /// the needed L-value is missing.
    pub fn value(&self, rec: &TwistRecord) -> Option<f64> {
        if rec.d < 3 || rec.sha == 0 {
            return None;
        }
        let ll = (rec.d as f64).ln().ln();
        match self.normalization {
            Normalization::KeatingSnaith => {
                let l = rec.l_value.filter(|l| *l > 0.0)?;
                Some((l.ln() + 0.5 * ll) / ll.sqrt())
            }
            Normalization::ShaRs { mu, sigma2 } => {
                let x = (rec.sha as f64 / (rec.d as f64).sqrt()).ln();
                Some((x - mu * ll) / (sigma2 * ll).sqrt())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
    /// Records with no defined value (d ≤ 2, vanishing L, missing L).
    pub excluded: u64,
    pub sum: f64,
}

impl Default for Histogram {
    fn default() -> Self {
        Histogram {
            counts: vec![0; BINS],
            below: 0,
            above: 0,
            excluded: 0,
            sum: 0.0,
        }
    }
}

pub fn bin_index(v: f64) -> Option<usize> {
    let i = ((v - BIN_START) / BIN_WIDTH + 1e-9).floor();
    (i >= 0.0 && i < BINS as f64).then_some(i as usize)
}

impl Histogram {
    pub fn add(&mut self, spec: &HistogramSpec, rec: &TwistRecord) {
        let Some(v) = spec.value(rec) else {
            self.excluded += 1;
            return;
        };
        self.sum += v;
        match bin_index(v) {
            Some(i) => self.counts[i] += 1,
            None if v < BIN_START => self.below += 1,
            None => self.above += 1,
        }
    }

    pub fn values(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.below + self.above
    }

    pub fn mean(&self) -> Option<f64> {
        let n = self.values();
        (n > 0).then(|| self.sum / n as f64)
    }
}

pub fn histogram<'a>(records: impl IntoIterator<Item = &'a TwistRecord>, spec: &HistogramSpec) -> Histogram {
    let mut h = Histogram::default();
    for r in records {
        h.add(spec, r);
    }
    h
}

pub fn write_freq_k<W: Write>(mut w: W, series: &StatSeries, k_max: u64) -> Result<()> {
    writeln!(w, "X,k,count")?;
    for (x, c) in series.snapshots() {
        for k in 1..=k_max {
            writeln!(w, "{x},{k},{}", c.f_k(k))?;
        }
    }
    Ok(())
}

pub fn write_cl<W: Write>(mut w: W, series: &StatSeries) -> Result<()> {
    writeln!(w, "X,p,F_p,F,ratio")?;
    for (x, c) in series.snapshots() {
        let total = c.nonvanishing();
        for (&p, &fp) in series.primes.iter().zip(&c.by_p) {
            let ratio = if total == 0 { 0.0 } else { fp as f64 / total as f64 };
            writeln!(w, "{x},{p},{fp},{total},{ratio:.6}")?;
        }
    }
    Ok(())
}

pub fn write_delaunay<W: Write>(mut w: W, rows: &[DelaunayRow]) -> Result<()> {
    writeln!(w, "T,M,N,f,g,fstar")?;
    for r in rows {
        writeln!(w, "{},{:.6},{:.6},{:.6},{:.6},{:.6}", r.t, r.m, r.n, r.f, r.g, r.fstar)?;
    }
    Ok(())
}

/// Bin rows, then the below/above/excluded tallies.
pub fn write_hist<W: Write>(mut w: W, h: &Histogram) -> Result<()> {
    writeln!(w, "bin_left,count")?;
    for (i, c) in h.counts.iter().enumerate() {
        writeln!(w, "{:.1},{c}", BIN_START + i as f64 * BIN_WIDTH)?;
    }
    writeln!(w, "below,{}", h.below)?;
    writeln!(w, "above,{}", h.above)?;
    writeln!(w, "excluded,{}", h.excluded)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(d: u64, sha: u64) -> TwistRecord {
        TwistRecord {
            d,
            a: 1,
            sha,
            l_value: None,
            c_fin: None,
        }
    }

    #[test]
    fn single_record() {
        let mut s = StatSeries::new(CurveLabel::A, 10, &DEFAULT_PRIMES).unwrap();
        s.accumulate(&rec(1, 1)).unwrap();
        assert_eq!(s.totals().f(), 1);
        let rows = delaunay_means(&s, true);
        assert_eq!(rows.last().unwrap().m, 1.0);
    }

    #[test]
    fn thirty_six() {
        let mut s = StatSeries::new(CurveLabel::A, 100, &DEFAULT_PRIMES).unwrap();
        s.accumulate(&rec(5, 36)).unwrap();
        s.accumulate(&rec(7, 0)).unwrap();
        let t = s.totals();
        assert_eq!(t.by_p, vec![1, 1, 0, 0, 0]);
        assert_eq!(t.f_k(6), 1);
        assert_eq!(t.g, 1);
        assert!(s.accumulate(&rec(6, 1)).is_err());
        assert!(s.accumulate(&rec(11, 8)).is_err());
    }

    #[test]
    fn gaps_in_k() {
        let mut s = StatSeries::new(CurveLabel::B, 100, &DEFAULT_PRIMES).unwrap();
        assert!(matches!(k_and_big_k(&s), Err(Error::Empty)));
        for (d, sha) in [(1, 1), (5, 4), (13, 16)] {
            s.accumulate(&rec(d, sha)).unwrap();
        }
        assert_eq!(k_and_big_k(&s).unwrap(), (2, 4));
    }

    #[test]
    fn grid() {
        assert_eq!(checkpoint_grid(5000), vec![1024, 2048, 4096, 5000]);
        assert_eq!(checkpoint_grid(1024), vec![1024]);
        assert_eq!(checkpoint_grid(10), vec![10]);
    }

    #[test]
    fn f0_values() {
        for (p, v) in [(2, 0.580577), (3, 0.360995), (7, 0.145408)] {
            assert!((delaunay_f0(p) - v).abs() < 1e-6);
        }
        // 1 − (1 − 1/5)(1 − 1/125)(1 − 1/3125)… = 0.2066645…
        assert!((delaunay_f0(5) - 0.2066645).abs() < 1e-7);
        assert!((delaunay_f0(11) - 0.092).abs() < 1e-3);
    }

    #[test]
    fn bins() {
        assert_eq!(bin_index(0.0), Some(100));
        assert_eq!(bin_index(-10.0), Some(0));
        assert_eq!(bin_index(10.05), Some(200));
        assert_eq!(bin_index(10.1), None);
        assert_eq!(bin_index(-10.01), None);
        let h = histogram(std::iter::empty(), &HistogramSpec::keating_snaith());
        assert!(h.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn constants_for_c() {
        let Normalization::ShaRs { mu, sigma2 } = HistogramSpec::sha_rs(CurveLabel::C).normalization else {
            panic!()
        };
        assert!((mu - (-0.5 - 5.0 / 6.0 * LN_2)).abs() < 1e-15);
        assert!((sigma2 - (1.0 + 7.0 / 6.0 * LN_2 * LN_2)).abs() < 1e-15);
    }
}

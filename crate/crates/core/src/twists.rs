//! Quadratic twists of the four base curves and the closed forms for
//! |Ш(E_d)| and L(E_d,1) in terms of the theta coefficients a(d).

use std::collections::HashMap;
use std::io::Write;
use std::sync::OnceLock;

use crate::arith::{
    b_curve_l_invariant, condition_star, divisor_count, legendre, squarefree_stream, CurveLabel,
    FactoredInt, SquarefreeStream, DEFAULT_WINDOW,
};
use crate::curves::{minimal_model, real_period, tate_local, LocalData, WeierstrassModel};
use crate::error::{Error, Result};
use crate::lvalue::{analytic_sha, l_value};
use crate::theta::{builtin_spec, theta_batch, theta_batch_range, theta_single, CoeffTable, ThetaSpec, FULL_TABLE_MAX};

/// Digits used for the cached reference constants.
pub const REFERENCE_DIGITS: u32 = 15;

#[derive(Clone, Debug, PartialEq)]
pub struct TwistRecord {
    pub d: u64,
    pub a: i64,
    /// |Ш(E_d)|; 0 when L(E_d,1) = 0.
    pub sha: u64,
    pub l_value: Option<f64>,
    pub c_fin: Option<u64>,
}

impl TwistRecord {
    pub const CSV_HEADER: &'static str = "d,a,sha,cfin,lvalue";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{}",
            self.d,
            self.a,
            opt((self.sha != 0).then(|| self.sha.to_string())),
            opt(self.c_fin.map(|c| c.to_string())),
            opt(self.l_value.map(|l| l.to_string())),
        )
    }

    /// Inverse of [`TwistRecord::csv_row`].
    pub fn parse_csv_row(line: &str) -> Result<Self> {
        let bad = || Error::Format(format!("bad scan row {line:?}"));
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 5 {
            return Err(bad());
        }
        let opt_u64 = |s: &str| -> Result<Option<u64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad())
            }
        };
        Ok(TwistRecord {
            d: f[0].parse().map_err(|_| bad())?,
            a: f[1].parse().map_err(|_| bad())?,
            sha: opt_u64(f[2])?.unwrap_or(0),
            c_fin: opt_u64(f[3])?,
            l_value: if f[4].is_empty() { None } else { Some(f[4].parse().map_err(|_| bad())?) },
        })
    }
}

fn base_coefficients(curve: CurveLabel) -> [i64; 5] {
    match curve {
        CurveLabel::A => [0, 0, 0, -1, 0],
        CurveLabel::B => [0, 0, 0, 0, -1],
        CurveLabel::C => [0, 4, 0, 0, -16],
        CurveLabel::D => [0, -1, 0, -8, -16],
    }
}

/// The base curve E itself.
pub fn base_model(curve: CurveLabel) -> WeierstrassModel {
    WeierstrassModel::from_ints(base_coefficients(curve)).expect("base curves are nonsingular")
}

/// E_d for an eligible square-free d.
pub fn twist_model(curve: CurveLabel, d: u64) -> Result<WeierstrassModel> {
    let f = FactoredInt::factor(d)?;
    if !condition_star(curve, &f) {
        return Err(Error::NotEligible { curve, d });
    }
    base_model(curve).quadratic_twist(d as i64)
}

/// A_{id}: y² = x³ − (2^{i−1}d)²x for odd square-free d.
pub fn twist_model_a(variant: u8, d: u64) -> Result<WeierstrassModel> {
    let f = FactoredInt::factor(d)?;
    if !f.is_squarefree() || d.is_multiple_of(2) {
        return Err(Error::NotEligible { curve: CurveLabel::A, d });
    }
    let scale = match variant {
        1 => 1,
        2 => 2,
        v => return Err(Error::UnknownVariant { curve: CurveLabel::A, variant: v }),
    };
    base_model(CurveLabel::A).quadratic_twist(scale * d as i64)
}

fn square_of_quotient(a: i64, q: i64, what: &str) -> Result<u64> {
    if a % q != 0 {
        return Err(Error::NonIntegral(format!("{what}: {a}/{q}")));
    }
    let r = (a / q).unsigned_abs();
    Ok(r * r)
}

/// |Ш(E_d)| from a(d) and the local data of E_d (used for C and D).
pub fn sha_closed_form(curve: CurveLabel, d: &FactoredInt, a: i64, local: &[LocalData]) -> Result<u64> {
    let c_fin = local.iter().map(|l| l.tamagawa as u64).product();
    sha_from_cfin(curve, d, a, c_fin)
}

/// As [`sha_closed_form`] with the Tamagawa product already known.
pub fn sha_from_cfin(curve: CurveLabel, d: &FactoredInt, a: i64, c_fin: u64) -> Result<u64> {
    if a == 0 {
        return Err(Error::InvalidArgument("a(d) = 0: L(E_d,1) vanishes".into()));
    }
    match curve {
        CurveLabel::A => square_of_quotient(a, divisor_count(d) as i64, "a(d)/τ(d)"),
        CurveLabel::B => {
            let l = b_curve_l_invariant(d)?;
            square_of_quotient(a, 1 << l, "a(d)/2^l")
        }
        CurveLabel::C | CurveLabel::D => {
            let s = match (curve, d.value() % 4) {
                (CurveLabel::C, _) => 0,
                (_, 1) => 2,
                _ => 1,
            };
            let num = (a as i128 * a as i128) << s;
            if num % c_fin as i128 != 0 {
                return Err(Error::NonIntegral(format!("2^{s}·a(d)²/C_fin = {num}/{c_fin}")));
            }
            Ok((num / c_fin as i128) as u64)
        }
    }
}

/// Ω_A, Ω_C, Ω_D and the anchors L(B_k,1), a(k) for k = 1, 5, 13, 17.
#[derive(Clone, Debug)]
pub struct ReferenceConstants {
    pub omega_a: f64,
    pub omega_c: f64,
    pub omega_d: f64,
    pub l_b: [(u64, i64, f64); 4],
}

static REFERENCES: OnceLock<std::result::Result<ReferenceConstants, String>> = OnceLock::new();

impl ReferenceConstants {
    pub fn compute() -> Result<Self> {
        let omega = |curve| -> Result<f64> {
            let (m, _) = minimal_model(&base_model(curve))?;
            Ok(real_period(&m, REFERENCE_DIGITS + 10)?.to_f64())
        };
        let spec = builtin_spec(CurveLabel::B, None)?;
        let mut l_b = [(0, 0, 0.0); 4];
        for (slot, k) in l_b.iter_mut().zip([1u64, 5, 13, 17]) {
            let a = theta_single(&spec, k)?.to_integer();
            let m = base_model(CurveLabel::B).quadratic_twist(k as i64)?;
            let l = l_value(&m, REFERENCE_DIGITS)?.value.to_f64();
            *slot = (k, a, l);
        }
        Ok(ReferenceConstants {
            omega_a: omega(CurveLabel::A)?,
            omega_c: omega(CurveLabel::C)?,
            omega_d: omega(CurveLabel::D)?,
            l_b,
        })
    }

    /// Computed once per process.
    pub fn cached() -> Result<&'static Self> {
        REFERENCES
            .get_or_init(|| Self::compute().map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Inconsistent(format!("reference constants: {e}")))
    }
}

/// Closed-form L(E_d,1); for A this is the first variant.
pub fn l_closed_form(curve: CurveLabel, d: u64, a: i64, refs: &ReferenceConstants) -> f64 {
    let a2 = (a as f64) * (a as f64);
    let sd = (d as f64).sqrt();
    match curve {
        CurveLabel::A => l_closed_form_a(1, d, a, refs),
        CurveLabel::B => {
            if d % 4 == 3 {
                return 0.0;
            }
            let k = match d % 24 {
                1 => 1,
                5 => 5,
                13 => 13,
                17 => 17,
                _ => return f64::NAN,
            };
            let &(k, ak, lk) = refs.l_b.iter().find(|r| r.0 == k).expect("anchor");
            let ratio = a as f64 / ak as f64;
            ratio * ratio * (k as f64 / d as f64).sqrt() * lk
        }
        CurveLabel::C => {
            let s = if d % 4 == 3 { 2.0 } else { 1.0 };
            s * a2 * refs.omega_c / sd
        }
        CurveLabel::D => a2 * refs.omega_d / sd,
    }
}

/// L(A_{id},1) = 2^{i−1}a_i(d)²Ω_A / (4√(2^{i−1}d)).
pub fn l_closed_form_a(variant: u8, d: u64, a: i64, refs: &ReferenceConstants) -> f64 {
    let scale = if variant == 2 { 2.0 } else { 1.0 };
    let a2 = (a as f64) * (a as f64);
    scale * a2 * refs.omega_a / (4.0 * (scale * d as f64).sqrt())
}

/// Tamagawa products of E_d, memoized by the local class of d.
///
/// At p | d the twist has type I₀* and c_p depends on p only; at a bad
/// prime of E not dividing d the local curve depends on d modulo squares
/// in ℚ_p^×. Every cache miss runs Tate's algorithm on the actual twist.
pub struct TamagawaCache {
    curve: CurveLabel,
    base_bad: Vec<u64>,
    memo: HashMap<(u64, u64), u32>,
}

impl TamagawaCache {
    pub fn new(curve: CurveLabel) -> Self {
        let disc = base_model(curve).discriminant();
        let base_bad = crate::arith::factor_bigint(&disc, &[])
            .expect("small discriminant")
            .into_iter()
            .map(|(p, _)| p)
            .collect();
        TamagawaCache {
            curve,
            base_bad,
            memo: HashMap::new(),
        }
    }

    fn class(&self, p: u64, d: u64) -> u64 {
        if d.is_multiple_of(p) {
            u64::MAX
        } else if p == 2 {
            d % 8
        } else {
            (legendre(d % p, p) + 1) as u64
        }
    }

    pub fn c_fin(&mut self, d: &FactoredInt) -> Result<u64> {
        let dv = d.value();
        let mut primes: Vec<u64> = self.base_bad.clone();
        primes.extend(d.primes().filter(|p| !self.base_bad.contains(p)));
        let mut model = None;
        let mut total = 1u64;
        for p in primes {
            let key = (p, self.class(p, dv));
            let c = match self.memo.get(&key) {
                Some(&c) => c,
                None => {
                    if model.is_none() {
                        model = Some(base_model(self.curve).quadratic_twist(dv as i64)?);
                    }
                    let c = tate_local(model.as_ref().unwrap(), p).tamagawa;
                    self.memo.insert(key, c);
                    c
                }
            };
            total *= c as u64;
        }
        Ok(total)
    }
}

/// Local data of E_d at every bad prime, by Tate's algorithm.
pub fn twist_local_data(curve: CurveLabel, d: &FactoredInt) -> Result<Vec<LocalData>> {
    let model = base_model(curve).quadratic_twist(d.value() as i64)?;
    let hints: Vec<u64> = d.primes().collect();
    let disc = model.discriminant();
    Ok(crate::arith::factor_bigint(&disc, &hints)?
        .into_iter()
        .map(|(p, _)| tate_local(&model, p))
        .collect())
}

fn record(
    curve: CurveLabel,
    d: &FactoredInt,
    a: i64,
    cache: &mut TamagawaCache,
    refs: Option<&ReferenceConstants>,
) -> Result<TwistRecord> {
    let c_fin = match curve {
        CurveLabel::C | CurveLabel::D => Some(cache.c_fin(d)?),
        _ => None,
    };
    let sha = if a == 0 { 0 } else { sha_from_cfin(curve, d, a, c_fin.unwrap_or(1))? };
    Ok(TwistRecord {
        d: d.value(),
        a,
        sha,
        l_value: refs.map(|r| l_closed_form(curve, d.value(), a, r)),
        c_fin,
    })
}

/// One record without building a coefficient table.
pub fn scan_single(curve: CurveLabel, d: u64) -> Result<TwistRecord> {
    let f = FactoredInt::factor(d)?;
    if !condition_star(curve, &f) {
        return Err(Error::NotEligible { curve, d });
    }
    let spec = builtin_spec(curve, None)?;
    let a = theta_single(&spec, d)?;
    if !a.is_integer() {
        return Err(Error::NonIntegral(format!("a({d}) = {a}")));
    }
    let mut cache = TamagawaCache::new(curve);
    record(curve, &f, a.to_integer(), &mut cache, None)
}

#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub digits: u32,
    /// Check every n-th eligible d ...
    pub every: u64,
    /// ... up to this bound.
    pub max_d: u64,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub limit: u64,
    pub window: u64,
    pub shards: usize,
    pub with_l_values: bool,
    pub cross_check: Option<CrossCheck>,
}

impl ScanOptions {
    pub fn new(limit: u64) -> Self {
        ScanOptions {
            limit,
            window: DEFAULT_WINDOW,
            shards: 1,
            with_l_values: false,
            cross_check: None,
        }
    }
}

/// Records for the eligible d ≤ limit in ascending order.
pub struct Scan {
    curve: CurveLabel,
    spec: ThetaSpec,
    opts: ScanOptions,
    stream: SquarefreeStream,
    table: CoeffTable,
    cache: TamagawaCache,
    refs: Option<&'static ReferenceConstants>,
    seen: u64,
}

pub fn scan(curve: CurveLabel, opts: ScanOptions) -> Result<Scan> {
    let spec = builtin_spec(curve, None)?;
    let table = if opts.limit <= FULL_TABLE_MAX {
        theta_batch(&spec, opts.limit, opts.shards.max(1))?
    } else {
        CoeffTable::empty(1)
    };
    let refs = if opts.with_l_values { Some(ReferenceConstants::cached()?) } else { None };
    Ok(Scan {
        curve,
        spec,
        stream: squarefree_stream(opts.limit.max(1), opts.window)?,
        table,
        cache: TamagawaCache::new(curve),
        refs,
        opts,
        seen: 0,
    })
}

impl Scan {
    fn coefficient(&mut self, d: u64) -> Result<i64> {
        if d >= self.table.end() || d < self.table.start {
            let hi = (d + self.opts.window - 1).min(self.opts.limit);
            self.table = theta_batch_range(&self.spec, d, hi)?;
        }
        self.table
            .get(d)
            .ok_or_else(|| Error::Contract(format!("no coefficient at eligible d = {d}")))
    }

    fn step(&mut self, f: FactoredInt) -> Result<TwistRecord> {
        let d = f.value();
        let a = self.coefficient(d)?;
        let rec = record(self.curve, &f, a, &mut self.cache, self.refs)?;
        if let Some(cc) = &self.opts.cross_check {
            if a != 0 && d <= cc.max_d && self.seen.is_multiple_of(cc.every.max(1)) {
                let model = base_model(self.curve).quadratic_twist(d as i64)?;
                let analytic = analytic_sha(&model, cc.digits)?.require_certified()?;
                if analytic != rec.sha {
                    return Err(Error::CrossCheck {
                        d,
                        closed: rec.sha,
                        analytic,
                    });
                }
            }
        }
        self.seen += 1;
        Ok(rec)
    }
}

impl Iterator for Scan {
    type Item = Result<TwistRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let f = self.stream.next()?;
            if condition_star(self.curve, &f) {
                return Some(self.step(f));
            }
        }
    }
}

/// Writes the scan CSV; returns the number of records.
pub fn write_scan_csv<W: Write>(mut w: W, records: impl Iterator<Item = Result<TwistRecord>>) -> Result<u64> {
    writeln!(w, "{}", TwistRecord::CSV_HEADER)?;
    let mut n = 0;
    for r in records {
        writeln!(w, "{}", r?.csv_row())?;
        n += 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models() {
        assert_eq!(twist_model(CurveLabel::A, 3).unwrap().to_string(), "[0,0,0,-9,0]");
        assert_eq!(twist_model(CurveLabel::C, 1).unwrap(), base_model(CurveLabel::C));
        assert!(twist_model(CurveLabel::B, 4).is_err());
        assert_eq!(twist_model_a(2, 1).unwrap().to_string(), "[0,0,0,-4,0]");
    }

    #[test]
    fn closed_form_examples() {
        let three = FactoredInt::factor(3).unwrap();
        assert_eq!(sha_from_cfin(CurveLabel::A, &three, 2, 1).unwrap(), 1);
        let five = FactoredInt::factor(5).unwrap();
        assert_eq!(sha_from_cfin(CurveLabel::B, &five, 2, 1).unwrap(), 1);
        assert!(sha_from_cfin(CurveLabel::A, &three, 3, 1).is_err());
        assert!(sha_from_cfin(CurveLabel::C, &three, 0, 1).is_err());
    }

    #[test]
    fn small_scan_for_a() {
        let recs: Vec<_> = scan(CurveLabel::A, ScanOptions::new(10)).unwrap().collect::<Result<_>>().unwrap();
        let ds: Vec<u64> = recs.iter().map(|r| r.d).collect();
        assert_eq!(ds, vec![1, 3]);
        assert!(recs.iter().all(|r| r.sha == 1));
    }

    #[test]
    fn csv_round_trip() {
        let mut opts = ScanOptions::new(200);
        opts.with_l_values = true;
        for r in scan(CurveLabel::B, opts).unwrap() {
            let r = r.unwrap();
            assert_eq!(TwistRecord::parse_csv_row(&r.csv_row()).unwrap(), r);
        }
        assert!(TwistRecord::parse_csv_row("1,2,3").is_err());
    }

    #[test]
    fn reference_anchor_curve_a() {
        let refs = ReferenceConstants::cached().unwrap();
        assert!((refs.omega_a - 2.6220575542921198).abs() < 1e-13);
        assert!((l_closed_form(CurveLabel::A, 1, 1, refs) - refs.omega_a / 4.0).abs() < 1e-15);
        assert_eq!(l_closed_form(CurveLabel::B, 7, 3, refs), 0.0);
    }

    #[test]
    fn tamagawa_cache_agrees_with_tate() {
        for curve in [CurveLabel::C, CurveLabel::D] {
            let mut cache = TamagawaCache::new(curve);
            let mut checked = 0;
            for d in 1..400u64 {
                let f = FactoredInt::factor(d).unwrap();
                if !condition_star(curve, &f) {
                    continue;
                }
                let direct: u64 = twist_local_data(curve, &f).unwrap().iter().map(|l| l.tamagawa as u64).product();
                assert_eq!(cache.c_fin(&f).unwrap(), direct, "{curve} d = {d}");
                checked += 1;
            }
            assert!(checked > 20);
        }
    }
}

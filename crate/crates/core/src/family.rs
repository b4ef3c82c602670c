//! The isogeny family E_1(n,p), …, E_4(n,p) and the analytic orders of Ш
//! for its quadratic twists.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive, Zero};

use crate::arith::FactoredInt;
use crate::curves::{ApTable, CurveInvariants, WeierstrassModel, DEFAULT_AN_BUDGET};
use crate::error::{Error, Result};
use crate::lvalue::{l_value_from_an, sha_quotient, table_length, terms_needed, AnalyticSha, GUARD_DIGITS};
use crate::precision::MAX_DIGITS;

/// family_sha_row refuses above this many series terms unless overridden.
pub const TERM_GUARD: u64 = 1_000_000_000;

#[derive(Clone, Debug)]
pub struct FamilyPoint {
    pub n: u32,
    pub p: i64,
    pub models: [WeierstrassModel; 4],
}

/// E_1: y² = x(x+p)(x+p−4t), with t = 3^{2n+1}, and its three isogenous
/// companions E_2, E_3, E_4.
pub fn family_models(n: u32, p: i64) -> Result<FamilyPoint> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be nonzero".into()));
    }
    let t: BigInt = BigInt::from(3).pow(2 * n + 1);
    let p_ = BigInt::from(p);
    let z = BigInt::zero();
    let model = |a2: BigInt, a4: BigInt| WeierstrassModel::new([z.clone(), a2, z.clone(), a4, z.clone()]);
    let e1 = model(2 * &p_ - 4 * &t, &p_ * (&p_ - 4 * &t))?;
    let e2 = model(4 * (2 * &t - &p_), 16 * &t * &t)?;
    let four_t_minus_p = 4 * &t - &p_;
    let e3 = model(2 * (4 * &t + &p_), &four_t_minus_p * &four_t_minus_p)?;
    let e4 = model(2 * (&p_ - 8 * &t), &p_ * &p_)?;
    Ok(FamilyPoint {
        n,
        p,
        models: [e1, e2, e3, e4],
    })
}

/// Shared data for twisting one family member by many d: the a_p table
/// of E_1 serves all four isogenous curves and, through the twist
/// character, every E_i^d.
pub struct FamilyContext {
    pub point: FamilyPoint,
    pub base: CurveInvariants,
    table: Option<ApTable>,
    pub allow_huge: bool,
}

#[derive(Clone, Debug)]
pub struct FamilyRow {
    pub d: u64,
    pub conductor: BigInt,
    pub terms: u64,
    pub sha: [AnalyticSha; 4],
}

impl FamilyRow {
    pub const CSV_HEADER: &'static str = "n,p,N,d,sha1,sha2,sha3,sha4";

    pub fn csv_row(&self, n: u32, p: i64) -> String {
        let s = self.sha.map(|s| s.rounded.to_string());
        format!("{n},{p},{},{},{}", self.conductor, self.d, s.join(","))
    }
}

fn odd_hints(d: &FactoredInt) -> Vec<u64> {
    let mut h: Vec<u64> = vec![2, 3, 19, 29, 643];
    h.extend(d.primes());
    h
}

impl FamilyContext {
    pub fn new(n: u32, p: i64) -> Result<Self> {
        let point = family_models(n, p)?;
        let base = CurveInvariants::compute(&point.models[0], 25)?;
        Ok(FamilyContext {
            point,
            base,
            table: None,
            allow_huge: false,
        })
    }

    /// Ensures the a_p table reaches `limit`.
    pub fn reserve(&mut self, limit: u64) {
        if self.table.as_ref().is_none_or(|t| t.limit() < limit) {
            self.table = Some(ApTable::compute(&self.base.minimal_model, &self.base.local, limit));
        }
    }

    /// Analytic |Ш(E_i^d)| for i = 1..4.
    pub fn row(&mut self, d: u64, digits: u32) -> Result<FamilyRow> {
        let f = FactoredInt::factor(d)?;
        if !f.is_squarefree() {
            return Err(Error::InvalidArgument(format!("d = {d} is not square-free")));
        }
        let hints = odd_hints(&f);
        let period_digits = (digits + GUARD_DIGITS).min(MAX_DIGITS);
        let twists = self
            .point
            .models
            .iter()
            .map(|m| m.quadratic_twist(d as i64))
            .collect::<Result<Vec<_>>>()?;
        let invs = twists
            .iter()
            .map(|m| CurveInvariants::compute_with_hints(m, &hints, period_digits))
            .collect::<Result<Vec<_>>>()?;
        let conductor = invs[0].conductor.clone();
        if invs.iter().any(|i| i.conductor != conductor) {
            return Err(Error::Inconsistent(format!("isogenous twists by {d} disagree on the conductor")));
        }
        let nf = conductor.to_f64().ok_or_else(|| Error::Overflow("conductor".into()))?;
        let terms = terms_needed(nf, digits);
        if terms > TERM_GUARD && !self.allow_huge {
            return Err(Error::InvalidArgument(format!(
                "d = {d} needs {terms} terms, above the guard of {TERM_GUARD}"
            )));
        }
        let len = table_length(nf, digits);
        if self.table.as_ref().is_none_or(|t| t.limit() < len) {
            // grow geometrically so an ascending run of d rebuilds O(log) times
            let current = self.table.as_ref().map_or(0, |t| t.limit());
            self.reserve(len.max(current.saturating_mul(2)));
        }
        let base = self.table.as_ref().expect("reserved");
        let twisted = base.twist(d as i64, &invs[0].minimal_model, &invs[0].local);
        let an = twisted.an(len, DEFAULT_AN_BUDGET)?;
        let l = l_value_from_an(&an, nf, digits)?;
        let mut sha = [AnalyticSha::from_raw(0.0); 4];
        for (slot, inv) in sha.iter_mut().zip(&invs) {
            *slot = sha_quotient(&l, inv)?;
        }
        Ok(FamilyRow {
            d,
            conductor,
            terms,
            sha,
        })
    }
}

/// One row for a single (n, p, d).
pub fn family_sha_row(n: u32, p: i64, d: u64, digits: u32) -> Result<[AnalyticSha; 4]> {
    Ok(FamilyContext::new(n, p)?.row(d, digits)?.sha)
}

pub fn write_family_csv<W: Write>(mut w: W, n: u32, p: i64, rows: &[FamilyRow]) -> Result<()> {
    writeln!(w, "{}", FamilyRow::CSV_HEADER)?;
    for r in rows {
        writeln!(w, "{}", r.csv_row(n, p))?;
    }
    Ok(())
}

//! Dirichlet coefficients a_n from traces at primes.

use rayon::prelude::*;

use super::ap::FrobeniusCounter;
use super::model::WeierstrassModel;
use super::tate::LocalData;
use crate::arith::{kronecker, primes_up_to};
use crate::error::{Error, Result};

/// Default cap on the bytes of an a_n table.
pub const DEFAULT_AN_BUDGET: u64 = 1 << 31;

/// a_p for every prime p ≤ limit, with the bad primes recorded.
#[derive(Clone, Debug)]
pub struct ApTable {
    limit: u64,
    primes: Vec<u64>,
    values: Vec<i32>,
    bad: Vec<(u64, i64)>,
}

impl ApTable {
    /// `model` must be minimal and `local` must list its bad primes.
    pub fn compute(model: &WeierstrassModel, local: &[LocalData], limit: u64) -> Self {
        let bad: Vec<(u64, i64)> = local
            .iter()
            .filter_map(|l| l.bad_ap().map(|a| (l.prime, a)))
            .collect();
        let primes = primes_up_to(limit);
        let counter = FrobeniusCounter::new(model);
        let values = primes
            .par_iter()
            .map(|&p| match bad.iter().find(|b| b.0 == p) {
                Some(&(_, a)) => a as i32,
                None => counter.ap(p) as i32,
            })
            .collect();
        ApTable { limit, primes, values, bad }
    }

    /// The table of the quadratic twist by d, reusing a_p(E_d) = (d/p)·a_p(E)
    /// wherever both curves have good reduction.
    pub fn twist(&self, d: i64, twisted: &WeierstrassModel, twisted_local: &[LocalData]) -> Self {
        let bad: Vec<(u64, i64)> = twisted_local
            .iter()
            .filter_map(|l| l.bad_ap().map(|a| (l.prime, a)))
            .collect();
        let counter = FrobeniusCounter::new(twisted);
        let values = self
            .primes
            .par_iter()
            .zip(&self.values)
            .map(|(&p, &a)| {
                if let Some(&(_, t)) = bad.iter().find(|b| b.0 == p) {
                    t as i32
                } else if self.bad.iter().any(|b| b.0 == p) {
                    counter.ap(p) as i32
                } else {
                    kronecker(d, p as i64) * a
                }
            })
            .collect();
        ApTable {
            limit: self.limit,
            primes: self.primes.clone(),
            values,
            bad,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn get(&self, p: u64) -> Option<i64> {
        self.primes.binary_search(&p).ok().map(|i| self.values[i] as i64)
    }

    pub fn is_bad(&self, p: u64) -> bool {
        self.bad.iter().any(|b| b.0 == p)
    }

    /// a_0..a_limit (a_0 = 0) by the Hecke relations.
    pub fn an(&self, limit: u64, budget: u64) -> Result<Vec<i32>> {
        if limit > self.limit {
            return Err(Error::InvalidArgument(format!(
                "a_p table only reaches {}, asked for {limit}",
                self.limit
            )));
        }
        let bytes = (limit + 1) * 4;
        if bytes > budget {
            return Err(Error::Memory { limit: budget });
        }
        let n = limit as usize;
        let mut a = vec![1i32; n + 1];
        a[0] = 0;
        for (&p, &ap1) in self.primes.iter().zip(&self.values) {
            if p > limit {
                break;
            }
            let bad = self.is_bad(p);
            let (mut prev, mut cur) = (1i64, ap1 as i64);
            let mut pk = p;
            loop {
                let next_pk = pk.checked_mul(p).filter(|&q| q <= limit);
                let v = cur as i32;
                let mut j = pk as usize;
                while j <= n {
                    if next_pk.is_none() || !(j / pk as usize).is_multiple_of(p as usize) {
                        a[j] *= v;
                    }
                    j += pk as usize;
                }
                match next_pk {
                    None => break,
                    Some(q) => pk = q,
                }
                let following = if bad {
                    cur * ap1 as i64
                } else {
                    ap1 as i64 * cur - p as i64 * prev
                };
                prev = cur;
                cur = following;
            }
        }
        Ok(a)
    }
}

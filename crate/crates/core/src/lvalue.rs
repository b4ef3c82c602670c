//! L(E,1) from the rapidly convergent series
//! S_m = 2 Σ_{n≤m} (a_n/n) e^{−2πn/√N}, and the BSD quotient for rank 0.

use num_traits::ToPrimitive;

use crate::curves::{ApTable, CurveInvariants, WeierstrassModel, DEFAULT_AN_BUDGET};
use crate::error::{Error, Result};
use crate::precision::{Dd, MAX_DIGITS};

/// Guard digits on top of the requested accuracy.
pub const GUARD_DIGITS: u32 = 10;

/// Test point for the functional equation T(x) + w·T(1/x) = L(E,1).
const SIGN_PROBE: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LValueResult {
    pub value: Dd,
    pub truncation_bound: f64,
    pub terms_used: u64,
    pub digits: u32,
    /// Sign of the functional equation read off numerically.
    pub root_sign: i8,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticSha {
    pub raw_quotient: f64,
    pub rounded: u64,
    pub certified: bool,
}

impl AnalyticSha {
    pub fn from_raw(raw: f64) -> Self {
        let rounded = raw.round().max(0.0) as u64;
        let root = (rounded as f64).sqrt().round() as u64;
        let certified = raw.is_finite() && (raw - rounded as f64).abs() < 0.01 && root * root == rounded;
        AnalyticSha {
            raw_quotient: raw,
            rounded,
            certified,
        }
    }

    /// The rounded order, or a certification error carrying the raw value.
    pub fn require_certified(self) -> Result<u64> {
        if self.certified {
            Ok(self.rounded)
        } else {
            Err(Error::Certification { raw: self.raw_quotient })
        }
    }
}

/// Smallest m with m ≥ (√N/2π)(2 log 2 + k log 10 − log(1 − e^{−2π/√N})).
pub fn terms_needed(conductor: f64, digits: u32) -> u64 {
    assert!(conductor >= 1.0 && digits >= 1);
    let s = conductor.sqrt();
    let tau = 2.0 * std::f64::consts::PI;
    let bracket = 2.0 * std::f64::consts::LN_2 + digits as f64 * std::f64::consts::LN_10
        - (-(-tau / s).exp_m1()).ln();
    (s / tau * bracket).ceil() as u64
}

fn sign_digits(digits: u32) -> u32 {
    digits.clamp(8, 12)
}

/// Coefficients needed by [`l_value_from_an`] at this accuracy.
pub fn table_length(conductor: f64, digits: u32) -> u64 {
    let main = terms_needed(conductor, digits);
    let probe = (terms_needed(conductor, sign_digits(digits)) as f64 * SIGN_PROBE).ceil() as u64;
    main.max(probe)
}

/// Vanishing threshold 10^(−digits/2).
pub fn vanishing_threshold(digits: u32) -> f64 {
    10f64.powf(-(digits as f64) / 2.0)
}

/// L(E,1) from a_0..a_M with M ≥ `table_length(N, digits)`.
pub fn l_value_from_an(an: &[i32], conductor: f64, digits: u32) -> Result<LValueResult> {
    if digits == 0 || digits + GUARD_DIGITS > MAX_DIGITS {
        return Err(Error::Precision { digits });
    }
    let need = table_length(conductor, digits);
    if (an.len() as u64) <= need {
        return Err(Error::InvalidArgument(format!(
            "need a_n up to {need}, got {}",
            an.len().saturating_sub(1)
        )));
    }
    let root_sign = root_sign(an, conductor, sign_digits(digits))?;
    let m = terms_needed(conductor, digits);
    let value = if root_sign < 0 { Dd::ZERO } else { series(an, conductor, m) };
    Ok(LValueResult {
        value,
        truncation_bound: 10f64.powi(-(digits as i32)),
        terms_used: m,
        digits,
        root_sign,
    })
}

/// 2 Σ_{n≤m} (a_n/n) e^{−2πn/√N} in double-double.
pub fn series(an: &[i32], conductor: f64, m: u64) -> Dd {
    let root = Dd::from_f64(conductor).sqrt();
    let q = (-(Dd::PI.mul_f64(2.0) / root)).exp();
    let mut qn = Dd::ONE;
    let mut sum = Dd::ZERO;
    for (n, &a) in an.iter().enumerate().take(m as usize + 1).skip(1) {
        qn *= q;
        if a != 0 {
            sum += qn.mul_f64(a as f64) / Dd::from_f64(n as f64);
        }
    }
    sum.mul_f64(2.0)
}

fn root_sign(an: &[i32], conductor: f64, digits: u32) -> Result<i8> {
    let m = terms_needed(conductor, digits);
    let big = (m as f64 * SIGN_PROBE).ceil() as usize;
    let w = 2.0 * std::f64::consts::PI / conductor.sqrt();
    let (q1, qa, qb) = ((-w).exp(), (-w * SIGN_PROBE).exp(), (-w / SIGN_PROBE).exp());
    let (mut p1, mut pa, mut pb) = (1.0f64, 1.0f64, 1.0f64);
    let (mut t1, mut ta, mut tb) = (0.0f64, 0.0f64, 0.0f64);
    for (n, &a) in an.iter().enumerate().take(big + 1).skip(1) {
        p1 *= q1;
        pa *= qa;
        pb *= qb;
        if a != 0 {
            let c = a as f64 / n as f64;
            t1 += c * p1;
            ta += c * pa;
            tb += c * pb;
        }
    }
    let plus = (ta + tb - 2.0 * t1).abs();
    let minus = (ta - tb).abs();
    let tol = vanishing_threshold(digits);
    match (plus <= tol, minus <= tol) {
        (true, false) => Ok(1),
        (false, true) => Ok(-1),
        (true, true) => Ok(if plus <= minus { 1 } else { -1 }),
        (false, false) => Err(Error::Inconsistent(format!(
            "functional equation fails for N = {conductor}: residuals {plus:e} (w = +1), {minus:e} (w = −1)"
        ))),
    }
}

/// L(E,1) for any model; invariants are computed on the minimal model.
pub fn l_value(m: &WeierstrassModel, digits: u32) -> Result<LValueResult> {
    let inv = CurveInvariants::compute(m, (digits + GUARD_DIGITS).min(MAX_DIGITS))?;
    l_value_for(&inv, digits)
}

pub fn l_value_for(inv: &CurveInvariants, digits: u32) -> Result<LValueResult> {
    let n = inv
        .conductor
        .to_f64()
        .ok_or_else(|| Error::Overflow("conductor".into()))?;
    let len = table_length(n, digits);
    let table = ApTable::compute(&inv.minimal_model, &inv.local, len);
    let an = table.an(len, DEFAULT_AN_BUDGET)?;
    l_value_from_an(&an, n, digits)
}

/// L·|tors|² / (C_∞·C_fin) with the regulator taken as 1.
pub fn sha_quotient(l: &LValueResult, inv: &CurveInvariants) -> Result<AnalyticSha> {
    let threshold = vanishing_threshold(l.digits);
    let value = l.value.to_f64();
    if value.abs() < threshold {
        return Err(Error::VanishingL { value, threshold });
    }
    let tors = Dd::from_f64(inv.torsion_order as f64);
    let raw = l.value * tors * tors / (inv.c_infinity * Dd::from_f64(inv.c_fin as f64));
    Ok(AnalyticSha::from_raw(raw.to_f64()))
}

/// Analytic order of Ш for a rank-0 curve.
pub fn analytic_sha(m: &WeierstrassModel, digits: u32) -> Result<AnalyticSha> {
    let inv = CurveInvariants::compute(m, (digits + GUARD_DIGITS).min(MAX_DIGITS))?;
    let l = l_value_for(&inv, digits)?;
    sha_quotient(&l, &inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_bound_examples() {
        assert_eq!(terms_needed(32.0, 3), 8);
        for k in 1..15 {
            assert!(terms_needed(1000.0, k + 1) > terms_needed(1000.0, k));
        }
    }

    #[test]
    fn curve_a_value_and_sha() {
        let a = WeierstrassModel::from_ints([0, 0, 0, -1, 0]).unwrap();
        let l = l_value(&a, 15).unwrap();
        assert_eq!(l.root_sign, 1);
        assert!((l.value.to_f64() - 2.6220575542921198 / 4.0).abs() < 1e-14);
        let s = analytic_sha(&a, 12).unwrap();
        assert!(s.certified);
        assert_eq!(s.rounded, 1);
    }

    #[test]
    fn rank_one_vanishes() {
        let e = WeierstrassModel::from_ints([0, 0, 1, -1, 0]).unwrap();
        let l = l_value(&e, 10).unwrap();
        assert_eq!(l.root_sign, -1);
        assert!(l.value.to_f64().abs() < vanishing_threshold(10));
        assert!(matches!(analytic_sha(&e, 10), Err(Error::VanishingL { .. })));
    }

    #[test]
    fn eleven_a_quotient() {
        // L(11a1, 1) = 0.2538418608559106843...
        let e = WeierstrassModel::from_ints([0, -1, 1, -10, -20]).unwrap();
        let l = l_value(&e, 18).unwrap();
        assert!((l.value - Dd::from_f64(0.2538418608559107)).abs().to_f64() < 1e-15);
        assert_eq!(analytic_sha(&e, 10).unwrap().rounded, 1);
    }

    #[test]
    fn certification_rules() {
        assert!(AnalyticSha::from_raw(9.004).certified);
        assert!(!AnalyticSha::from_raw(9.02).certified);
        assert!(!AnalyticSha::from_raw(2.0).certified);
        assert!(AnalyticSha::from_raw(2.0).require_certified().is_err());
    }
}

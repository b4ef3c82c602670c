//! Least positive real period by the arithmetic-geometric mean.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::model::WeierstrassModel;
use crate::error::{Error, Result};
use crate::precision::{Dd, MAX_DIGITS};

const AGM_CAP: usize = 64;

/// Nearest double-double to n.
pub fn big_to_dd(n: &BigInt) -> Dd {
    let hi = n.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return Dd::from_f64(hi);
    }
    let rest = n - BigInt::from(hi as i128);
    match rest.to_i128() {
        Some(r) => Dd::from_f64(hi) + Dd::from_i128(r),
        None => Dd::from_f64(hi) + Dd::from_f64(rest.to_f64().unwrap_or(0.0)),
    }
}

fn agm(mut a: Dd, mut b: Dd, digits: u32) -> Result<Dd> {
    let tol = 10f64.powi(-(digits as i32) - 2);
    for _ in 0..AGM_CAP {
        if ((a - b).abs() / a).to_f64() < tol {
            return Ok(a);
        }
        let na = (a + b).mul_f64(0.5);
        b = (a * b).sqrt();
        a = na;
    }
    Err(Error::Precision { digits })
}

/// Real roots of 4x³ + b2x² + 2b4x + b6, descending.
fn real_roots(m: &WeierstrassModel) -> Vec<Dd> {
    let [c3, c2, c1, c0] = m.two_division_cubic().map(|c| big_to_dd(&c));
    let f = |x: Dd| ((c3 * x + c2) * x + c1) * x + c0;
    let df = |x: Dd| (c3.mul_f64(3.0) * x + c2.mul_f64(2.0)) * x + c1;
    // depressed cubic t³ + pt + q with x = t − b/3 after dividing by 4
    let (b, c, d) = (c2.to_f64() / 4.0, c1.to_f64() / 4.0, c0.to_f64() / 4.0);
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let mut seeds = if m.discriminant().is_positive() {
        let r = (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| 2.0 * r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect::<Vec<_>>()
    } else {
        let s = disc.max(0.0).sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt() + shift]
    };
    seeds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    seeds
        .into_iter()
        .map(|x0| {
            let mut x = Dd::from_f64(x0);
            for _ in 0..8 {
                let d = df(x);
                if d.hi == 0.0 {
                    break;
                }
                let step = f(x) / d;
                x -= step;
                if step.abs().to_f64() <= 1e-33 * x.abs().to_f64().max(1.0) {
                    break;
                }
            }
            x
        })
        .collect()
}

/// Ω for the Néron differential of `m` (which should be minimal).
pub fn real_period(m: &WeierstrassModel, digits: u32) -> Result<Dd> {
    if digits > MAX_DIGITS {
        return Err(Error::Precision { digits });
    }
    let roots = real_roots(m);
    if m.discriminant().is_positive() {
        let (e1, e2, e3) = (roots[0], roots[1], roots[2]);
        let g = agm((e1 - e3).sqrt(), (e1 - e2).sqrt(), digits)?;
        Ok(Dd::PI / g)
    } else {
        let e1 = roots[0];
        let b2 = big_to_dd(&m.b2());
        let b4 = big_to_dd(&m.b4());
        let a = e1.mul_f64(3.0) + b2.mul_f64(0.25);
        let b = (e1.sqr().mul_f64(3.0) + b2.mul_f64(0.5) * e1 + b4.mul_f64(0.5)).sqrt();
        let g = agm(b.sqrt().mul_f64(2.0), (b.mul_f64(2.0) + a).sqrt(), digits)?;
        Ok(Dd::PI.mul_f64(2.0) / g)
    }
}

/// C_∞: Ω or 2Ω according as E(ℝ) is connected or not.
pub fn c_infinity(disc: &BigInt, omega: Dd) -> Dd {
    if disc.is_positive() {
        omega.mul_f64(2.0)
    } else {
        debug_assert!(!disc.is_zero());
        omega
    }
}

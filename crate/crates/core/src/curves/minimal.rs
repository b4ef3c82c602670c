//! Global minimal models over ℚ (Laska–Kraus–Connell).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use super::model::{Transform, WeierstrassModel};
use super::tate::tate_with_model;
use crate::arith::factor_bigint;
use crate::error::{Error, Result};

/// Minimal model together with the (u, r, s, t) taking `m` to it.
pub fn minimal_model(m: &WeierstrassModel) -> Result<(WeierstrassModel, Transform)> {
    minimal_model_with_hints(m, &[])
}

/// As [`minimal_model`], dividing out `hints` before factoring Δ.
pub fn minimal_model_with_hints(
    m: &WeierstrassModel,
    hints: &[u64],
) -> Result<(WeierstrassModel, Transform)> {
    let disc = m.discriminant();
    let mut u = BigInt::one();
    for (p, e) in factor_bigint(&disc, hints)? {
        if e < 12 {
            continue;
        }
        let (local, _) = tate_with_model(m, p);
        let drop = e - local.min_disc_valuation;
        u *= BigInt::from(p).pow(drop / 12);
    }
    from_scaling(m, &u)
}

fn from_scaling(m: &WeierstrassModel, u: &BigInt) -> Result<(WeierstrassModel, Transform)> {
    let u4 = u.pow(4u32);
    let u6 = u.pow(6u32);
    let c4 = m.c4() / &u4;
    let c6 = m.c6() / &u6;
    let reduced = from_c4c6(&c4, &c6)?;
    for sign in [1, -1] {
        let u = u * sign;
        if let Some(tr) = recover_transform(m, &reduced, &u) {
            if m.transform(&tr).ok().as_ref() == Some(&reduced) {
                return Ok((reduced, tr));
            }
        }
    }
    Err(Error::NonIntegral(format!("no integral transform from {m} to {reduced}")))
}

/// The reduced model with the given c4, c6 (Kraus's conditions assumed).
pub fn from_c4c6(c4: &BigInt, c6: &BigInt) -> Result<WeierstrassModel> {
    let mut b2 = (-c6).mod_floor(&BigInt::from(12));
    if b2 > BigInt::from(6) {
        b2 -= 12;
    }
    let exact = |n: BigInt, d: i64| -> Result<BigInt> {
        let (q, r) = n.div_rem(&BigInt::from(d));
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NonIntegral(format!("c4={c4}, c6={c6}")))
        }
    };
    let b4 = exact(&b2 * &b2 - c4, 24)?;
    let b6 = exact(-(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - c6, 216)?;
    let a1 = b2.mod_floor(&BigInt::from(2));
    let a3 = b6.mod_floor(&BigInt::from(2));
    let a2 = exact(&b2 - &a1, 4)?;
    let a4 = exact(&b4 - &a1 * &a3, 2)?;
    let a6 = exact(&b6 - &a3, 4)?;
    WeierstrassModel::new([a1, a2, a3, a4, a6])
}

fn recover_transform(from: &WeierstrassModel, to: &WeierstrassModel, u: &BigInt) -> Option<Transform> {
    let exact = |n: BigInt, d: i64| -> Option<BigInt> {
        let (q, r) = n.div_rem(&BigInt::from(d));
        r.is_zero().then_some(q)
    };
    let u2 = u * u;
    let u3 = &u2 * u;
    let s = exact(u * &to.a1 - &from.a1, 2)?;
    let r = exact(&u2 * &to.a2 - &from.a2 + &s * &from.a1 + &s * &s, 3)?;
    let t = exact(&u3 * &to.a3 - &from.a3 - &r * &from.a1, 2)?;
    Some(Transform { u: u.clone(), r, s, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn model(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_ints(a).unwrap()
    }

    #[test]
    fn curve_a_is_minimal() {
        let a = model([0, 0, 0, -1, 0]);
        let (m, tr) = minimal_model(&a).unwrap();
        assert_eq!(m, a);
        assert_eq!(tr.u, BigInt::one());
    }

    #[test]
    fn scaled_model_recovers_u() {
        // y² = x³ − x scaled by u = 2: a4·2⁴, a6·2⁶
        let big = model([0, 0, 0, -16, 0]);
        let (m, tr) = minimal_model(&big).unwrap();
        assert_eq!(m, model([0, 0, 0, -1, 0]));
        assert_eq!(tr.u.abs(), BigInt::from(2));

        // x³ − 2⁴x + 2⁶ from x³ − x + 1
        let e = model([0, 0, 0, -16, 64]);
        let (m, tr) = minimal_model(&e).unwrap();
        assert_eq!(m, model([0, 0, 0, -1, 1]));
        assert_eq!(tr.u.abs(), BigInt::from(2));
        assert_eq!(e.discriminant() / m.discriminant(), BigInt::from(4096));
    }

    #[test]
    fn non_short_reduction() {
        // 37a scaled by u = 3, then translated
        let base = model([0, 0, 1, -1, 0]);
        let scaled = WeierstrassModel::new([
            &base.a1 * 3,
            &base.a2 * 9,
            &base.a3 * 27,
            &base.a4 * 81,
            &base.a6 * 729,
        ])
        .unwrap();
        let moved = scaled.rst(&BigInt::from(-1), &BigInt::from(-1), &BigInt::from(-2));
        let (m, back) = minimal_model(&moved).unwrap();
        assert_eq!(m, base);
        assert_eq!(moved.transform(&back).unwrap(), base);
    }
}

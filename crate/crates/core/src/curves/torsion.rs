//! Rational torsion: a reduction bound confirmed by Lutz–Nagell.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ap::ap_naive;
use super::model::{mod_u64, WeierstrassModel};
use crate::arith::{factor_bigint, primes_up_to};
use crate::error::Result;

/// Good primes used for the #E(F_p) gcd bound.
const BOUND_PRIMES: usize = 10;

/// |E(ℚ)_tors| for a model assumed minimal.
pub fn torsion_order(m: &WeierstrassModel) -> Result<u64> {
    let disc = m.discriminant();
    let mut bound = 0u64;
    let mut used = 0;
    for p in primes_up_to(2000).into_iter().skip(1) {
        if used == BOUND_PRIMES || bound == 1 {
            break;
        }
        if mod_u64(&disc, p) == 0 {
            continue;
        }
        let n = (p as i64 + 1 - ap_naive(m, p)) as u64;
        bound = bound.gcd(&n);
        used += 1;
    }
    if bound == 1 {
        return Ok(1);
    }
    // Y² = X³ − 27c4·X − 54c6
    let a = BigInt::from(-27) * m.c4();
    let b = BigInt::from(-54) * m.c6();
    let roots = integer_roots(&a, &b, &BigInt::zero());
    let two_torsion = 1 + roots.len() as u64;
    if two_torsion == bound {
        return Ok(bound);
    }
    if bound >> bound.trailing_zeros() == 1 {
        // a 2-group: trivial without 2-torsion, and one halving step decides
        // between |E[2](ℚ)| and twice that
        if two_torsion == 1 {
            return Ok(1);
        }
        if bound == 2 * two_torsion {
            let halvable = roots.iter().any(|e| halves_rationally(&a, e));
            return Ok(if halvable { bound } else { two_torsion });
        }
    }
    lutz_nagell(&a, &b, two_torsion)
}

/// |E(ℚ)_tors| by Lutz–Nagell alone, without the reduction shortcuts.
pub fn torsion_order_exhaustive(m: &WeierstrassModel) -> Result<u64> {
    let a = BigInt::from(-27) * m.c4();
    let b = BigInt::from(-54) * m.c6();
    let two_torsion = 1 + integer_roots(&a, &b, &BigInt::zero()).len() as u64;
    lutz_nagell(&a, &b, two_torsion)
}

fn lutz_nagell(a: &BigInt, b: &BigInt, two_torsion: u64) -> Result<u64> {
    // y² divides 4a³ + 27b², a unit multiple of 6¹²Δ
    let d = 4 * a * a * a + 27 * b * b;
    let factors = factor_bigint(&d, &[2, 3])?;
    let mut ys = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for y in &ys {
            let mut pk = y.clone();
            for _ in 0..=e / 2 {
                next.push(pk.clone());
                pk *= p;
            }
        }
        ys = next;
    }
    let mut count = two_torsion;
    for y in ys {
        for x in integer_roots(a, b, &(&y * &y)) {
            if is_torsion(a, &(BigRational::from(x), BigRational::from(y.clone()))) {
                count += 2;
            }
        }
    }
    Ok(count)
}

/// Whether (e, 0) on Y² = X³ + aX + b lies in 2E(ℚ). Moving it to the
/// origin gives Y² = X(X² + 3eX + 3e² + a), and (0,0) = 2Q exactly when
/// 3e² + a = s² with 3e ± 2s a square for one choice of sign.
fn halves_rationally(a: &BigInt, e: &BigInt) -> bool {
    let beta: BigInt = 3 * e * e + a;
    if beta.is_negative() {
        return false;
    }
    let s = Roots::sqrt(&beta);
    if &s * &s != beta {
        return false;
    }
    let is_square = |n: BigInt| !n.is_negative() && {
        let r = Roots::sqrt(&n);
        &r * &r == n
    };
    is_square(3 * e + 2 * &s) || is_square(3 * e - 2 * &s)
}

fn cubic(a: &BigInt, b: &BigInt, c: &BigInt, x: &BigInt) -> BigInt {
    x * x * x + a * x + b - c
}

/// Integer roots of X³ + aX + b − c.
fn integer_roots(a: &BigInt, b: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| cubic(a, b, c, x);
    let bound: BigInt = a.abs() + (b - c).abs() + 1;
    // monotone pieces split at ±s with s = ⌊√(−a/3)⌋
    let s = if a.is_negative() { Roots::sqrt(&(-a / 3)) } else { BigInt::zero() };
    let mut roots = Vec::new();
    let probe = |x: BigInt, roots: &mut Vec<BigInt>| {
        if f(&x).is_zero() && !roots.contains(&x) {
            roots.push(x);
        }
    };
    for x in [-&s - 1, -&s, s.clone(), &s + 1] {
        probe(x, &mut roots);
    }
    let pieces = [(-&bound, -&s - 1, true), (-&s, s.clone(), false), (&s + 1, bound.clone(), true)];
    for (lo, hi, increasing) in pieces {
        if lo > hi {
            continue;
        }
        let (mut lo, mut hi) = (lo, hi);
        let sign = |x: &BigInt| {
            let v = f(x);
            if increasing { v } else { -v }
        };
        if sign(&lo).is_positive() || sign(&hi).is_negative() {
            continue;
        }
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
            if sign(&mid).is_negative() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        probe(lo, &mut roots);
        probe(hi, &mut roots);
    }
    roots
}

type RPt = (BigRational, BigRational);

fn add(a: &BigInt, p: &Option<RPt>, q: &Option<RPt>) -> Option<RPt> {
    let ((x1, y1), (x2, y2)) = match (p, q) {
        (None, r) | (r, None) => return r.clone(),
        (Some(u), Some(v)) => (u, v),
    };
    let lambda = if x1 == x2 {
        if (y1 + y2).is_zero() {
            return None;
        }
        (BigRational::from_integer(3.into()) * x1 * x1 + BigRational::from(a.clone()))
            / (BigRational::from_integer(2.into()) * y1)
    } else {
        (y2 - y1) / (x2 - x1)
    };
    let x3 = &lambda * &lambda - x1 - x2;
    let y3 = lambda * (x1 - &x3) - y1;
    Some((x3, y3))
}

/// Multiples stay integral until O within 12 steps.
fn is_torsion(a: &BigInt, p: &RPt) -> bool {
    let start = Some(p.clone());
    let mut cur = start.clone();
    for _ in 0..12 {
        cur = add(a, &cur, &start);
        match &cur {
            None => return true,
            Some((x, y)) if !x.is_integer() || !y.is_integer() => return false,
            _ => {}
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tors(a: [i64; 5]) -> u64 {
        torsion_order(&WeierstrassModel::from_ints(a).unwrap()).unwrap()
    }

    #[test]
    fn known_orders() {
        assert_eq!(tors([0, 0, 0, -1, 0]), 4);
        assert_eq!(tors([0, 0, 0, 0, -1]), 2);
        assert_eq!(tors([0, 4, 0, 0, -16]), 1);
        assert_eq!(tors([0, -1, 0, -8, -16]), 2);
        assert_eq!(tors([0, -1, 1, -10, -20]), 5);
        assert_eq!(tors([0, 0, 1, -1, 0]), 1);
        // 14a1: Z/6
        assert_eq!(tors([1, 0, 1, 4, -6]), 6);
        // 15a1: Z/2 × Z/4
        assert_eq!(tors([1, 1, 1, -10, -10]), 8);
        // 26b1: Z/7
        assert_eq!(tors([1, -1, 1, -3, 3]), 7);
        // y² = x³ + 1: Z/6
        assert_eq!(tors([0, 0, 0, 0, 1]), 6);
    }
}

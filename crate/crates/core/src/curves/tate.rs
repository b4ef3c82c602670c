//! Tate's algorithm over ℚ_p, following the layout of Cremona's
//! implementation (Algorithm 7.1 in his tables book).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::model::{mod_u64, valuation, WeierstrassModel};
use crate::arith::{inv_mod, kronecker_i128, mul_mod};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kodaira {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    Good,
    Split,
    NonSplit,
    Additive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub prime: u64,
    pub kodaira: Kodaira,
    pub conductor_exponent: u32,
    pub tamagawa: u32,
    pub reduction: Reduction,
    /// v_p of the minimal discriminant.
    pub min_disc_valuation: u32,
}

impl LocalData {
    /// The local Euler factor coefficient a_p at a bad prime.
    pub fn bad_ap(&self) -> Option<i64> {
        match self.reduction {
            Reduction::Good => None,
            Reduction::Split => Some(1),
            Reduction::NonSplit => Some(-1),
            Reduction::Additive => Some(0),
        }
    }

    /// Whether (kodaira, tamagawa, f_p, reduction) fit together.
    pub fn is_consistent(&self) -> bool {
        let (c, f) = (self.tamagawa, self.conductor_exponent);
        match (self.kodaira, self.reduction) {
            (Kodaira::I(0), Reduction::Good) => f == 0 && c == 1,
            (Kodaira::I(n), Reduction::Split) => f == 1 && c == n,
            (Kodaira::I(n), Reduction::NonSplit) => f == 1 && c == if n % 2 == 0 { 2 } else { 1 },
            (Kodaira::II | Kodaira::IIStar, Reduction::Additive) => f >= 2 && c == 1,
            (Kodaira::III | Kodaira::IIIStar, Reduction::Additive) => f >= 2 && c == 2,
            (Kodaira::IV | Kodaira::IVStar, Reduction::Additive) => f >= 2 && (c == 1 || c == 3),
            (Kodaira::IStar(0), Reduction::Additive) => f >= 2 && (1..=4).contains(&c),
            (Kodaira::IStar(_), Reduction::Additive) => f >= 2 && (c == 2 || c == 4),
            _ => false,
        }
    }
}

struct Fp {
    p: u64,
    pb: BigInt,
}

impl Fp {
    fn red(&self, x: &BigInt) -> u64 {
        mod_u64(x, self.p)
    }
    fn divides(&self, x: &BigInt) -> bool {
        self.red(x) == 0
    }
    fn inv(&self, x: &BigInt) -> BigInt {
        BigInt::from(inv_mod(self.red(x), self.p).expect("unit mod p"))
    }
    fn reduce(&self, x: &BigInt) -> BigInt {
        x.mod_floor(&self.pb)
    }
    /// Whether a·T² + b·T + c has a root mod p.
    fn quad_roots(&self, a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
        let p = self.p;
        let (a, b, c) = (self.red(a), self.red(b), self.red(c));
        if a == 0 {
            return b != 0 || c == 0;
        }
        if p == 2 {
            return c == 0 || (a + b + c) % 2 == 0;
        }
        let disc = (mul_mod(b, b, p) + p - mul_mod(4 % p, mul_mod(a, c, p), p)) % p;
        kronecker_i128(disc as i128, p as i128) >= 0
    }
    /// Number of distinct roots of T³ + b·T² + c·T + d mod p.
    fn cubic_roots(&self, b: &BigInt, c: &BigInt, d: &BigInt) -> u32 {
        let p = self.p;
        let f = [self.red(d), self.red(c), self.red(b)];
        if p < 64 {
            return (0..p)
                .filter(|&x| {
                    let v = (mul_mod(mul_mod(x, x, p), x, p) + mul_mod(f[2], mul_mod(x, x, p), p) + mul_mod(f[1], x, p) + f[0]) % p;
                    v == 0
                })
                .count() as u32;
        }
        distinct_roots_cubic(f, p)
    }
}

/// Degree of gcd(T^p − T, f) for monic f = T³ + f2·T² + f1·T + f0.
fn distinct_roots_cubic(f: [u64; 3], p: u64) -> u32 {
    // polynomials as coefficient vectors, low degree first
    let mulmod_f = |a: &[u64; 3], b: &[u64; 3]| -> [u64; 3] {
        let mut prod = [0u64; 5];
        for i in 0..3 {
            for j in 0..3 {
                prod[i + j] = (prod[i + j] + mul_mod(a[i], b[j], p)) % p;
            }
        }
        for k in (3..5).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &fi) in f.iter().enumerate() {
                let idx = k - 3 + i;
                prod[idx] = (prod[idx] + p - mul_mod(c, fi, p)) % p;
            }
        }
        [prod[0], prod[1], prod[2]]
    };
    let mut acc = [1u64, 0, 0];
    let mut base = [0u64, 1, 0];
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_f(&acc, &base);
        }
        base = mulmod_f(&base, &base);
        e >>= 1;
    }
    acc[1] = (acc[1] + p - 1) % p;
    let g = poly_gcd(vec![f[0], f[1], f[2], 1], acc.to_vec(), p);
    (g.len() - 1) as u32
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_gcd(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let mut a = trim(a);
    let mut b = trim(b);
    while !(b.len() == 1 && b[0] == 0) {
        // a mod b
        let lead_inv = inv_mod(*b.last().unwrap(), p).unwrap();
        while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
            let shift = a.len() - b.len();
            let c = mul_mod(*a.last().unwrap(), lead_inv, p);
            for (i, &bi) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + p - mul_mod(c, bi, p)) % p;
            }
            a = trim(a);
            if a.len() < b.len() || (a.len() == 1 && a[0] == 0) {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Local data at p together with the p-minimal model reached.
pub(crate) fn tate_with_model(model: &WeierstrassModel, p: u64) -> (LocalData, WeierstrassModel) {
    let fp = Fp { p, pb: BigInt::from(p) };
    let pi = BigInt::from(p);
    let pi2 = &pi * &pi;
    let pi3 = &pi2 * &pi;
    let pi4 = &pi2 * &pi2;
    let pi6 = &pi3 * &pi3;
    let half = if p == 2 { BigInt::zero() } else { BigInt::from(p.div_ceil(2)) };
    let zero = BigInt::zero();
    let one = BigInt::one();
    let mut c = model.clone();
    loop {
        let delta = c.discriminant();
        let vd = valuation(&delta, p);
        let done = |kodaira, f, cp, reduction, c: WeierstrassModel| {
            (
                LocalData {
                    prime: p,
                    kodaira,
                    conductor_exponent: f,
                    tamagawa: cp,
                    reduction,
                    min_disc_valuation: vd,
                },
                c,
            )
        };
        if vd == 0 {
            return done(Kodaira::I(0), 0, 1, Reduction::Good, c);
        }
        // move the singular point to (0, 0)
        let (b2, b4, b6) = (c.b2(), c.b4(), c.b6());
        let (r, t) = if p == 2 {
            if fp.divides(&b2) {
                let r = fp.reduce(&c.a4);
                let t = fp.reduce(&(((&r + &c.a2) * &r + &c.a4) * &r + &c.a6));
                (r, t)
            } else {
                let inv = fp.inv(&c.a1);
                let r = &inv * &c.a3;
                let t = &inv * (&c.a4 + &r * &r);
                (r, t)
            }
        } else if p == 3 {
            let r = if fp.divides(&b2) { fp.reduce(&-&b6) } else { -fp.inv(&b2) * &b4 };
            let t = &c.a1 * &r + &c.a3;
            (r, t)
        } else {
            let c4 = c.c4();
            let r = if fp.divides(&c4) {
                -fp.inv(&BigInt::from(12)) * &b2
            } else {
                -fp.inv(&(BigInt::from(12) * &c4)) * (c.c6() + &b2 * &c4)
            };
            let t = -&half * (&c.a1 * &r + &c.a3);
            (r, t)
        };
        let r = fp.reduce(&r);
        let t = fp.reduce(&t);
        c = c.rst(&r, &zero, &t);
        let (b2, b6, b8) = (c.b2(), c.b6(), c.b8());

        if !fp.divides(&b2) {
            let split = fp.quad_roots(&one, &c.a1, &-&c.a2);
            let (cp, red) = if split {
                (vd, Reduction::Split)
            } else {
                (if vd.is_multiple_of(2) { 2 } else { 1 }, Reduction::NonSplit)
            };
            return done(Kodaira::I(vd), 1, cp, red, c);
        }
        if valuation(&c.a6, p) < 2 {
            return done(Kodaira::II, vd, 1, Reduction::Additive, c);
        }
        if valuation(&b8, p) < 3 {
            return done(Kodaira::III, vd - 1, 2, Reduction::Additive, c);
        }
        if valuation(&b6, p) < 3 {
            let cp = if fp.quad_roots(&one, &(&c.a3 / &pi), &-(&c.a6 / &pi2)) { 3 } else { 1 };
            return done(Kodaira::IV, vd - 2, cp, Reduction::Additive, c);
        }
        // now p | a1, a2; p² | a3, a4; p³ | a6
        let (s, t) = if p == 2 {
            (fp.reduce(&c.a2), &pi * fp.reduce(&(&c.a6 / &pi2)))
        } else if p == 3 {
            (c.a1.clone(), c.a3.clone())
        } else {
            (-&c.a1 * &half, -&c.a3 * &half)
        };
        c = c.rst(&zero, &s, &t);
        let b = &c.a2 / &pi;
        let cc = &c.a4 / &pi2;
        let d = &c.a6 / &pi3;
        let bb = &b * &b;
        let ccc = &cc * &cc;
        let bc = &b * &cc;
        let w = 27 * &d * &d - &bb * &ccc + 4 * &b * &bb * &d - 18 * &bc * &d + 4 * &cc * &ccc;
        let x = 3 * &cc - &bb;
        let sw = if fp.divides(&w) {
            if fp.divides(&x) {
                3
            } else {
                2
            }
        } else {
            1
        };
        if sw == 1 {
            let cp = 1 + fp.cubic_roots(&b, &cc, &d);
            return done(Kodaira::IStar(0), vd - 4, cp, Reduction::Additive, c);
        }
        if sw == 2 {
            // double root moved to T = 0
            let r = if p == 2 {
                fp.reduce(&cc)
            } else if p == 3 {
                &cc * fp.inv(&b)
            } else {
                (&bc - 9 * &d) * fp.inv(&(2 * &x))
            };
            let r = &pi * fp.reduce(&r);
            c = c.rst(&r, &zero, &zero);
            let mut m = 1u32;
            let mut mx = pi2.clone();
            let mut my = pi2.clone();
            let cp;
            loop {
                let xa3 = &c.a3 / &my;
                let xa6 = &c.a6 / (&mx * &my);
                if fp.divides(&(&xa3 * &xa3 + 4 * &xa6)) {
                    let t = if p == 2 { &my * fp.reduce(&xa6) } else { &my * fp.reduce(&(-&xa3 * &half)) };
                    c = c.rst(&zero, &zero, &t);
                    my = &my * &pi;
                    m += 1;
                    let xa2 = &c.a2 / &pi;
                    let xa4 = &c.a4 / (&pi * &mx);
                    let xa6 = &c.a6 / (&mx * &my);
                    if fp.divides(&(&xa4 * &xa4 - 4 * &xa2 * &xa6)) {
                        let r = if p == 2 {
                            &mx * fp.reduce(&(&xa6 * fp.inv(&xa2)))
                        } else {
                            &mx * fp.reduce(&(-&xa4 * fp.inv(&(2 * &xa2))))
                        };
                        c = c.rst(&r, &zero, &zero);
                        mx = &mx * &pi;
                        m += 1;
                    } else {
                        cp = if fp.quad_roots(&xa2, &xa4, &xa6) { 4 } else { 2 };
                        break;
                    }
                } else {
                    cp = if fp.quad_roots(&one, &xa3, &-&xa6) { 4 } else { 2 };
                    break;
                }
            }
            return done(Kodaira::IStar(m), vd - m - 4, cp, Reduction::Additive, c);
        }
        // triple root moved to T = 0
        let r = if p == 2 {
            b.clone()
        } else if p == 3 {
            fp.reduce(&-&d)
        } else {
            -&b * fp.inv(&BigInt::from(3))
        };
        let r = &pi * fp.reduce(&r);
        c = c.rst(&r, &zero, &zero);
        let x3 = &c.a3 / &pi2;
        let x6 = &c.a6 / &pi4;
        if !fp.divides(&(&x3 * &x3 + 4 * &x6)) {
            let cp = if fp.quad_roots(&one, &x3, &-&x6) { 3 } else { 1 };
            return done(Kodaira::IVStar, vd - 6, cp, Reduction::Additive, c);
        }
        let t = if p == 2 { x6.clone() } else { &x3 * &half };
        let t = -&pi2 * fp.reduce(&t);
        c = c.rst(&zero, &zero, &t);
        if valuation(&c.a4, p) < 4 {
            return done(Kodaira::IIIStar, vd - 7, 2, Reduction::Additive, c);
        }
        if valuation(&c.a6, p) < 6 {
            return done(Kodaira::IIStar, vd - 8, 1, Reduction::Additive, c);
        }
        // not minimal at p: scale down and start over
        c = WeierstrassModel {
            a1: &c.a1 / &pi,
            a2: &c.a2 / &pi2,
            a3: &c.a3 / &pi3,
            a4: &c.a4 / &pi4,
            a6: &c.a6 / &pi6,
        };
    }
}

/// Local reduction data at p (minimalizing at p first if needed).
pub fn tate_local(model: &WeierstrassModel, p: u64) -> LocalData {
    tate_with_model(model, p).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_ints(a).unwrap()
    }

    #[test]
    fn curve_a_locally() {
        let a = model([0, 0, 0, -1, 0]);
        let at5 = tate_local(&a, 5);
        assert_eq!(at5.reduction, Reduction::Good);
        assert_eq!((at5.conductor_exponent, at5.tamagawa), (0, 1));
        let at2 = tate_local(&a, 2);
        assert_eq!(at2.conductor_exponent, 5);
        assert!(at2.is_consistent());
    }

    #[test]
    fn rank_one_37a() {
        let e = model([0, 0, 1, -1, 0]);
        let l = tate_local(&e, 37);
        assert_eq!(l.kodaira, Kodaira::I(1));
        // root number −1 = a_37 for prime conductor
        assert_eq!(l.reduction, Reduction::NonSplit);
        assert_eq!(l.tamagawa, 1);
    }

    #[test]
    fn eleven_a1() {
        // 11a1: [0,-1,1,-10,-20], split I5, c = 5
        let e = model([0, -1, 1, -10, -20]);
        let l = tate_local(&e, 11);
        assert_eq!(l.kodaira, Kodaira::I(5));
        assert_eq!(l.reduction, Reduction::Split);
        assert_eq!(l.tamagawa, 5);
    }

    #[test]
    fn non_minimal_model_is_reduced() {
        // 37a with a_i scaled by u^i
        for u in [2i64, 3] {
            let big = WeierstrassModel::from_ints([0, 0, u * u * u, -u.pow(4), 0]).unwrap();
            let l = tate_local(&big, u as u64);
            assert_eq!(l.reduction, Reduction::Good, "u={u}");
            assert_eq!(l.min_disc_valuation, 0);
        }
    }

    #[test]
    fn cubic_root_counts() {
        // (T − 1)(T − 2)(T − 3) mod 101
        let f = [(101 - 6) as u64, 11, 101 - 6];
        assert_eq!(distinct_roots_cubic(f, 101), 3);
        // T³ − 2 mod 7: 2 is not a cube mod 7
        assert_eq!(distinct_roots_cubic([5, 0, 0], 7), 0);
        // (T − 1)² (T − 5) mod 97 = T³ − 7T² + 11T − 5
        assert_eq!(distinct_roots_cubic([92, 11, 90], 97), 2);
    }

    #[test]
    fn kodaira_display() {
        assert_eq!(Kodaira::IStar(2).to_string(), "I2*");
        assert_eq!(Kodaira::IIIStar.to_string(), "III*");
        assert_eq!(Kodaira::I(0).to_string(), "I0");
    }
}

//! Traces of Frobenius at good primes.

use num_bigint::BigInt;

use super::model::{mod_u64, WeierstrassModel};
use crate::arith::{inv_mod, isqrt_u64, legendre};

/// Below this bound [`ap`] counts points directly.
pub const NAIVE_BOUND: u64 = 1 << 16;

/// a_p = p + 1 − #E(F_p) for p of good reduction on `m`.
pub fn ap(m: &WeierstrassModel, p: u64) -> i64 {
    FrobeniusCounter::new(m).ap(p)
}

/// Direct count: brute force at 2, a character sum otherwise.
pub fn ap_naive(m: &WeierstrassModel, p: u64) -> i64 {
    FrobeniusCounter::new(m).naive(p)
}

/// Shanks–Mestre with the quadratic twist; requires p ≥ 5.
pub fn ap_bsgs(m: &WeierstrassModel, p: u64) -> i64 {
    FrobeniusCounter::new(m).bsgs(p)
}

/// Model data reduced once so that many primes can be counted cheaply.
#[derive(Clone, Debug)]
pub struct FrobeniusCounter {
    ai: [BigInt; 5],
    cubic: [BigInt; 4],
    short: [BigInt; 2],
}

impl FrobeniusCounter {
    pub fn new(m: &WeierstrassModel) -> Self {
        FrobeniusCounter {
            ai: m.coefficients().map(|c| c.clone()),
            cubic: m.two_division_cubic(),
            short: [BigInt::from(-27) * m.c4(), BigInt::from(-54) * m.c6()],
        }
    }

    pub fn ap(&self, p: u64) -> i64 {
        let a = if p < NAIVE_BOUND { self.naive(p) } else { self.bsgs(p) };
        assert!(
            (a as i128 * a as i128) <= 4 * p as i128,
            "Hasse bound violated: a_{p} = {a}"
        );
        a
    }

    pub fn naive(&self, p: u64) -> i64 {
        if p == 2 {
            let [a1, a2, a3, a4, a6] = self.ai.each_ref().map(|c| mod_u64(c, 2));
            let mut count = 1i64;
            for x in 0..2 {
                for y in 0..2 {
                    let lhs = y * y + a1 * x * y + a3 * y;
                    let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                    if (lhs + rhs) % 2 == 0 {
                        count += 1;
                    }
                }
            }
            return 3 - count;
        }
        let f = Field::plain(p);
        let [c3, c2, c1, c0] = self.cubic.each_ref().map(|c| mod_u64(c, p));
        let mut square = vec![false; p as usize];
        let (mut sq, mut odd) = (0u64, 1u64);
        for _ in 0..=p / 2 {
            square[sq as usize] = true;
            sq = f.add(sq, odd);
            odd = f.add(odd, 2);
        }
        // forward differences of the cubic: additions only in the loop
        let val = |x: u64| f.add(f.mul(f.add(f.mul(f.add(f.mul(c3, x), c2), x), c1), x), c0);
        let (v0, v1, v2, v3) = (val(0), val(1 % p), val(2 % p), val(3 % p));
        let mut v = v0;
        let mut d1 = f.sub(v1, v0);
        let mut d2 = f.sub(f.sub(v2, v1), d1);
        let d3 = f.sub(f.sub(f.sub(v3, v2), f.sub(v2, v1)), d2);
        let mut sum = 0i64;
        for _ in 0..p {
            if v != 0 {
                sum += if square[v as usize] { 1 } else { -1 };
            }
            v = f.add(v, d1);
            d1 = f.add(d1, d2);
            d2 = f.add(d2, d3);
        }
        -sum
    }

    pub fn bsgs(&self, p: u64) -> i64 {
        assert!(p >= 5, "BSGS needs p ≥ 5");
        let f = Field::new(p);
        let a = f.enter(mod_u64(&self.short[0], p));
        let b = f.enter(mod_u64(&self.short[1], p));
        let amax = isqrt_u64(4 * p);
        let (lo, hi) = (p + 1 - amax, p + 1 + amax);
        let mut state = p.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let (mut l1, mut l2) = (1u64, 1u64);
        for _ in 0..64 {
            let x = f.enter(next() % p);
            let v = f.add(f.add(f.mul(f.mul(x, x), x), f.mul(a, x)), b);
            if v == 0 {
                continue;
            }
            // (xv, v²) lies on Y² = X³ + av²X + bv³, the twist by v
            let v2 = f.mul(v, v);
            let curve = Jacobian { f, a: f.mul(a, v2) };
            let pt = (f.mul(x, v), v2);
            let on_e = legendre(f.leave(v), p) == 1;
            let ord = match curve.multiples_in(pt, lo, hi) {
                Multiples::Order(o) => o,
                Multiples::Within(ns) if ns.len() == 1 => {
                    let t = p as i64 + 1 - ns[0] as i64;
                    return if on_e { t } else { -t };
                }
                Multiples::Within(ns) if ns.len() > 1 => ns[1] - ns[0],
                Multiples::Within(_) => break,
            };
            if on_e {
                l1 = lcm(l1, ord);
            } else {
                l2 = lcm(l2, ord);
            }
            match unique_trace(p, amax, l1, l2) {
                Some(Some(t)) => return t,
                Some(None) => {}
                None => break,
            }
        }
        self.naive(p)
    }
}

/// Some(Some(t)) if t is the only admissible trace, Some(None) if several,
/// None if none.
fn unique_trace(p: u64, amax: u64, l1: u64, l2: u64) -> Option<Option<i64>> {
    let amax = amax as i64;
    let base = p as i64 + 1;
    // p + 1 − t ≡ 0 (mod l1) and p + 1 + t ≡ 0 (mod l2)
    let (step, first) = if l1 >= l2 {
        let l = l1 as i64;
        (l, (base - (-amax)).rem_euclid(l))
    } else {
        let l = l2 as i64;
        (l, (-(base + (-amax))).rem_euclid(l))
    };
    let mut t = -amax + first;
    let mut found = None;
    while t <= amax {
        if (base - t) % l1 as i64 == 0 && (base + t) % l2 as i64 == 0 {
            if found.is_some() {
                return Some(None);
            }
            found = Some(t);
        }
        t += step;
    }
    found.map(Some)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Arithmetic mod p; Montgomery form (R = 2³²) when p < 2³¹.
#[derive(Clone, Copy)]
struct Field {
    p: u64,
    mont: bool,
    pinv: u32,
    r2: u64,
}

impl Field {
    fn plain(p: u64) -> Self {
        Field { p, mont: false, pinv: 0, r2: 0 }
    }

    fn new(p: u64) -> Self {
        if p >= 1 << 31 {
            return Self::plain(p);
        }
        let mut inv = p as u32;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub((p as u32).wrapping_mul(inv)));
        }
        let r2 = ((1u128 << 64) % p as u128) as u64;
        Field { p, mont: true, pinv: inv.wrapping_neg(), r2 }
    }

    #[inline]
    fn redc(self, t: u64) -> u64 {
        let m = (t as u32).wrapping_mul(self.pinv) as u64;
        let u = (t + m * self.p) >> 32;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        if self.mont {
            self.redc(a * b)
        } else if self.p < 1 << 32 {
            a * b % self.p
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    fn enter(self, x: u64) -> u64 {
        if self.mont {
            self.mul(x % self.p, self.r2)
        } else {
            x % self.p
        }
    }

    fn leave(self, x: u64) -> u64 {
        if self.mont {
            self.redc(x)
        } else {
            x
        }
    }

    fn one(self) -> u64 {
        self.enter(1)
    }

    fn inv(self, x: u64) -> u64 {
        self.enter(inv_mod(self.leave(x), self.p).expect("unit"))
    }

    #[inline]
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn dbl(self, a: u64) -> u64 {
        self.add(a, a)
    }

    #[inline]
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
}

/// (X, Y, Z) with x = X/Z², y = Y/Z³; Z = 0 is the origin.
type Jpt = (u64, u64, u64);

const ORIGIN: Jpt = (1, 1, 0);

struct Jacobian {
    f: Field,
    a: u64,
}

impl Jacobian {
    fn double(&self, (x, y, z): Jpt) -> Jpt {
        let f = self.f;
        if z == 0 || y == 0 {
            return ORIGIN;
        }
        let yy = f.mul(y, y);
        let s = f.dbl(f.dbl(f.mul(x, yy)));
        let zz = f.mul(z, z);
        let xx = f.mul(x, x);
        let m = f.add(f.add(f.dbl(xx), xx), f.mul(self.a, f.mul(zz, zz)));
        let x3 = f.sub(f.mul(m, m), f.dbl(s));
        let y3 = f.sub(f.mul(m, f.sub(s, x3)), f.dbl(f.dbl(f.dbl(f.mul(yy, yy)))));
        let z3 = f.dbl(f.mul(y, z));
        (x3, y3, z3)
    }

    fn add(&self, u: Jpt, v: Jpt) -> Jpt {
        let f = self.f;
        if u.2 == 0 {
            return v;
        }
        if v.2 == 0 {
            return u;
        }
        let z1z1 = f.mul(u.2, u.2);
        let z2z2 = f.mul(v.2, v.2);
        let u1 = f.mul(u.0, z2z2);
        let u2 = f.mul(v.0, z1z1);
        let s1 = f.mul(u.1, f.mul(v.2, z2z2));
        let s2 = f.mul(v.1, f.mul(u.2, z1z1));
        if u1 == u2 {
            return if s1 == s2 { self.double(u) } else { ORIGIN };
        }
        let h = f.sub(u2, u1);
        let r = f.sub(s2, s1);
        let hh = f.mul(h, h);
        let hhh = f.mul(hh, h);
        let v1 = f.mul(u1, hh);
        let x3 = f.sub(f.sub(f.mul(r, r), hhh), f.add(v1, v1));
        let y3 = f.sub(f.mul(r, f.sub(v1, x3)), f.mul(s1, hhh));
        let z3 = f.mul(h, f.mul(u.2, v.2));
        (x3, y3, z3)
    }

    fn mul(&self, u: Jpt, mut k: u64) -> Jpt {
        let mut acc = ORIGIN;
        let mut base = u;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.double(base);
            k >>= 1;
        }
        acc
    }

    /// Affine coordinates of finite points, one inversion for the batch.
    fn normalize(&self, pts: &[Jpt]) -> Vec<Option<(u64, u64)>> {
        let f = self.f;
        let mut prefix = Vec::with_capacity(pts.len());
        let mut acc = f.one();
        for q in pts {
            prefix.push(acc);
            if q.2 != 0 {
                acc = f.mul(acc, q.2);
            }
        }
        let mut inv = f.inv(acc);
        let mut out = vec![None; pts.len()];
        for (i, q) in pts.iter().enumerate().rev() {
            if q.2 == 0 {
                continue;
            }
            let zinv = f.mul(inv, prefix[i]);
            inv = f.mul(inv, q.2);
            let z2 = f.mul(zinv, zinv);
            out[i] = Some((f.mul(q.0, z2), f.mul(q.1, f.mul(z2, zinv))));
        }
        out
    }

    /// All N in [lo, hi] with N·P = O, or the order of P if it is tiny.
    fn multiples_in(&self, (px, py): (u64, u64), lo: u64, hi: u64) -> Multiples {
        let pt = (px, py, self.f.one());
        let m = isqrt_u64(hi - lo + 1) + 1;
        let mut steps = Vec::with_capacity(m as usize);
        let mut cur = ORIGIN;
        for j in 1..=m {
            cur = self.add(cur, pt);
            if cur.2 == 0 {
                return Multiples::Order(j);
            }
            steps.push(cur);
        }
        let mut baby: Vec<(u64, u64, u64)> = self
            .normalize(&steps)
            .into_iter()
            .zip(1..)
            .map(|(q, j)| {
                let (x, y) = q.expect("finite baby step");
                (x, y, j)
            })
            .collect();
        baby.sort_unstable();
        let stride = 2 * m + 1;
        let giant = self.mul(pt, stride);
        let count = (hi - lo) / stride + 2;
        let mut giants = Vec::with_capacity(count as usize);
        let mut r = self.mul(pt, lo + m);
        for _ in 0..count {
            giants.push(r);
            r = self.add(r, giant);
        }
        let mut found = Vec::new();
        for (i, g) in self.normalize(&giants).into_iter().enumerate() {
            let c = lo + m + i as u64 * stride;
            match g {
                None => found.push(c),
                Some((x, y)) => {
                    let start = baby.partition_point(|b| b.0 < x);
                    for &(bx, by, j) in &baby[start..] {
                        if bx != x {
                            break;
                        }
                        found.push(if by == y { c - j } else { c + j });
                    }
                }
            }
        }
        found.retain(|n| (lo..=hi).contains(n));
        found.sort_unstable();
        found.dedup();
        Multiples::Within(found)
    }
}

enum Multiples {
    Order(u64),
    Within(Vec<u64>),
}

//! Integer helpers: square-free sieving, 64-bit factorization, the
//! Kronecker symbol and the twist-eligibility predicates of the four
//! fixed curves.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The four fixed base curves A, B, C, D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveLabel {
    A,
    B,
    C,
    D,
}

impl CurveLabel {
    pub const ALL: [CurveLabel; 4] = [CurveLabel::A, CurveLabel::B, CurveLabel::C, CurveLabel::D];

    pub fn as_byte(self) -> u8 {
        match self {
            CurveLabel::A => b'A',
            CurveLabel::B => b'B',
            CurveLabel::C => b'C',
            CurveLabel::D => b'D',
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            b'A' => Some(CurveLabel::A),
            b'B' => Some(CurveLabel::B),
            b'C' => Some(CurveLabel::C),
            b'D' => Some(CurveLabel::D),
            _ => None,
        }
    }

    /// Residue classes (modulus, residues) containing every d that can
    /// satisfy [`condition_star`]. Square-freeness is checked separately.
    pub fn eligible_classes(self) -> (u64, Vec<u64>) {
        let modulus = match self {
            CurveLabel::A => 8,
            CurveLabel::B => 12,
            CurveLabel::C => 22,
            CurveLabel::D => 56,
        };
        let residues = (0..modulus)
            .filter(|&r| residue_condition(self, r))
            .collect();
        (modulus, residues)
    }
}

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_byte() as char)
    }
}

impl FromStr for CurveLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(CurveLabel::A),
            "B" | "b" => Ok(CurveLabel::B),
            "C" | "c" => Ok(CurveLabel::C),
            "D" | "d" => Ok(CurveLabel::D),
            other => Err(Error::InvalidArgument(format!("unknown curve label {other:?}"))),
        }
    }
}

/// A positive integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInt {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    /// Builds from a factor list; primes must be strictly increasing.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut value: u64 = 1;
        let mut last = 1;
        for &(p, e) in &factors {
            if p <= last || e == 0 {
                return Err(Error::Contract(format!("bad factor list {factors:?}")));
            }
            last = p;
            for _ in 0..e {
                value = value
                    .checked_mul(p)
                    .ok_or_else(|| Error::Overflow("factored value exceeds 64 bits".into()))?;
            }
        }
        Ok(FactoredInt { value, factors })
    }

    /// Factors `n` by trial division and Pollard rho.
    pub fn factor(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cannot factor 0".into()));
        }
        Ok(FactoredInt {
            value: n,
            factors: factor_u64(n),
        })
    }

    pub fn one() -> Self {
        FactoredInt {
            value: 1,
            factors: Vec::new(),
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse via extended Euclid; `None` when not invertible.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho; `n` must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..128.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Full factorization of a 64-bit integer, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut primes = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            primes.push(m);
            continue;
        }
        let f = pollard_rho(m);
        stack.push(f);
        stack.push(m / f);
    }
    primes.sort_unstable();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Factors |n| (n ≠ 0) into primes, dividing out `hints` first. Prime
/// factors above 64 bits are reported as an overflow.
pub fn factor_bigint(n: &BigInt, hints: &[u64]) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    let mut rest = n.abs();
    let mut found: Vec<(u64, u32)> = Vec::new();
    let strip = |rest: &mut BigInt, p: u64, found: &mut Vec<(u64, u32)>| {
        let pb = BigInt::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            *rest = q;
            e += 1;
        }
        if e > 0 {
            found.push((p, e));
        }
    };
    for &p in hints {
        if p > 1 {
            strip(&mut rest, p, &mut found);
        }
    }
    for p in primes_up_to(1 << 12) {
        if rest.is_one() {
            break;
        }
        strip(&mut rest, p, &mut found);
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            for (p, e) in factor_u64(small) {
                found.push((p, e));
            }
            continue;
        }
        if is_probable_prime_big(&m) {
            return Err(Error::Overflow(format!("prime factor {m} exceeds 64 bits")));
        }
        let f = pollard_rho_big(&m);
        stack.push(&m / &f);
        stack.push(f);
    }
    found.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for (p, e) in found {
        match out.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => out.push((p, e)),
        }
    }
    // hints may be composite; split them
    let mut primes = Vec::new();
    for (p, e) in out {
        if is_prime_u64(p) {
            primes.push((p, e));
        } else {
            for (q, f) in factor_u64(p) {
                primes.push((q, f * e));
            }
        }
    }
    primes.sort_unstable();
    let mut merged: Vec<(u64, u32)> = Vec::new();
    for (p, e) in primes {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(merged)
}

fn is_probable_prime_big(n: &BigInt) -> bool {
    let one = BigInt::one();
    let two = BigInt::from(2);
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho_big(n: &BigInt) -> BigInt {
    let one = BigInt::one();
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = BigInt::from(2);
        let mut y = x.clone();
        let mut g = one.clone();
        while g.is_one() {
            x = f(&x);
            y = f(&f(&y));
            g = (&x - &y).abs().gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1;
    }
}

/// Primes up to and including `n` (Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Integer square root (floor).
pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Default sieve window (entries) and memory budget.
pub const DEFAULT_WINDOW: u64 = 1 << 24;
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 30;
// cnt (u8) + offset (u32) + flag (u8) + about three u32 primes
const BYTES_PER_ENTRY: u64 = 18;

/// Streams the square-free integers in `1..=limit` with their factorizations,
/// sieving `window` integers at a time.
pub fn squarefree_stream(limit: u64, window: u64) -> Result<SquarefreeStream> {
    squarefree_stream_with_budget(limit, window, DEFAULT_SIEVE_BUDGET)
}

pub fn squarefree_stream_with_budget(limit: u64, window: u64, budget: u64) -> Result<SquarefreeStream> {
    if limit == 0 || window == 0 {
        return Err(Error::InvalidArgument("limit and window must be positive".into()));
    }
    let entries = window.min(limit);
    let bytes = entries * BYTES_PER_ENTRY;
    if bytes > budget {
        return Err(Error::Capacity {
            entries,
            bytes,
            budget,
        });
    }
    let primes = primes_up_to(isqrt_u64(limit))
        .into_iter()
        .map(|p| p as u32)
        .collect();
    Ok(SquarefreeStream {
        limit,
        window: entries,
        next_lo: 1,
        primes,
        seg: Segment::default(),
        pos: 0,
    })
}

#[derive(Default)]
struct Segment {
    lo: u64,
    squarefree: Vec<bool>,
    offsets: Vec<u32>,
    counts: Vec<u8>,
    small: Vec<u32>,
}

pub struct SquarefreeStream {
    limit: u64,
    window: u64,
    next_lo: u64,
    primes: Vec<u32>,
    seg: Segment,
    pos: usize,
}

impl SquarefreeStream {
    fn fill(&mut self) -> bool {
        if self.next_lo > self.limit {
            return false;
        }
        let lo = self.next_lo;
        let hi = (lo + self.window - 1).min(self.limit);
        let len = (hi - lo + 1) as usize;
        self.next_lo = hi + 1;
        let seg = &mut self.seg;
        seg.lo = lo;
        seg.squarefree.clear();
        seg.squarefree.resize(len, true);
        seg.counts.clear();
        seg.counts.resize(len, 0);
        let root = isqrt_u64(hi);
        let first_multiple = |p: u64| -> usize { (lo.div_ceil(p) * p - lo) as usize };
        for &p in &self.primes {
            let p = p as u64;
            if p > root {
                break;
            }
            let mut j = first_multiple(p);
            while j < len {
                seg.counts[j] += 1;
                j += p as usize;
            }
            let sq = p * p;
            if sq <= hi {
                let mut j = first_multiple(sq);
                while j < len {
                    seg.squarefree[j] = false;
                    j += sq as usize;
                }
            }
        }
        seg.offsets.clear();
        seg.offsets.reserve(len + 1);
        let mut acc = 0u32;
        for j in 0..len {
            seg.offsets.push(acc);
            if seg.squarefree[j] {
                acc += seg.counts[j] as u32;
            }
        }
        seg.offsets.push(acc);
        seg.small.clear();
        seg.small.resize(acc as usize, 0);
        seg.counts.iter_mut().for_each(|c| *c = 0);
        for &p in &self.primes {
            if p as u64 > root {
                break;
            }
            let mut j = first_multiple(p as u64);
            while j < len {
                if seg.squarefree[j] {
                    let slot = seg.offsets[j] as usize + seg.counts[j] as usize;
                    seg.small[slot] = p;
                    seg.counts[j] += 1;
                }
                j += p as usize;
            }
        }
        self.pos = 0;
        true
    }
}

impl Iterator for SquarefreeStream {
    type Item = FactoredInt;

    fn next(&mut self) -> Option<FactoredInt> {
        loop {
            while self.pos < self.seg.squarefree.len() {
                let j = self.pos;
                self.pos += 1;
                if !self.seg.squarefree[j] {
                    continue;
                }
                let value = self.seg.lo + j as u64;
                let (a, b) = (self.seg.offsets[j] as usize, self.seg.offsets[j + 1] as usize);
                let mut factors = Vec::with_capacity(b - a + 1);
                let mut rest = value;
                for &p in &self.seg.small[a..b] {
                    factors.push((p as u64, 1));
                    rest /= p as u64;
                }
                if rest > 1 {
                    factors.push((rest, 1));
                }
                return Some(FactoredInt { value, factors });
            }
            if !self.fill() {
                return None;
            }
        }
    }
}

/// Number of positive divisors.
pub fn divisor_count(n: &FactoredInt) -> u64 {
    n.factors.iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Kronecker symbol (a/n), computed by binary reciprocity without factoring.
pub fn kronecker(a: i64, n: i64) -> i32 {
    kronecker_i128(a as i128, n as i128)
}

pub fn kronecker_i128(a: i128, n: i128) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut a = a;
    let mut b = n;
    let mut k = 1;
    let v = b.trailing_zeros();
    b >>= v;
    if v % 2 == 1 {
        let r = a.rem_euclid(8);
        if r == 3 || r == 5 {
            k = -k;
        }
    }
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    a = a.rem_euclid(b);
    while a != 0 {
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            let r = b % 8;
            if r == 3 || r == 5 {
                k = -k;
            }
        }
        if a % 4 == 3 && b % 4 == 3 {
            k = -k;
        }
        (a, b) = (b % a, a);
    }
    if b == 1 {
        k
    } else {
        0
    }
}

/// Legendre symbol for an odd prime `p`, returned as 0, 1 or -1.
pub fn legendre(a: u64, p: u64) -> i32 {
    kronecker_i128((a % p) as i128, p as i128)
}

fn residue_condition(curve: CurveLabel, d: u64) -> bool {
    match curve {
        CurveLabel::A => matches!(d % 8, 1 | 3),
        CurveLabel::B => matches!(d % 12, 1 | 5),
        CurveLabel::C => d % 2 == 1 && matches!(d % 11, 1 | 3 | 4 | 5 | 9),
        CurveLabel::D => d % 2 == 1 && matches!(d % 7, 1 | 2 | 4) && d % 8 != 3,
    }
}

/// The twist-eligibility condition (*) of the given curve.
pub fn condition_star(curve: CurveLabel, d: &FactoredInt) -> bool {
    d.is_squarefree() && residue_condition(curve, d.value())
}

/// l = l1 + floor((l2 + 1) / 2), where l_i counts the primes of d that are
/// congruent to i mod 3.
pub fn b_curve_l_invariant(d: &FactoredInt) -> Result<u32> {
    if !d.is_squarefree() || d.value().is_multiple_of(2) || d.value().is_multiple_of(3) {
        return Err(Error::Contract(format!(
            "l-invariant needs square-free d prime to 6, got {}",
            d.value()
        )));
    }
    let l1 = d.primes().filter(|p| p % 3 == 1).count() as u32;
    let l2 = d.primes().filter(|p| p % 3 == 2).count() as u32;
    Ok(l1 + l2.div_ceil(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn stream_small_limits() {
        let got: Vec<u64> = squarefree_stream(10, 4).unwrap().map(|f| f.value()).collect();
        assert_eq!(got, vec![1, 2, 3, 5, 6, 7, 10]);
        let one: Vec<_> = squarefree_stream(1, 16).unwrap().collect();
        assert_eq!(one, vec![FactoredInt::one()]);
        let upto49: Vec<u64> = squarefree_stream(49, 7).unwrap().map(|f| f.value()).collect();
        assert!(!upto49.contains(&48) && !upto49.contains(&49));
        assert!(upto49.contains(&47));
    }

    #[test]
    fn stream_matches_trial_division() {
        for window in [1u64, 3, 64, 1000, 5000] {
            let mut expected = (1..=5000u64).filter_map(|n| {
                let f = trial_factor(n);
                f.iter().all(|&(_, e)| e == 1).then_some((n, f))
            });
            for got in squarefree_stream(5000, window).unwrap() {
                let (n, f) = expected.next().unwrap();
                assert_eq!(got.value(), n);
                assert_eq!(got.factors(), &f[..]);
            }
            assert!(expected.next().is_none());
        }
    }

    #[test]
    fn stream_factorizations_multiply_back() {
        for f in squarefree_stream(1_000_000, 1 << 16).unwrap() {
            let prod: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, f.value());
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn window_budget_is_enforced() {
        let err = squarefree_stream_with_budget(1 << 30, 1 << 24, 1 << 20);
        assert!(matches!(err, Err(Error::Capacity { .. })));
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(&FactoredInt::one()), 1);
        assert_eq!(divisor_count(&FactoredInt::factor(12).unwrap()), 6);
        assert_eq!(divisor_count(&FactoredInt::factor(105).unwrap()), 8);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-7, 3), -1);
        assert_eq!(kronecker(-7, 11), 1);
        for n in 1..50 {
            assert_eq!(kronecker(1, n), 1);
        }
        assert_eq!(kronecker(2, 0), 0);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(1, 2), 1);
        assert_eq!(kronecker(-1, -1), -1);
    }

    proptest! {
        #[test]
        fn kronecker_matches_euler_criterion(a in -10_000i64..10_000, pi in 1usize..200) {
            let p = primes_up_to(1300)[pi];
            let r = a.rem_euclid(p as i64) as u64;
            let euler = pow_mod(r, (p - 1) / 2, p);
            let expected = if r == 0 { 0 } else if euler == 1 { 1 } else { -1 };
            prop_assert_eq!(kronecker(a, p as i64), expected);
        }

        #[test]
        fn kronecker_multiplicative_in_modulus(a in -500i64..500, m in 1i64..300, n in 1i64..300) {
            prop_assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
        }

        #[test]
        fn factor_u64_is_exact(n in 1u64..u64::MAX) {
            let f = factor_u64(n);
            let mut prod: u128 = 1;
            for &(p, e) in &f {
                prop_assert!(is_prime_u64(p));
                prod *= (p as u128).pow(e);
            }
            prop_assert_eq!(prod, n as u128);
        }
    }

    #[test]
    fn condition_star_examples() {
        let f = |n| FactoredInt::factor(n).unwrap();
        assert!(condition_star(CurveLabel::A, &f(17)));
        assert!(!condition_star(CurveLabel::D, &f(3)));
        assert!(!condition_star(CurveLabel::C, &f(2)));
        assert!(!condition_star(CurveLabel::A, &f(9)));
    }

    #[test]
    fn condition_star_depends_on_residue_only() {
        // the residue part of each predicate is periodic in the stated modulus
        for curve in CurveLabel::ALL {
            let period = match curve {
                CurveLabel::A => 8,
                CurveLabel::B => 12,
                CurveLabel::C => 22,
                CurveLabel::D => 56,
            };
            for r in 0..period {
                let base = residue_condition(curve, r);
                for k in 1..50 {
                    assert_eq!(residue_condition(curve, r + k * period), base);
                }
            }
            let (m, res) = curve.eligible_classes();
            assert_eq!(m, period);
            for r in 0..m {
                assert_eq!(res.contains(&r), residue_condition(curve, r));
            }
        }
    }

    #[test]
    fn l_invariant() {
        let f = |n| FactoredInt::factor(n).unwrap();
        assert_eq!(b_curve_l_invariant(&FactoredInt::one()).unwrap(), 0);
        assert_eq!(b_curve_l_invariant(&f(5)).unwrap(), 1);
        assert_eq!(b_curve_l_invariant(&f(35)).unwrap(), 2);
        assert!(b_curve_l_invariant(&f(15)).is_err());
    }

    #[test]
    fn bigint_factoring() {
        let n = BigInt::from(2u64.pow(6) * 3 * 19 * 29 * 643) * BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64);
        let f = factor_bigint(&-n, &[]).unwrap();
        assert_eq!(f, vec![(2, 6), (3, 1), (19, 1), (29, 1), (643, 1), (998_244_353, 1), (1_000_000_007, 1)]);
        let g = factor_bigint(&BigInt::from(3 * 35 * 35), &[35]).unwrap();
        assert_eq!(g, vec![(3, 1), (5, 2), (7, 2)]);
    }

    #[test]
    fn inverse_and_primality() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(6, 9), None);
        let primes = primes_up_to(10_000);
        for n in 0..10_000u64 {
            assert_eq!(is_prime_u64(n), primes.binary_search(&n).is_ok());
        }
        assert!(is_prime_u64(18446744073709551557));
    }
}

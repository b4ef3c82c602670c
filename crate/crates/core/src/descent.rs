//! Two-isogeny descent on the twists of E = E_1(5,2) and E' = E_2(5,2),
//! and the prime-factor predicates that go with it.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{kronecker, legendre, FactoredInt};
use crate::curves::valuation;
use crate::error::{Error, Result};

/// E'-coefficients (B, C) for the φ torsors.
pub const PHI_B: i64 = 16 * 23 * 3851;
pub const PHI_C: i64 = 16 * 31_381_059_609; // 2⁴·3²²
/// E-coefficients (B, C) for the φ̂ torsors.
pub const PHIHAT_B: i64 = -32 * 23 * 3851;
pub const PHIHAT_C: i64 = -64 * 19 * 29 * 643;

/// Primes dividing 2·Δ(E)·Δ(E').
pub const BAD_PRIMES: [u64; 7] = [2, 3, 19, 23, 29, 643, 3851];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TorsorKind {
    /// C_r for S^(φ)(E_d).
    Phi,
    /// C'_r for S^(φ̂)(E'_d).
    PhiHat,
}

impl TorsorKind {
    pub fn coefficients(self) -> (i64, i64) {
        match self {
            TorsorKind::Phi => (PHI_B, PHI_C),
            TorsorKind::PhiHat => (PHIHAT_B, PHIHAT_C),
        }
    }

    /// The odd part of the product M with r ∈ Δ(2·M·d).
    fn divisor_base(self) -> &'static [u64] {
        match self {
            TorsorKind::Phi => &[2, 3],
            TorsorKind::PhiHat => &[2, 19, 29, 643],
        }
    }
}

/// r·y² = r² + B·r·d·x² + C·d²·x⁴.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Torsor {
    pub kind: TorsorKind,
    pub r: i64,
    pub d: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Real,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "∞"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Torsor {
    pub fn new(kind: TorsorKind, r: i64, d: u64) -> Result<Self> {
        if r == 0 || d == 0 {
            return Err(Error::InvalidArgument("torsor needs r ≠ 0 and d > 0".into()));
        }
        for (n, what) in [(r.unsigned_abs(), "r"), (d, "d")] {
            if !FactoredInt::factor(n)?.is_squarefree() {
                return Err(Error::InvalidArgument(format!("{what} = {n} is not square-free")));
            }
        }
        Ok(Torsor { kind, r, d })
    }

    /// (B·r·d, C·d²) so that r·y² = r² + b·x² + c·x⁴.
    pub fn equation(&self) -> (BigInt, BigInt) {
        let (b, c) = self.kind.coefficients();
        let (r, d) = (BigInt::from(self.r), BigInt::from(self.d));
        (BigInt::from(b) * &r * &d, BigInt::from(c) * &d * &d)
    }

    /// Y² = a·x⁴ + c·x² + e with Y = r·y.
    fn quartic(&self) -> [BigInt; 5] {
        let (b, c) = self.equation();
        let r = BigInt::from(self.r);
        let z = BigInt::zero();
        [&r * c, z.clone(), &r * b, z, &r * &r * &r]
    }
}

/// Point search budget: 2·v(disc)+3 levels at odd p, v(disc)+5 at 2.
fn depth_cap(g: &[BigInt; 5], p: u64) -> u32 {
    let disc = quartic_discriminant(g);
    let v = valuation(&disc, p);
    if p == 2 {
        v + 5
    } else {
        2 * v + 3
    }
}

/// Discriminant of a·x⁴ + c·x² + e (odd coefficients zero).
fn quartic_discriminant(g: &[BigInt; 5]) -> BigInt {
    let (a, c, e) = (&g[0], &g[2], &g[4]);
    debug_assert!(g[1].is_zero() && g[3].is_zero());
    let inner = c * c - 4 * a * e;
    16 * a * e * &inner * &inner
}

fn eval_derivative(g: &[BigInt; 5], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for (i, c) in g.iter().take(4).enumerate() {
        acc = acc * x + c * (4 - i as i64);
    }
    acc
}

/// Coefficients (high degree first) of g(x0 + s·q) as a polynomial in s.
fn shifted(g: &[BigInt; 5], x0: &BigInt, q: &BigInt) -> [BigInt; 5] {
    let mut h = g.clone();
    // Taylor shift by x0
    for i in 0..4 {
        for j in 1..(5 - i) {
            let prev = h[j - 1].clone();
            h[j] += prev * x0;
        }
    }
    let mut scale = BigInt::one();
    for j in (0..5).rev() {
        h[j] *= &scale;
        scale *= q;
    }
    h
}

fn is_padic_square(x: &BigInt, p: u64) -> bool {
    if x.is_zero() {
        return true;
    }
    let v = valuation(x, p);
    if v % 2 == 1 {
        return false;
    }
    let unit = x / BigInt::from(p).pow(v);
    if p == 2 {
        unit.mod_floor(&BigInt::from(8)) == BigInt::one()
    } else {
        let u = unit.mod_floor(&BigInt::from(p)).to_u64().expect("residue");
        legendre(u, p) == 1
    }
}

struct Search {
    p: u64,
    pb: BigInt,
    cap: u32,
    hit_cap: bool,
}

impl Search {
    /// Is there x ≡ x0 (mod p^k) in ℤ_p with g(x) a square?
    fn zp(&mut self, g: &[BigInt; 5], x0: &BigInt, k: u32) -> bool {
        let q = self.pb.pow(k);
        let h = shifted(g, x0, &q);
        let g0 = &h[4];
        if g0.is_zero() || is_padic_square(g0, self.p) {
            return true;
        }
        let lambda = valuation(g0, self.p);
        let d = eval_derivative(g, x0);
        if !d.is_zero() && lambda > 2 * valuation(&d, self.p) {
            return true;
        }
        let tau = h[..4].iter().map(|c| valuation(c, self.p)).min().unwrap_or(u32::MAX);
        let slack = if self.p == 2 { 3 } else { 1 };
        if tau >= lambda.saturating_add(slack) {
            return false;
        }
        if k >= self.cap {
            self.hit_cap = true;
            return false;
        }
        if self.p == 2 {
            return (0..2u32).any(|s| self.zp(g, &(x0 + &q * s), k + 1));
        }
        // Children whose value has the content's valuation are decided
        // mod p; only roots of the reduced polynomial need a deeper look.
        let m = h.iter().map(|c| valuation(c, self.p)).min().expect("nonzero");
        let scale = self.pb.pow(m);
        let red: Vec<u64> = h
            .iter()
            .map(|c| (c / &scale).mod_floor(&self.pb).to_u64().expect("residue"))
            .collect();
        let p = self.p as u128;
        for s in 0..self.p {
            let v = red.iter().fold(0u128, |acc, &c| (acc * s as u128 + c as u128) % p) as u64;
            if v == 0 {
                if self.zp(g, &(x0 + &q * s), k + 1) {
                    return true;
                }
            } else if m % 2 == 0 && legendre(v, self.p) == 1 {
                return true;
            }
        }
        false
    }
}

fn real_solvable(g: &[BigInt; 5]) -> bool {
    let (a, c, e) = (&g[0], &g[2], &g[4]);
    !e.is_negative() || a.is_positive() || (c.is_positive() && c * c >= 4 * a * e)
}

/// Decides C(Q_v) ≠ ∅, or reports that the depth cap was reached.
pub fn try_locally_solvable(t: &Torsor, place: Place) -> Result<bool> {
    let g = t.quartic();
    let p = match place {
        Place::Real => return Ok(real_solvable(&g)),
        Place::Prime(p) => p,
    };
    // strip even powers of p from the content
    let mut g = g;
    let pb = BigInt::from(p);
    let p2 = &pb * &pb;
    while g.iter().all(|c| c.is_multiple_of(&p2)) {
        for c in g.iter_mut() {
            *c /= &p2;
        }
    }
    let mut search = Search {
        p,
        pb,
        cap: depth_cap(&g, p),
        hit_cap: false,
    };
    let mut rev = g.clone();
    rev.reverse();
    let found = search.zp(&g, &BigInt::zero(), 0) || search.zp(&rev, &BigInt::zero(), 1);
    if !found && search.hit_cap {
        return Err(Error::Undecided { p, depth: search.cap });
    }
    Ok(found)
}

/// Local solvability at a prime or the real place.
///
/// Reaching the depth cap counts as insoluble; the cap is never reached for
/// a nonsingular quartic, which the tests confirm over the ranges used.
pub fn locally_solvable(t: &Torsor, place: Place) -> bool {
    try_locally_solvable(t, place).unwrap_or(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct LocalKey {
    kind: TorsorKind,
    place: Place,
    r: (u32, i64),
    d: (u32, i64),
}

/// Square class of n in Q_v*: (parity of v_p, class of the unit part).
fn local_class(n: i64, place: Place) -> (u32, i64) {
    match place {
        Place::Real => (0, n.signum()),
        Place::Prime(p) => {
            let mut u = n;
            let mut v = 0;
            while u % p as i64 == 0 {
                u /= p as i64;
                v += 1;
            }
            let unit = if p == 2 {
                u.rem_euclid(8)
            } else {
                legendre(u.rem_euclid(p as i64) as u64, p) as i64
            };
            (v % 2, unit)
        }
    }
}

/// Memoizes local answers: C_r^{(d)} over Q_v depends only on the square
/// classes of r and d in Q_v*.
#[derive(Default)]
pub struct SelmerSolver {
    cache: HashMap<LocalKey, bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelmerResult {
    pub d: u64,
    pub dim_phi: u32,
    pub dim_phihat: u32,
    /// Basis of S^(φ̂) as square-free integers.
    pub generators: Vec<i64>,
    pub phi_elements: Vec<i64>,
    pub phihat_elements: Vec<i64>,
    /// dim₂ Ш(E'_d)[φ̂] ≥ dim S^(φ̂) − 2, valid when E_d(Q) is finite.
    pub sha2_lower_bound: u32,
}

impl SelmerResult {
    pub const CSV_HEADER: &'static str = "d,dim_phi,dim_phihat,sha2_lower_bound,generators";

    pub fn csv_row(&self) -> String {
        let gens: Vec<String> = self.generators.iter().map(i64::to_string).collect();
        format!(
            "{},{},{},{},{}",
            self.d,
            self.dim_phi,
            self.dim_phihat,
            self.sha2_lower_bound,
            gens.join(" ")
        )
    }
}

/// Product of a square-free class a·b modulo squares.
pub fn class_product(a: i64, b: i64) -> i64 {
    let g = a.abs().gcd(&b.abs());
    (a / g) * (b / g)
}

fn f2_basis(elements: &[i64], primes: &[u64]) -> Vec<i64> {
    let vec_of = |r: i64| -> u64 {
        let mut bits = (r < 0) as u64;
        for (i, &p) in primes.iter().enumerate() {
            if r % p as i64 == 0 {
                bits |= 1 << (i + 1);
            }
        }
        bits
    };
    let mut basis: Vec<(u64, i64)> = Vec::new();
    for &r in elements {
        let mut v = vec_of(r);
        let mut x = r;
        for &(b, br) in &basis {
            if v ^ b < v {
                v ^= b;
                x = class_product(x, br);
            }
        }
        if v != 0 {
            basis.push((v, x));
            basis.sort_by_key(|b| std::cmp::Reverse(b.0));
        }
    }
    let mut out: Vec<i64> = basis.into_iter().map(|(_, x)| x).collect();
    out.sort_by_key(|x| (x.unsigned_abs(), *x));
    out
}

impl SelmerSolver {
    pub fn new() -> Self {
        Self::default()
    }

    fn solvable(&mut self, t: &Torsor, place: Place) -> Result<bool> {
        let key = LocalKey {
            kind: t.kind,
            place,
            r: local_class(t.r, place),
            d: local_class(t.d as i64, place),
        };
        if let Some(&b) = self.cache.get(&key) {
            return Ok(b);
        }
        let b = try_locally_solvable(t, place)?;
        self.cache.insert(key, b);
        Ok(b)
    }

    /// Elements of the Selmer set for one isogeny, as square-free integers.
    pub fn selmer_set(&mut self, kind: TorsorKind, d: u64) -> Result<Vec<i64>> {
        let fd = FactoredInt::factor(d)?;
        let mut primes: Vec<u64> = kind.divisor_base().to_vec();
        primes.extend(fd.primes());
        primes.sort_unstable();
        primes.dedup();
        let mut places: Vec<Place> = BAD_PRIMES.iter().copied().chain(fd.primes()).map(Place::Prime).collect();
        places.push(Place::Real);
        places.dedup();
        let mut out = Vec::new();
        for mask in 0u64..(1 << (primes.len() + 1)) {
            let mut r: i64 = if mask & 1 == 1 { -1 } else { 1 };
            for (i, &p) in primes.iter().enumerate() {
                if mask >> (i + 1) & 1 == 1 {
                    r *= p as i64;
                }
            }
            let t = Torsor { kind, r, d };
            let mut ok = true;
            for &pl in &places {
                if !self.solvable(&t, pl)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push(r);
            }
        }
        Ok(out)
    }

    pub fn selmer_groups(&mut self, d: u64) -> Result<SelmerResult> {
        let fd = FactoredInt::factor(d)?;
        if d == 0 || !fd.is_squarefree() {
            return Err(Error::InvalidArgument(format!("d = {d} must be positive and square-free")));
        }
        if d.gcd(&(2 * 3 * 19 * 29 * 643)) != 1 {
            return Err(Error::InvalidArgument(format!("d = {d} shares a factor with the conductor")));
        }
        let phi = self.selmer_set(TorsorKind::Phi, d)?;
        let phihat = self.selmer_set(TorsorKind::PhiHat, d)?;
        let dim = |s: &[i64]| -> Result<u32> {
            let n = s.len();
            if !n.is_power_of_two() {
                return Err(Error::Inconsistent(format!("Selmer set of size {n} for d = {d}")));
            }
            Ok(n.trailing_zeros())
        };
        let dim_phi = dim(&phi)?;
        let dim_phihat = dim(&phihat)?;
        let mut primes: Vec<u64> = TorsorKind::PhiHat.divisor_base().to_vec();
        primes.extend(fd.primes());
        let generators = f2_basis(&phihat, &primes);
        Ok(SelmerResult {
            d,
            dim_phi,
            dim_phihat,
            generators,
            phi_elements: phi,
            phihat_elements: phihat,
            sha2_lower_bound: dim_phihat.saturating_sub(2),
        })
    }
}

pub fn selmer_groups(d: u64) -> Result<SelmerResult> {
    SelmerSolver::new().selmer_groups(d)
}

/// Selmer data for many d, one memo per worker.
pub fn selmer_batch(ds: &[u64]) -> Result<Vec<SelmerResult>> {
    ds.par_iter()
        .map_init(SelmerSolver::new, |s, &d| s.selmer_groups(d))
        .collect()
}

/// Positive square-free d ≤ limit prime to 2·3·19·29·643.
pub fn eligible_descent_d(limit: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for d in 1..=limit {
        if d.gcd(&(2 * 3 * 19 * 29 * 643)) == 1 && FactoredInt::factor(d)?.is_squarefree() {
            out.push(d);
        }
    }
    Ok(out)
}

pub fn write_descent_csv<W: Write>(mut w: W, rows: &[SelmerResult]) -> Result<()> {
    writeln!(w, "{}", SelmerResult::CSV_HEADER)?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// r, 19r, 29r, −r for r ≡ 1, 3, 5, 7 (mod 8).
pub fn r_d_selector(r: u64) -> Result<i64> {
    if r.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("r = {r} must be odd")));
    }
    let r = r as i64;
    Ok(match r % 8 {
        1 => r,
        3 => 19 * r,
        5 => 29 * r,
        _ => -r,
    })
}

/// Every prime factor is 1 mod 4 and inert in Q(√−7).
pub fn predicate_cltz(d: &FactoredInt) -> bool {
    d.primes().all(|p| p % 4 == 1 && kronecker(-7, p as i64) == -1)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PartitionRule {
    /// Each vertex has an even number of out-edges into the other part.
    #[default]
    OutEdges,
    /// Each vertex has an even number of in-edges from the other part.
    InEdges,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZhaoPredicate {
    pub residues_ok: bool,
    pub graph_odd: bool,
}

/// Edge i → j when (p_i / p_j) = −1.
pub fn legendre_graph(primes: &[u64]) -> Vec<Vec<bool>> {
    primes
        .iter()
        .map(|&a| primes.iter().map(|&b| a != b && legendre(a % b, b) == -1).collect())
        .collect()
}

pub fn graph_is_odd(edges: &[Vec<bool>], rule: PartitionRule) -> bool {
    let n = edges.len();
    if n <= 1 {
        return true;
    }
    let edge = |i: usize, j: usize| match rule {
        PartitionRule::OutEdges => edges[i][j],
        PartitionRule::InEdges => edges[j][i],
    };
    // vertex 0 stays in the first part; masks 1..2^{n−1} are the nontrivial splits
    for mask in 1u64..(1 << (n - 1)) {
        let side = |i: usize| i > 0 && mask >> (i - 1) & 1 == 1;
        let even = (0..n).all(|i| (0..n).filter(|&j| side(j) != side(i) && edge(i, j)).count() % 2 == 0);
        if even {
            return false;
        }
    }
    true
}

pub fn predicate_zhao(d: &FactoredInt, rule: PartitionRule) -> ZhaoPredicate {
    let primes: Vec<u64> = d.primes().collect();
    let threes = primes.iter().filter(|&&p| p % 8 == 3).count();
    let residues_ok = threes == 1 && primes.iter().all(|&p| p % 8 == 3 || p % 8 == 1);
    ZhaoPredicate {
        residues_ok,
        graph_odd: graph_is_odd(&legendre_graph(&primes), rule),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ChenRule {
    /// x³+4x²−16 has exactly one root mod p.
    #[default]
    OneRoot,
    /// At least one root mod p.
    SomeRoot,
}

/// Roots of x³ + 4x² − 16 in F_p.
pub fn chen_cubic_roots(p: u64) -> usize {
    (0..p)
        .filter(|&x| {
            let x = x as u128;
            let p = p as u128;
            (x * x % p * x + 4 * x * x + p * 16 - 16).is_multiple_of(p)
        })
        .count()
}

pub fn predicate_chen(d: &FactoredInt, rule: ChenRule) -> bool {
    d.primes().all(|p| {
        let n = chen_cubic_roots(p);
        match rule {
            ChenRule::OneRoot => n == 1,
            ChenRule::SomeRoot => n >= 1,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(g: &[BigInt; 5], x: &BigInt) -> BigInt {
        g.iter().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    #[test]
    fn torsor_constants() {
        assert_eq!(PHI_B, 1_417_168);
        assert_eq!(PHI_C, 502_096_953_744);
        assert_eq!(PHIHAT_B, -2 * PHI_B);
        assert_eq!(PHIHAT_C, PHI_B * PHI_B - 4 * PHI_C);
    }

    #[test]
    fn shift_matches_evaluation() {
        let g = [3, 0, -5, 0, 7].map(BigInt::from);
        let h = shifted(&g, &BigInt::from(2), &BigInt::from(9));
        for s in -3i64..4 {
            let x = BigInt::from(2 + 9 * s);
            assert_eq!(eval(&h, &BigInt::from(s)), eval(&g, &x));
        }
    }

    #[test]
    fn padic_squares() {
        assert!(is_padic_square(&BigInt::from(17), 2));
        assert!(!is_padic_square(&BigInt::from(5), 2));
        assert!(is_padic_square(&BigInt::from(4 * 9), 2));
        assert!(is_padic_square(&BigInt::from(-2), 3));
        assert!(!is_padic_square(&BigInt::from(3), 3));
    }

    #[test]
    fn trivial_class_everywhere() {
        for kind in [TorsorKind::Phi, TorsorKind::PhiHat] {
            let t = Torsor::new(kind, 1, 73).unwrap();
            for p in [2, 3, 19, 23, 29, 73, 643, 3851] {
                assert!(locally_solvable(&t, Place::Prime(p)));
            }
            assert!(locally_solvable(&t, Place::Real));
        }
    }

    #[test]
    fn negative_classes_at_the_real_place() {
        // C'_{−1}: −y² = 1 + 2B'd x² ... has leading coefficient −C'd² > 0
        assert!(locally_solvable(&Torsor::new(TorsorKind::PhiHat, -1, 5).unwrap(), Place::Real));
        // C_{−1}: −y² = 1 − Bd x² + Cd² x⁴ needs the quartic to dip below zero
        let t = Torsor::new(TorsorKind::Phi, -1, 5).unwrap();
        let (b, c) = (PHI_B as f64 * 5.0, PHI_C as f64 * 25.0);
        assert_eq!(locally_solvable(&t, Place::Real), b * b >= 4.0 * c);
    }

    #[test]
    fn selector_cases() {
        assert_eq!(r_d_selector(17).unwrap(), 17);
        assert_eq!(r_d_selector(3).unwrap(), 57);
        assert_eq!(r_d_selector(5).unwrap(), 145);
        assert_eq!(r_d_selector(7).unwrap(), -7);
        assert!(r_d_selector(2).is_err());
    }

    #[test]
    fn predicates() {
        let f = |n| FactoredInt::factor(n).unwrap();
        assert!(predicate_cltz(&f(1)));
        assert!(predicate_cltz(&f(5)));
        // −7 ≡ 6 mod 13 and 6 is not a square mod 13
        assert!(predicate_cltz(&f(13)));
        assert!(!predicate_cltz(&f(29)));
        let z = predicate_zhao(&f(3), PartitionRule::default());
        assert!(z.residues_ok && z.graph_odd);
        assert!(!predicate_zhao(&f(17), PartitionRule::default()).residues_ok);
        assert!(predicate_chen(&f(1), ChenRule::default()));
    }

    #[test]
    fn chen_root_counts() {
        // brute force against the cubic directly
        for p in [3u64, 5, 7, 13, 17, 19, 23] {
            let n = (0..p as i64).filter(|x| (x * x * x + 4 * x * x - 16).rem_euclid(p as i64) == 0).count();
            assert_eq!(chen_cubic_roots(p), n);
        }
    }
}

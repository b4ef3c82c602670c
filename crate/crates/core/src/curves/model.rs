use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6 over ℤ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeierstrassModel {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
}

/// Coordinate change x = u²x' + r, y = u³y' + s·u²x' + t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform {
    pub u: BigInt,
    pub r: BigInt,
    pub s: BigInt,
    pub t: BigInt,
}

impl Transform {
    pub fn identity() -> Self {
        Transform {
            u: BigInt::one(),
            r: BigInt::zero(),
            s: BigInt::zero(),
            t: BigInt::zero(),
        }
    }
}

impl WeierstrassModel {
    pub fn new(a: [BigInt; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a;
        let m = WeierstrassModel { a1, a2, a3, a4, a6 };
        if m.discriminant().is_zero() {
            return Err(Error::Singular(format!("{m}")));
        }
        Ok(m)
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(BigInt::from))
    }

    /// Parses "a1,a2,a3,a4,a6".
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::InvalidArgument(format!("expected five coefficients, got {s:?}")));
        }
        let mut a: [BigInt; 5] = Default::default();
        for (slot, p) in a.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad coefficient {p:?}")))?;
        }
        Self::new(a)
    }

    pub fn coefficients(&self) -> [&BigInt; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn b2(&self) -> BigInt {
        &self.a1 * &self.a1 + 4 * &self.a2
    }

    pub fn b4(&self) -> BigInt {
        &self.a1 * &self.a3 + 2 * &self.a4
    }

    pub fn b6(&self) -> BigInt {
        &self.a3 * &self.a3 + 4 * &self.a6
    }

    pub fn b8(&self) -> BigInt {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }

    pub fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - 24 * self.b4()
    }

    pub fn c6(&self) -> BigInt {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * b6
    }

    pub fn discriminant(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    /// Applies (u, r, s, t); fails if the result is not integral.
    pub fn transform(&self, tr: &Transform) -> Result<Self> {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let (u, r, s, t) = (&tr.u, &tr.r, &tr.s, &tr.t);
        if u.is_zero() {
            return Err(Error::InvalidArgument("u = 0".into()));
        }
        let n1 = a1 + 2 * s;
        let n2 = a2 - s * a1 + 3 * r - s * s;
        let n3 = a3 + r * a1 + 2 * t;
        let n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
        let n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u3 * &u3;
        let div = |n: BigInt, d: &BigInt| -> Result<BigInt> {
            let (q, rem) = n.div_rem(d);
            if rem.is_zero() {
                Ok(q)
            } else {
                Err(Error::NonIntegral(format!("transformed coefficient {n}/{d}")))
            }
        };
        Ok(WeierstrassModel {
            a1: div(n1, u)?,
            a2: div(n2, &u2)?,
            a3: div(n3, &u3)?,
            a4: div(n4, &u4)?,
            a6: div(n6, &u6)?,
        })
    }

    /// Translation with u = 1.
    pub fn rst(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> Self {
        self.transform(&Transform {
            u: BigInt::one(),
            r: r.clone(),
            s: s.clone(),
            t: t.clone(),
        })
        .expect("u = 1 keeps integrality")
    }

    /// Quadratic twist by d for a model with a1 = a3 = 0.
    pub fn quadratic_twist(&self, d: i64) -> Result<Self> {
        if !self.a1.is_zero() || !self.a3.is_zero() {
            return Err(Error::InvalidArgument("twist needs a1 = a3 = 0".into()));
        }
        let d = BigInt::from(d);
        Self::new([
            BigInt::zero(),
            &self.a2 * &d,
            BigInt::zero(),
            &self.a4 * &d * &d,
            &self.a6 * &d * &d * &d,
        ])
    }

    /// Right-hand side 4x³ + b2x² + 2b4x + b6 of (2y + a1x + a3)².
    pub fn two_division_cubic(&self) -> [BigInt; 4] {
        [BigInt::from(4), self.b2(), 2 * self.b4(), self.b6()]
    }

    pub fn is_short(&self) -> bool {
        self.a1.is_zero() && self.a2.is_zero() && self.a3.is_zero()
    }
}

impl fmt::Display for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{},{}]", self.a1, self.a2, self.a3, self.a4, self.a6)
    }
}

/// v_p(x); `u32::MAX` for x = 0.
pub fn valuation(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        return u32::MAX;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

#[inline]
pub fn mod_u64(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.try_into().expect("residue fits")
}

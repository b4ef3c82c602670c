//! Integral Weierstrass models and their arithmetic invariants.

mod an;
mod ap;
mod minimal;
mod model;
mod period;
mod tate;
mod torsion;

use num_bigint::BigInt;
use num_traits::One;

pub use an::{ApTable, DEFAULT_AN_BUDGET};
pub use ap::{ap, ap_bsgs, ap_naive, FrobeniusCounter, NAIVE_BOUND};
pub use minimal::{from_c4c6, minimal_model, minimal_model_with_hints};
pub use model::{mod_u64, valuation, Transform, WeierstrassModel};
pub use period::{big_to_dd, c_infinity, real_period};
pub use tate::{tate_local, Kodaira, LocalData, Reduction};
pub use torsion::{torsion_order, torsion_order_exhaustive};

use crate::arith::factor_bigint;
use crate::error::{Error, Result};
use crate::precision::Dd;

/// Everything the BSD quotient needs, computed on the minimal model.
#[derive(Clone, Debug)]
pub struct CurveInvariants {
    pub minimal_model: WeierstrassModel,
    /// Takes the input model to `minimal_model`.
    pub transform: Transform,
    pub discriminant: BigInt,
    pub conductor: BigInt,
    pub torsion_order: u64,
    pub omega: Dd,
    pub c_infinity: Dd,
    pub c_fin: u64,
    pub local: Vec<LocalData>,
}

impl CurveInvariants {
    pub fn compute(m: &WeierstrassModel, digits: u32) -> Result<Self> {
        Self::compute_with_hints(m, &[], digits)
    }

    /// `hints` are divided out of Δ before any factoring, e.g. the primes
    /// of a twisting parameter.
    pub fn compute_with_hints(m: &WeierstrassModel, hints: &[u64], digits: u32) -> Result<Self> {
        let (minimal, transform) = minimal_model_with_hints(m, hints)?;
        let discriminant = minimal.discriminant();
        let mut conductor = BigInt::one();
        let mut c_fin = 1u64;
        let mut local = Vec::new();
        for (p, _) in factor_bigint(&discriminant, hints)? {
            let data = tate_local(&minimal, p);
            if !data.is_consistent() {
                return Err(Error::Inconsistent(format!("local data at {p}: {data:?}")));
            }
            conductor *= BigInt::from(p).pow(data.conductor_exponent);
            c_fin *= data.tamagawa as u64;
            local.push(data);
        }
        let torsion_order = torsion_order(&minimal)?;
        let omega = real_period(&minimal, digits)?;
        let c_infinity = c_infinity(&discriminant, omega);
        Ok(CurveInvariants {
            minimal_model: minimal,
            transform,
            discriminant,
            conductor,
            torsion_order,
            omega,
            c_infinity,
            c_fin,
            local,
        })
    }

    pub fn bad_primes(&self) -> Vec<u64> {
        self.local.iter().map(|l| l.prime).collect()
    }

    pub fn local_at(&self, p: u64) -> Option<&LocalData> {
        self.local.iter().find(|l| l.prime == p)
    }
}

/// Conductor ∏ p^{f_p}.
pub fn conductor(m: &WeierstrassModel) -> Result<BigInt> {
    let (minimal, _) = minimal_model(m)?;
    let mut n = BigInt::one();
    for (p, _) in factor_bigint(&minimal.discriminant(), &[])? {
        n *= BigInt::from(p).pow(tate_local(&minimal, p).conductor_exponent);
    }
    Ok(n)
}

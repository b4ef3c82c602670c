//! Weight-3/2 coefficients a(d) as weighted counts of lattice points on
//! ternary quadratic forms.

mod batch;
mod dump;
mod eta;
mod single;

use num_integer::Integer;
use num_rational::Ratio;

use crate::arith::CurveLabel;
use crate::error::{Error, Result};

pub use batch::{theta_batch, theta_batch_range, theta_batch_with, BatchOptions, FULL_TABLE_MAX};
pub use dump::{read_dump, write_dump, DumpHeader, DUMP_SENTINEL};
pub use eta::{eta_product_oracle, EtaSpec};
pub use single::{theta_single, theta_single_raw};

/// ax² + by² + cz² + dxy·xy + exz·xz + fyz·yz
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TernaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub dxy: i64,
    pub exz: i64,
    pub fyz: i64,
}

impl TernaryForm {
    pub fn new(a: i64, b: i64, c: i64, dxy: i64, exz: i64, fyz: i64) -> Result<Self> {
        let f = TernaryForm {
            a,
            b,
            c,
            dxy,
            exz,
            fyz,
        };
        let g = f.gram();
        let m1 = g[0][0];
        let m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let m3 = f.gram_det();
        if m1 <= 0 || m2 <= 0 || m3 <= 0 {
            return Err(Error::InvalidArgument(format!("form {f:?} is not positive definite")));
        }
        Ok(f)
    }

    pub fn diagonal(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(a, b, c, 0, 0, 0)
    }

    /// Gram matrix G with Q(v) = vᵀGv / 2.
    pub fn gram(&self) -> [[i128; 3]; 3] {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (d, e, f) = (self.dxy as i128, self.exz as i128, self.fyz as i128);
        [[2 * a, d, e], [d, 2 * b, f], [e, f, 2 * c]]
    }

    pub fn gram_det(&self) -> i128 {
        let g = self.gram();
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    }

    #[inline]
    pub fn eval(&self, v: [i64; 3]) -> i64 {
        let [x, y, z] = v;
        self.a * x * x + self.b * y * y + self.c * z * z + self.dxy * x * y + self.exz * x * z + self.fyz * y * z
    }

    pub fn diag(&self, i: usize) -> i64 {
        [self.a, self.b, self.c][i]
    }

    /// Cross coefficient between variables i and j.
    pub fn cross(&self, i: usize, j: usize) -> i64 {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.dxy,
            (0, 2) => self.exz,
            (1, 2) => self.fyz,
            _ => 0,
        }
    }

    /// Largest |v_i| with Q(v) ≤ limit, relaxed outward by one.
    pub fn coordinate_bound(&self, i: usize, limit: i64) -> i64 {
        let g = self.gram();
        let (j, k) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let cof = g[j][j] * g[k][k] - g[j][k] * g[k][j];
        let det = self.gram_det();
        let bound = (2.0 * limit as f64 * cof as f64 / det as f64).sqrt();
        bound.floor() as i64 + 1
    }
}

/// A linear form in (x, y, z) restricted to residue classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: [i64; 3],
    pub modulus: i64,
    pub residues: Vec<i64>,
}

impl Constraint {
    #[inline]
    pub fn holds(&self, v: [i64; 3]) -> bool {
        let s = self.coeffs[0] * v[0] + self.coeffs[1] * v[1] + self.coeffs[2] * v[2];
        self.residues.contains(&s.rem_euclid(self.modulus))
    }
}

/// A term of the spec: a form and its rational weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTerm {
    pub form: TernaryForm,
    pub weight: Ratio<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSpec {
    pub terms: Vec<ThetaTerm>,
    pub constraints: Vec<Constraint>,
    /// Sign (−1)^(c·v) applied to every counted point.
    pub sign: Option<[i64; 3]>,
    /// Residue classes (modulus, residues) where the batch fills entries;
    /// `None` fills every index.
    pub support: Option<(u64, Vec<u64>)>,
    pub label: u8,
}

impl ThetaSpec {
    pub fn new(terms: Vec<ThetaTerm>, constraints: Vec<Constraint>, sign: Option<[i64; 3]>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("spec without terms".into()));
        }
        if terms.iter().any(|t| *t.weight.numer() == 0) {
            return Err(Error::InvalidArgument("zero weight".into()));
        }
        if constraints.iter().any(|c| c.modulus < 2) {
            return Err(Error::InvalidArgument("constraint modulus below 2".into()));
        }
        Ok(ThetaSpec {
            terms,
            constraints,
            sign,
            support: None,
            label: 0,
        })
    }

    /// Common denominator of the term weights.
    pub fn denominator(&self) -> i64 {
        self.terms.iter().fold(1, |acc, t| acc.lcm(t.weight.denom()))
    }

    /// Weights scaled by [`Self::denominator`].
    pub fn integer_weights(&self) -> Vec<i64> {
        let den = self.denominator();
        self.terms.iter().map(|t| (t.weight * den).to_integer()).collect()
    }

    #[inline]
    pub fn admits(&self, v: [i64; 3]) -> bool {
        self.constraints.iter().all(|c| c.holds(v))
    }

    #[inline]
    pub fn sign_of(&self, v: [i64; 3]) -> i64 {
        match self.sign {
            Some(c) if (c[0] * v[0] + c[1] * v[1] + c[2] * v[2]).rem_euclid(2) == 1 => -1,
            _ => 1,
        }
    }

    /// True if variable i never meets the constraints or the sign rule.
    pub fn free_of_conditions(&self, i: usize) -> bool {
        self.constraints.iter().all(|c| c.coeffs[i] == 0) && self.sign.is_none_or(|s| s[i] == 0)
    }

    pub fn supports(&self, d: u64) -> bool {
        match &self.support {
            None => true,
            Some((m, res)) => res.contains(&(d % m)),
        }
    }
}

/// Built-in specs of the four curves. `variant` picks f_1 or f_2 for A.
pub fn builtin_spec(curve: CurveLabel, variant: Option<u8>) -> Result<ThetaSpec> {
    let half = Ratio::new(1, 2);
    let term = |form: TernaryForm, weight: Ratio<i64>| ThetaTerm { form, weight };
    if curve != CurveLabel::A && variant.is_some_and(|v| v != 1) {
        return Err(Error::UnknownVariant {
            curve,
            variant: variant.unwrap(),
        });
    }
    let mut spec = match curve {
        CurveLabel::A => {
            let lead = match variant.unwrap_or(1) {
                1 => 2,
                2 => 4,
                v => return Err(Error::UnknownVariant { curve, variant: v }),
            };
            ThetaSpec::new(
                vec![
                    term(TernaryForm::diagonal(lead, 1, 32)?, Ratio::from_integer(1)),
                    term(TernaryForm::diagonal(lead, 1, 8)?, -half),
                ],
                vec![],
                None,
            )?
        }
        CurveLabel::B => ThetaSpec::new(
            vec![term(TernaryForm::diagonal(1, 1, 1)?, half)],
            vec![
                Constraint {
                    coeffs: [1, 0, 0],
                    modulus: 3,
                    residues: vec![1, 2],
                },
                Constraint {
                    coeffs: [0, 1, 0],
                    modulus: 3,
                    residues: vec![0],
                },
                Constraint {
                    coeffs: [1, 1, 0],
                    modulus: 2,
                    residues: vec![1],
                },
            ],
            Some([0, 1, 0]),
        )?,
        CurveLabel::C => ThetaSpec::new(
            vec![
                term(TernaryForm::diagonal(1, 11, 11)?, half),
                term(TernaryForm::new(3, 4, 11, 2, 0, 0)?, -half),
            ],
            vec![],
            None,
        )?,
        CurveLabel::D => ThetaSpec::new(
            vec![
                term(TernaryForm::diagonal(1, 14, 14)?, half),
                term(TernaryForm::diagonal(2, 7, 14)?, -half),
            ],
            vec![],
            None,
        )?,
    };
    let second_variant = curve == CurveLabel::A && variant == Some(2);
    spec.support = Some(if second_variant {
        (2, vec![1])
    } else {
        curve.eligible_classes()
    });
    spec.label = if second_variant { b'a' } else { curve.as_byte() };
    Ok(spec)
}

/// Dense coefficients a(start), a(start+1), ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    pub start: u64,
    pub values: Vec<i64>,
}

impl CoeffTable {
    /// Marks entries outside the spec support and non-integral values.
    pub const UNDEFINED: i64 = i64::MIN;

    pub fn empty(start: u64) -> Self {
        CoeffTable {
            start,
            values: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> u64 {
        self.start + self.values.len() as u64
    }

    pub fn get(&self, d: u64) -> Option<i64> {
        if d < self.start {
            return None;
        }
        self.values
            .get((d - self.start) as usize)
            .copied()
            .filter(|&v| v != Self::UNDEFINED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_a1_terms() {
        let s = builtin_spec(CurveLabel::A, Some(1)).unwrap();
        assert_eq!(s.terms[0].form, TernaryForm::diagonal(2, 1, 32).unwrap());
        assert_eq!(s.terms[0].weight, Ratio::from_integer(1));
        assert_eq!(s.terms[1].form, TernaryForm::diagonal(2, 1, 8).unwrap());
        assert_eq!(s.terms[1].weight, Ratio::new(-1, 2));
        assert!(s.constraints.is_empty() && s.sign.is_none());
        assert_eq!(s.denominator(), 2);
        assert_eq!(s.integer_weights(), vec![2, -1]);
    }

    #[test]
    fn builtin_b_shape() {
        let s = builtin_spec(CurveLabel::B, None).unwrap();
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.constraints.len(), 3);
        assert_eq!(s.sign, Some([0, 1, 0]));
        assert!(s.admits([1, 0, 2]));
        assert!(!s.admits([0, 1, 2]));
        assert_eq!(s.sign_of([1, 3, 0]), -1);
    }

    #[test]
    fn builtin_c_terms() {
        let s = builtin_spec(CurveLabel::C, None).unwrap();
        assert_eq!(s.terms[1].form, TernaryForm::new(3, 4, 11, 2, 0, 0).unwrap());
        assert_eq!(s.integer_weights(), vec![1, -1]);
    }

    #[test]
    fn unknown_variants() {
        assert!(matches!(
            builtin_spec(CurveLabel::A, Some(3)),
            Err(Error::UnknownVariant { .. })
        ));
        assert!(builtin_spec(CurveLabel::B, Some(2)).is_err());
    }

    #[test]
    fn definiteness_check() {
        assert!(TernaryForm::new(1, 1, 1, 3, 0, 0).is_err());
        assert!(TernaryForm::new(3, 4, 11, 2, 0, 0).is_ok());
    }

    #[test]
    fn coordinate_bounds_cover_points() {
        let f = TernaryForm::new(3, 4, 11, 2, 1, -1).unwrap();
        let lim = 500;
        let b: Vec<i64> = (0..3).map(|i| f.coordinate_bound(i, lim)).collect();
        for x in -40i64..=40 {
            for y in -40i64..=40 {
                for z in -40i64..=40 {
                    if f.eval([x, y, z]) <= lim {
                        assert!(x.abs() <= b[0] && y.abs() <= b[1] && z.abs() <= b[2]);
                    }
                }
            }
        }
    }
}

use num_rational::Ratio;

use super::batch::quadratic_range;
use super::{TernaryForm, ThetaSpec};
use crate::error::{Error, Result};

const fn square_residues_64() -> [bool; 64] {
    let mut t = [false; 64];
    let mut i = 0;
    while i < 64 {
        t[(i * i) % 64] = true;
        i += 1;
    }
    t
}

const SQ64: [bool; 64] = square_residues_64();

#[inline]
fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 || !SQ64[(n & 63) as usize] {
        return None;
    }
    let mut s = (n as f64).sqrt() as i64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    (s * s == n).then_some(s)
}

/// a(d) for a single d without building a table. Outside the spec's
/// support the coefficient is taken to be zero; use [`theta_single_raw`]
/// for the bare counts.
pub fn theta_single(spec: &ThetaSpec, d: u64) -> Result<Ratio<i64>> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    if !spec.supports(d) {
        return Ok(Ratio::from_integer(0));
    }
    let raw = theta_single_raw(spec, d)?;
    let mut total = Ratio::from_integer(0);
    for (term, count) in spec.terms.iter().zip(raw) {
        total += term.weight * count;
    }
    Ok(total)
}

/// Signed point counts of each term's form at d, before weighting.
pub fn theta_single_raw(spec: &ThetaSpec, d: u64) -> Result<Vec<i64>> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    spec.terms.iter().map(|t| count_at(spec, &t.form, d)).collect()
}

/// Whether variable i can be folded to i ≥ 0 with multiplicity two.
fn symmetric(spec: &ThetaSpec, form: &TernaryForm, i: usize) -> bool {
    (0..3).all(|j| j == i || form.cross(i, j) == 0) && spec.free_of_conditions(i)
}

fn count_at(spec: &ThetaSpec, form: &TernaryForm, d: u64) -> Result<i64> {
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&i| form.diag(i));
    let [k, i, j] = order;
    let qk = form.diag(k);
    let (qi, qj, cij) = (form.diag(i), form.diag(j), form.cross(i, j));
    let (cik, cjk) = (form.cross(i, k), form.cross(j, k));
    // projected binary form P = 4·qk·Q_ij − L², with L = cik·ui + cjk·uj
    let pa = 4 * qk * qi - cik * cik;
    let pb = 4 * qk * cij - 2 * cik * cjk;
    let pc = 4 * qk * qj - cjk * cjk;
    let target = 4 * qk as i128 * d as i128;
    let coef = [pa, pb, pc, qk, cik, cjk].iter().map(|c| c.unsigned_abs() as i128).max().unwrap_or(1);
    if target * 4 * coef.max(1) > (i64::MAX / 4) as i128 {
        return Err(Error::Overflow(format!("single-d count at d = {d}")));
    }
    let target = target as i64;
    let plain = spec.constraints.is_empty() && spec.sign.is_none();
    let fold_j = symmetric(spec, form, j);
    let fold_i = symmetric(spec, form, i);
    let disc = 4 * pa as i128 * pc as i128 - pb as i128 * pb as i128;
    let jmax = ((4.0 * pa as f64 * target as f64 / disc as f64).sqrt()) as i64 + 1;
    let mut total = 0i64;
    let jstart = if fold_j { 0 } else { -jmax };
    for uj in jstart..=jmax {
        let mult_j = if fold_j && uj != 0 { 2 } else { 1 };
        let (mut ilo, ihi) = quadratic_range(pa, pb * uj, pc * uj * uj, target);
        if fold_i {
            ilo = ilo.max(0);
        }
        if ilo > ihi {
            continue;
        }
        // residual 4·qk·d − P(ui, uj), updated incrementally in ui
        let mut res = target - (pa * ilo * ilo + pb * ilo * uj + pc * uj * uj);
        for ui in ilo..=ihi {
            if let Some(s) = exact_sqrt(res) {
                let mult = mult_j * if fold_i && ui != 0 { 2 } else { 1 };
                let lin = cik * ui + cjk * uj;
                let roots: &[i64] = if s == 0 { &[0] } else { &[s, -s] };
                for &r in roots {
                    let num = -lin + r;
                    if num % (2 * qk) != 0 {
                        continue;
                    }
                    let mut v = [0i64; 3];
                    v[k] = num / (2 * qk);
                    v[i] = ui;
                    v[j] = uj;
                    if plain {
                        total += mult;
                    } else if spec.admits(v) {
                        total += mult * spec.sign_of(v);
                    }
                }
            }
            res -= pa * (2 * ui + 1) + pb * uj;
        }
    }
    Ok(total)
}

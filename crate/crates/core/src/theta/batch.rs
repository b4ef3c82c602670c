use rayon::prelude::*;

use super::{CoeffTable, TernaryForm, ThetaSpec};
use crate::error::{Error, Result};

/// Largest limit served by a single dense table.
pub const FULL_TABLE_MAX: u64 = 1 << 27;
const CHUNK: usize = 1 << 14;

#[derive(Clone, Debug)]
pub struct BatchOptions {
    pub shards: usize,
    pub memory_budget: u64,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            shards: std::thread::available_parallelism().map_or(1, |n| n.get()),
            memory_budget: 2 << 30,
        }
    }
}

/// All coefficients a(1..=limit) on the spec's support.
pub fn theta_batch(spec: &ThetaSpec, limit: u64, shard_count: usize) -> Result<CoeffTable> {
    let opts = BatchOptions {
        shards: shard_count,
        ..BatchOptions::default()
    };
    theta_batch_with(spec, limit, &opts)
}

pub fn theta_batch_with(spec: &ThetaSpec, limit: u64, opts: &BatchOptions) -> Result<CoeffTable> {
    if limit == 0 {
        return Ok(CoeffTable::empty(1));
    }
    if opts.shards == 0 {
        return Err(Error::InvalidArgument("shard count must be positive".into()));
    }
    let (m, residues) = support_of(spec);
    let supported = limit / m * residues.len() as u64 + residues.len() as u64;
    // output i64 table, split binary counts, per-class i32 and i64 sums
    let bytes = 8 * limit + 4 * limit + 12 * supported;
    if limit > FULL_TABLE_MAX || bytes > opts.memory_budget {
        return Err(Error::Memory { limit });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.shards)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| full_table(spec, limit, m, &residues))
}

/// Coefficients a(lo..=hi) by rescanning the lattice shell; memory is
/// proportional to the window only.
pub fn theta_batch_range(spec: &ThetaSpec, lo: u64, hi: u64) -> Result<CoeffTable> {
    let lo = lo.max(1);
    if hi < lo {
        return Ok(CoeffTable::empty(lo));
    }
    let len = (hi - lo + 1) as usize;
    let weights = spec.integer_weights();
    let mut sums = vec![0i64; len];
    for (term, &w) in spec.terms.iter().zip(&weights) {
        let mut counts = vec![0i32; len];
        for_each_in_shell(&term.form, lo as i64, hi as i64, |v, q| {
            let d = q as u64;
            if spec.supports(d) && spec.admits(v) {
                counts[(d - lo) as usize] += spec.sign_of(v) as i32;
            }
        });
        accumulate(&mut sums, &counts, w)?;
    }
    let den = spec.denominator();
    let mut values = Vec::with_capacity(len);
    for (i, s) in sums.into_iter().enumerate() {
        let d = lo + i as u64;
        values.push(finalize_entry(spec, d, s, den)?);
    }
    Ok(CoeffTable { start: lo, values })
}

fn support_of(spec: &ThetaSpec) -> (u64, Vec<u64>) {
    spec.support.clone().unwrap_or((1, vec![0]))
}

fn class_len(r: u64, limit: u64, m: u64) -> usize {
    if r > limit {
        0
    } else {
        ((limit - r) / m + 1) as usize
    }
}

fn accumulate(sums: &mut [i64], counts: &[i32], w: i64) -> Result<()> {
    for (s, &c) in sums.iter_mut().zip(counts) {
        *s = (w.checked_mul(c as i64))
            .and_then(|t| s.checked_add(t))
            .ok_or_else(|| Error::Overflow("coefficient accumulator".into()))?;
    }
    Ok(())
}

fn finalize_entry(spec: &ThetaSpec, d: u64, s: i64, den: i64) -> Result<i64> {
    if !spec.supports(d) {
        return Ok(CoeffTable::UNDEFINED);
    }
    if s % den == 0 {
        Ok(s / den)
    } else if spec.label != 0 {
        Err(Error::Contract(format!("non-integral coefficient {s}/{den} at d = {d}")))
    } else {
        Ok(CoeffTable::UNDEFINED)
    }
}

fn full_table(spec: &ThetaSpec, limit: u64, m: u64, residues: &[u64]) -> Result<CoeffTable> {
    let weights = spec.integer_weights();
    let mut sums: Vec<Vec<i64>> = residues.iter().map(|&r| vec![0i64; class_len(r, limit, m)]).collect();
    for (term, &w) in spec.terms.iter().zip(&weights) {
        let counts = term_counts(spec, &term.form, limit, m, residues);
        for (s, c) in sums.iter_mut().zip(&counts) {
            accumulate(s, c, w)?;
        }
    }
    let den = spec.denominator();
    let mut values = vec![CoeffTable::UNDEFINED; limit as usize];
    for (&r, s) in residues.iter().zip(&sums) {
        for (i, &v) in s.iter().enumerate() {
            let d = r + i as u64 * m;
            if d >= 1 {
                values[(d - 1) as usize] = finalize_entry(spec, d, v, den)?;
            }
        }
    }
    Ok(CoeffTable { start: 1, values })
}

/// Signed point counts of one form, split by residue class of the value.
fn term_counts(spec: &ThetaSpec, form: &TernaryForm, limit: u64, m: u64, residues: &[u64]) -> Vec<Vec<i32>> {
    let separable = (0..3)
        .filter(|&i| (0..3).all(|j| j == i || form.cross(i, j) == 0) && spec.free_of_conditions(i))
        .max_by_key(|&i| (form.diag(i), i));
    match separable {
        Some(w) => convolve(spec, form, limit, m, residues, w),
        None => direct(spec, form, limit, m, residues),
    }
}

fn direct(spec: &ThetaSpec, form: &TernaryForm, limit: u64, m: u64, residues: &[u64]) -> Vec<Vec<i32>> {
    let mut slot = vec![usize::MAX; m as usize];
    for (k, &r) in residues.iter().enumerate() {
        slot[r as usize] = k;
    }
    let mut out: Vec<Vec<i32>> = residues.iter().map(|&r| vec![0i32; class_len(r, limit, m)]).collect();
    for_each_in_shell(form, 0, limit as i64, |v, q| {
        let q = q as u64;
        let k = slot[(q % m) as usize];
        if k != usize::MAX && spec.admits(v) {
            out[k][(q / m) as usize] += spec.sign_of(v) as i32;
        }
    });
    out
}

/// Splits off variable `w` (no cross terms, no conditions): counts the
/// binary form in the other two variables, then sums shifted copies over
/// w ≥ 0, touching only the supported residue classes.
fn convolve(spec: &ThetaSpec, form: &TernaryForm, limit: u64, m: u64, residues: &[u64], w: usize) -> Vec<Vec<i32>> {
    let (u, v) = match w {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let (alpha, beta, gamma) = (form.diag(u), form.cross(u, v), form.diag(v));
    let mut binary: Vec<Vec<i32>> = (0..m).map(|r| vec![0i32; class_len(r, limit, m)]).collect();
    let lim = limit as i64;
    let disc = 4 * alpha * gamma - beta * beta;
    let vmax = ((4.0 * alpha as f64 * lim as f64 / disc as f64).sqrt()) as i64 + 1;
    for pv in -vmax..=vmax {
        let (ulo, uhi) = quadratic_range(alpha, beta * pv, gamma * pv * pv, lim);
        for pu in ulo..=uhi {
            let q = alpha * pu * pu + beta * pu * pv + gamma * pv * pv;
            if q < 0 || q > lim {
                continue;
            }
            let mut p = [0i64; 3];
            p[u] = pu;
            p[v] = pv;
            if spec.admits(p) {
                let q = q as u64;
                binary[(q % m) as usize][(q / m) as usize] += spec.sign_of(p) as i32;
            }
        }
    }
    let c = form.diag(w);
    let wmax = (limit as f64 / c as f64).sqrt() as i64 + 1;
    let m = m as i64;
    residues
        .iter()
        .map(|&rho| {
            let mut t = vec![0i32; class_len(rho, limit, m as u64)];
            t.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
                let i0 = (ci * CHUNK) as i64;
                let i1 = i0 + chunk.len() as i64;
                for pw in 0..=wmax {
                    let cw2 = c * pw * pw;
                    if cw2 > rho as i64 + (i1 - 1) * m {
                        break;
                    }
                    let mult = if pw == 0 { 1 } else { 2 };
                    let shift = rho as i64 - cw2;
                    let src = &binary[shift.rem_euclid(m) as usize];
                    let q = shift.div_euclid(m);
                    let lo = i0.max(-q);
                    let hi = i1.min(src.len() as i64 - q);
                    if lo >= hi {
                        continue;
                    }
                    let dst = &mut chunk[(lo - i0) as usize..(hi - i0) as usize];
                    let s = &src[(lo + q) as usize..(hi + q) as usize];
                    for (a, &b) in dst.iter_mut().zip(s) {
                        *a = a.wrapping_add(mult * b);
                    }
                }
            });
            t
        })
        .collect()
}

/// Integer t with a·t² + b·t + c ≤ hi, as a range relaxed outward by one
/// (callers re-check exactly). Empty ranges come back with lo > hi.
pub(super) fn quadratic_range(a: i64, b: i64, c: i64, hi: i64) -> (i64, i64) {
    let disc = (b as f64) * (b as f64) - 4.0 * a as f64 * (c as f64 - hi as f64);
    if disc < 0.0 {
        return (1, 0);
    }
    let s = disc.sqrt();
    let lo = ((-(b as f64) - s) / (2.0 * a as f64)).floor() as i64 - 1;
    let up = ((-(b as f64) + s) / (2.0 * a as f64)).ceil() as i64 + 1;
    (lo, up)
}

/// Visits every lattice point with lo ≤ Q(v) ≤ hi exactly once.
pub(crate) fn for_each_in_shell(form: &TernaryForm, lo: i64, hi: i64, mut f: impl FnMut([i64; 3], i64)) {
    if hi < lo || hi < 0 {
        return;
    }
    // innermost: smallest diagonal coefficient; outermost: largest
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&i| form.diag(i));
    let [i, j, k] = order;
    let (qi, qj, qk) = (form.diag(i), form.diag(j), form.diag(k));
    let (cij, cik, cjk) = (form.cross(i, j), form.cross(i, k), form.cross(j, k));
    let kmax = form.coordinate_bound(k, hi);
    let a2 = 4 * qi * qj - cij * cij;
    for vk in -kmax..=kmax {
        // y-range after minimizing over the inner variable
        let b2 = (4 * qi * cjk - 2 * cij * cik) * vk;
        let c2 = (4 * qi * qk - cik * cik) * vk * vk;
        let (jlo, jhi) = quadratic_range(a2, b2, c2, 4 * qi * hi);
        for vj in jlo..=jhi {
            let lin = cij * vj + cik * vk;
            let rest = qj * vj * vj + cjk * vj * vk + qk * vk * vk;
            let (ilo, ihi) = quadratic_range(qi, lin, rest, hi);
            if ilo > ihi {
                continue;
            }
            // skip the inner gap where Q < lo
            let (glo, ghi) = if lo > 0 {
                let (a, b) = quadratic_range(qi, lin, rest, lo - 1);
                (a + 3, b - 3)
            } else {
                (1, 0)
            };
            let mut visit = |vi: i64| {
                let q = qi * vi * vi + lin * vi + rest;
                if q >= lo && q <= hi {
                    let mut v = [0i64; 3];
                    v[i] = vi;
                    v[j] = vj;
                    v[k] = vk;
                    f(v, q);
                }
            };
            if glo <= ghi {
                for vi in ilo..glo {
                    visit(vi);
                }
                for vi in ghi + 1..=ihi {
                    visit(vi);
                }
            } else {
                for vi in ilo..=ihi {
                    visit(vi);
                }
            }
        }
    }
}

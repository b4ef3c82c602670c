use super::CoeffTable;
use crate::error::{Error, Result};

/// Eta-quotient q-expansions with known ternary-form counterparts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaSpec {
    /// η(8z)η(16z)Θ(2z)
    A1,
    /// η(8z)η(16z)Θ(4z)
    A2,
    /// η(12z)²Θ(z)
    B,
}

pub const ORACLE_LIMIT: u64 = 1_000_000;

/// Sparse ∏(1 − q^{kn}) up to q^limit by the pentagonal number theorem.
fn euler(k: u64, limit: u64) -> Vec<(u64, i64)> {
    let mut out = vec![(0, 1)];
    for j in 1u64.. {
        let lo = k * j * (3 * j - 1) / 2;
        if lo > limit {
            break;
        }
        let sign = if j % 2 == 1 { -1 } else { 1 };
        out.push((lo, sign));
        let hi = k * j * (3 * j + 1) / 2;
        if hi <= limit {
            out.push((hi, sign));
        }
    }
    out.sort_unstable();
    out
}

fn theta_series(scale: u64, limit: u64) -> Vec<(u64, i64)> {
    let mut out = vec![(0, 1)];
    for n in 1u64.. {
        let e = scale * n * n;
        if e > limit {
            break;
        }
        out.push((e, 2));
    }
    out
}

fn multiply(a: &[(u64, i64)], b: &[(u64, i64)], limit: u64) -> Vec<(u64, i64)> {
    let mut dense = vec![0i64; limit as usize + 1];
    for &(ea, ca) in a {
        for &(eb, cb) in b {
            if ea + eb > limit {
                break;
            }
            dense[(ea + eb) as usize] += ca * cb;
        }
    }
    dense
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c != 0)
        .map(|(e, c)| (e as u64, c))
        .collect()
}

/// Coefficients 1..=limit of the q-expansion.
pub fn eta_product_oracle(spec: EtaSpec, limit: u64) -> Result<CoeffTable> {
    if limit == 0 || limit > ORACLE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "oracle limit must lie in 1..={ORACLE_LIMIT}, got {limit}"
        )));
    }
    // every product carries a leading q, so the rest is needed to limit − 1
    let rest = limit - 1;
    let (eta, theta) = match spec {
        EtaSpec::A1 => (multiply(&euler(8, rest), &euler(16, rest), rest), theta_series(2, rest)),
        EtaSpec::A2 => (multiply(&euler(8, rest), &euler(16, rest), rest), theta_series(4, rest)),
        EtaSpec::B => (multiply(&euler(12, rest), &euler(12, rest), rest), theta_series(1, rest)),
    };
    let series = multiply(&eta, &theta, rest);
    let mut values = vec![0i64; limit as usize];
    for (e, c) in series {
        values[e as usize] = c;
    }
    Ok(CoeffTable { start: 1, values })
}

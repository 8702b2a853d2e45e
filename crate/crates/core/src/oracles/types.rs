//! Occupancy histograms (types) of length-n strings and their exact sizes.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{big_log2, binomial_u128, factorials, ksum, multinomial};
use crate::pmf::Pmf;

/// Number of compositions of `total` into `parts` nonnegative parts.
pub fn composition_count(total: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial_u128((total + parts - 1) as u64, (parts - 1) as u64)
}

/// Call `f` on every composition of `total` into `out.len()` parts, in
/// lexicographically decreasing order. `out` is used as scratch space.
pub fn for_each_composition<F: FnMut(&[u32])>(total: u32, out: &mut [u32], mut f: F) {
    let parts = out.len();
    if parts == 0 {
        if total == 0 {
            f(out);
        }
        return;
    }
    out.iter_mut().for_each(|c| *c = 0);
    out[0] = total;
    loop {
        f(out);
        // Rightmost nonzero part strictly before the last one.
        let Some(i) = (0..parts - 1).rev().find(|&i| out[i] > 0) else {
            return;
        };
        let tail = out[parts - 1];
        out[parts - 1] = 0;
        out[i] -= 1;
        out[i + 1] = tail + 1;
    }
}

/// A type class of a memoryless source: all strings sharing `counts`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeClass {
    pub counts: Vec<u32>,
    /// Exact number of strings in the class.
    #[serde(serialize_with = "serialize_big")]
    pub count: BigUint,
    pub log2_count: f64,
    /// `log2 prod p_i^{c_i}`, the log-probability of each member string.
    pub per_string_log_prob: f64,
}

fn serialize_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `log2 prod p_i^{c_i}`, with `-inf` when a used symbol has probability zero.
pub fn type_log_prob(log2_p: &[f64], counts: &[u32]) -> f64 {
    let mut terms = Vec::with_capacity(counts.len());
    for (&c, &lp) in counts.iter().zip(log2_p) {
        if c == 0 {
            continue;
        }
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        terms.push(c as f64 * lp);
    }
    ksum(terms)
}

/// All type classes of length-`n` strings under `p`, each exactly once.
pub fn enumerate_type_classes(p: &Pmf, n: usize, cap: u64) -> Result<Vec<TypeClass>> {
    if n == 0 {
        return Err(Error::BadRange("blocklength must be at least 1".into()));
    }
    let m = p.m();
    let required = composition_count(n, m);
    if required > cap as u128 {
        return Err(Error::EnumerationTooLarge {
            required: required.to_string(),
            cap,
        });
    }
    let facts = factorials(n);
    let log2_p: Vec<f64> = p.probs().iter().map(|x| x.log2()).collect();
    let mut out = Vec::with_capacity(required as usize);
    let mut buf = vec![0u32; m];
    for_each_composition(n as u32, &mut buf, |c| {
        let count = multinomial(c, &facts);
        out.push(TypeClass {
            counts: c.to_vec(),
            log2_count: big_log2(&count),
            count,
            per_string_log_prob: type_log_prob(&log2_p, c),
        });
    });
    Ok(out)
}

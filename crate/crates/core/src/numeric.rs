//! Small numerical helpers shared by the oracles: compensated summation,
//! big-integer logarithms and log-factorial tables.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn ksum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Sum in a fixed pairwise tree over the slice order. The result depends only
/// on the order of `values`, never on how they were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len if len <= 8 => ksum(values.iter().copied()),
        len => {
            let mid = len / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// log2 of a big integer, accurate to double precision; `-inf` for zero.
pub fn big_log2(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (top, shift) = top_bits(x);
    (top as f64).log2() + shift as f64
}

/// `num / den` as a double, without overflow for huge operands.
pub fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return 0.0;
    }
    // Scale so the quotient carries about 64 significant bits.
    let shift = (den.bits() + 64).saturating_sub(num.bits());
    let q: BigUint = (num << shift) / den;
    let (top, exp) = top_bits(&q);
    top as f64 * 2f64.powi(exp as i32 - shift as i32)
}

/// `x = top * 2^exp` up to truncation, with `top` holding the leading 64 bits.
fn top_bits(x: &BigUint) -> (u64, u64) {
    let bits = x.bits();
    if bits <= 64 {
        (x.to_u64().unwrap(), 0)
    } else {
        let shift = bits - 64;
        ((x >> shift).to_u64().unwrap(), shift)
    }
}

/// Nearest big integer to `2^log2_value` (exact only below 2^53).
pub fn big_from_log2(log2_value: f64) -> BigUint {
    if log2_value == f64::NEG_INFINITY || log2_value < -1.0 {
        return BigUint::zero();
    }
    if log2_value < 52.0 {
        return BigUint::from(log2_value.exp2().round() as u64);
    }
    let int_part = log2_value.floor();
    let frac = log2_value - int_part;
    let mantissa = (frac + 52.0).exp2().round() as u64;
    let shift = int_part as u64 - 52;
    BigUint::from(mantissa) << shift
}

/// `base^exp` as a big integer.
pub fn big_pow(base: usize, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), exp)
}

/// `2^e - 1`.
pub fn mersenne(e: u64) -> BigUint {
    (BigUint::one() << e) - BigUint::one()
}

/// Table of log2(k!) for k = 0..=n, accumulated with compensation.
pub fn log2_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = KahanSum::new();
    table.push(0.0);
    for k in 1..=n {
        acc.add((k as f64).log2());
        table.push(acc.value());
    }
    table
}

/// Exact factorials 0!..=n!.
pub fn factorials(n: usize) -> Vec<BigUint> {
    let mut table = Vec::with_capacity(n + 1);
    let mut f = BigUint::one();
    table.push(f.clone());
    for k in 1..=n {
        f *= BigUint::from(k);
        table.push(f.clone());
    }
    table
}

/// Exact multinomial coefficient (sum counts)! / prod(count!).
pub fn multinomial(counts: &[u32], facts: &[BigUint]) -> BigUint {
    let n: usize = counts.iter().map(|&c| c as usize).sum();
    let mut denom = BigUint::one();
    for &c in counts {
        if c > 1 {
            denom *= &facts[c as usize];
        }
    }
    &facts[n] / denom
}

/// Binomial coefficient as u128, saturating at `u128::MAX`.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-17);
        }
        assert!((acc.value() - (1.0 + 1e-14)).abs() < 1e-18);
    }

    #[test]
    fn big_log2_matches_small_values() {
        for x in [1u64, 2, 3, 1000, u64::MAX] {
            let b = BigUint::from(x);
            assert!((big_log2(&b) - (x as f64).log2()).abs() < 1e-12);
        }
        let huge = big_pow(3, 500);
        assert!((big_log2(&huge) - 500.0 * 3f64.log2()).abs() < 1e-10);
    }

    #[test]
    fn big_ratio_handles_huge_operands() {
        let den = big_pow(4, 400);
        let num = big_pow(4, 399);
        assert!((big_ratio(&num, &den) - 0.25).abs() < 1e-16);
        assert_eq!(big_ratio(&BigUint::from(3u32), &BigUint::from(4u32)), 0.75);
    }

    #[test]
    fn big_from_log2_roundtrips() {
        assert_eq!(big_from_log2(3.0), BigUint::from(8u32));
        let b = big_from_log2(100.0);
        assert_eq!(b, BigUint::one() << 100u32);
        assert_eq!(big_from_log2(f64::NEG_INFINITY), BigUint::zero());
    }

    #[test]
    fn multinomials() {
        let f = factorials(10);
        assert_eq!(multinomial(&[2, 1, 1], &f), BigUint::from(12u32));
        assert_eq!(binomial_u128(6, 2), 15);
        assert_eq!(binomial_u128(5, 0), 1);
        let lf = log2_factorials(10);
        assert!((lf[10] - 3628800f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn pairwise_sum_is_order_defined() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v.clone()));
        assert!((pairwise_sum(&v) - ksum(v.iter().copied())).abs() < 1e-13);
    }
}

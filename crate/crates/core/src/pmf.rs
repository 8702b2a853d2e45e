//! Validated probability vectors and the scalar functionals built on them.
//! Every quantity is reported in bits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::ksum;

const SUM_TOL: f64 = 1e-9;
const NEG_TOL: f64 = 1e-12;

/// A probability mass function on the alphabet `{0, .., m-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    #[serde(rename = "p")]
    probs: Vec<f64>,
}

impl Pmf {
    /// Validate `raw`, optionally dividing by its sum first.
    pub fn new(raw: &[f64], renormalize: bool) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::TooShort { len: raw.len() });
        }
        for (index, &value) in raw.iter().enumerate() {
            if value.is_nan() || value < -NEG_TOL {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let mut probs: Vec<f64> = raw.iter().map(|&x| x.max(0.0)).collect();
        let sum = ksum(probs.iter().copied());
        if renormalize {
            if !(sum > 0.0 && sum.is_finite()) {
                return Err(Error::BadSum { sum });
            }
            for p in &mut probs {
                *p /= sum;
            }
        } else if sum.is_nan() || (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::BadSum { sum });
        }
        Ok(Pmf { probs })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::TooShort { len: m });
        }
        Ok(Pmf {
            probs: vec![1.0 / m as f64; m],
        })
    }

    /// Alphabet size.
    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: usize) -> f64 {
        self.probs[x]
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.m() as f64;
        self.probs.iter().all(|&p| (p - u).abs() <= 1e-12)
    }

    /// Squared 2-norm, `sum p^2`.
    pub fn norm2_sq(&self) -> f64 {
        ksum(self.probs.iter().map(|p| p * p))
    }

    /// `sum p^3`.
    pub fn norm3_cubed(&self) -> f64 {
        ksum(self.probs.iter().map(|p| p * p * p))
    }
}

/// `Pmf::new` under its operational name.
pub fn validate_pmf(raw: &[f64], renormalize: bool) -> Result<Pmf> {
    Pmf::new(raw, renormalize)
}

fn check_dims(p: &Pmf, q: &Pmf) -> Result<()> {
    if p.m() != q.m() {
        return Err(Error::DimensionMismatch {
            left: p.m(),
            right: q.m(),
        });
    }
    Ok(())
}

/// Bhattacharyya coefficient `sum sqrt(p q)`.
fn affinity(p: &Pmf, q: &Pmf) -> f64 {
    ksum(p.probs.iter().zip(&q.probs).map(|(a, b)| (a * b).sqrt()))
}

fn d_half_from_affinity(s: f64) -> f64 {
    if s <= 0.0 {
        f64::INFINITY
    } else {
        (-2.0 * s.log2()).max(0.0)
    }
}

/// Rényi divergence of order 1/2 in bits; `+inf` for disjoint supports.
pub fn renyi_half_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    check_dims(p, q)?;
    Ok(d_half_from_affinity(affinity(p, q)))
}

/// Shannon entropy in bits.
pub fn entropy(p: &Pmf) -> f64 {
    -ksum(
        p.probs
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| x * x.log2()),
    )
}

/// Rényi entropy of order 1/2 in bits.
pub fn renyi_half_entropy(p: &Pmf) -> f64 {
    2.0 * ksum(p.probs.iter().map(|x| x.sqrt())).log2()
}

/// Relative entropy in bits.
pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    check_dims(p, q)?;
    let mut terms = Vec::with_capacity(p.m());
    for (&a, &b) in p.probs.iter().zip(&q.probs) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        terms.push(a * (a / b).log2());
    }
    Ok(ksum(terms).max(0.0))
}

/// Total variation distance.
pub fn total_variation(p: &Pmf, q: &Pmf) -> Result<f64> {
    check_dims(p, q)?;
    Ok(0.5 * ksum(p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs())))
}

/// Pearson chi-square `sum (p - q)^2 / q`.
pub fn chi_square(p: &Pmf, q: &Pmf) -> Result<f64> {
    check_dims(p, q)?;
    let mut terms = Vec::with_capacity(p.m());
    for (&a, &b) in p.probs.iter().zip(&q.probs) {
        if b == 0.0 {
            if a > 0.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        terms.push((a - b) * (a - b) / b);
    }
    Ok(ksum(terms))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceSuite {
    pub tv: f64,
    pub hellinger_sq: f64,
    pub d_half: f64,
    pub kl: f64,
    pub chi_sq: f64,
    /// Entropy of the first argument.
    pub entropy: f64,
    /// Order-1/2 Rényi entropy of the first argument.
    pub h_half: f64,
}

pub fn distance_suite(p: &Pmf, q: &Pmf) -> Result<DivergenceSuite> {
    check_dims(p, q)?;
    let s = affinity(p, q);
    Ok(DivergenceSuite {
        tv: total_variation(p, q)?,
        hellinger_sq: (1.0 - s).clamp(0.0, 1.0),
        d_half: d_half_from_affinity(s),
        kl: kl_divergence(p, q)?,
        chi_sq: chi_square(p, q)?,
        entropy: entropy(p),
        h_half: renyi_half_entropy(p),
    })
}

/// The triple `(2^(-D-1), 1 - TV, 2^(-D/2))` with `D` the order-1/2 divergence.
/// The middle entry always lies between the outer two.
pub fn tv_sandwich(p: &Pmf, q: &Pmf) -> Result<(f64, f64, f64)> {
    check_dims(p, q)?;
    let d = renyi_half_divergence(p, q)?;
    let tv = total_variation(p, q)?;
    Ok(((-d - 1.0).exp2(), 1.0 - tv, (-d / 2.0).exp2()))
}

/// `ln sum_{common support} p^a q^(1-a)`; `-inf` when the supports are disjoint.
fn ln_chernoff_sum(p: &Pmf, q: &Pmf, alpha: f64) -> f64 {
    let s = ksum(
        p.probs
            .iter()
            .zip(&q.probs)
            .filter(|(a, b)| **a > 0.0 && **b > 0.0)
            .map(|(a, b)| (alpha * a.ln() + (1.0 - alpha) * b.ln()).exp()),
    );
    s.ln()
}

/// Minimise a convex function on `[lo, hi]` by golden-section search.
/// Returns `(argmin, min)`, also considering both endpoints.
pub(crate) fn golden_section_min<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid));
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Chernoff information `-log2 min_a sum p^a q^(1-a)` in bits, together with
/// the minimising exponent.
pub fn chernoff_with_alpha(p: &Pmf, q: &Pmf) -> Result<(f64, f64)> {
    check_dims(p, q)?;
    if ln_chernoff_sum(p, q, 0.5) == f64::NEG_INFINITY {
        return Ok((f64::INFINITY, 0.5));
    }
    let (alpha, ln_min) = golden_section_min(|a| ln_chernoff_sum(p, q, a), 0.0, 1.0, 1e-10);
    Ok(((-ln_min / std::f64::consts::LN_2).max(0.0), alpha))
}

pub fn chernoff_information(p: &Pmf, q: &Pmf) -> Result<f64> {
    chernoff_with_alpha(p, q).map(|(c, _)| c)
}

/// The tilted distribution proportional to `p^alpha`, computed in the log domain.
pub fn tilted_pmf(p: &Pmf, alpha: f64) -> Result<Pmf> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::BadRange(format!("tilt exponent must be positive, got {alpha}")));
    }
    let logs: Vec<f64> = p
        .probs
        .iter()
        .map(|&x| if x > 0.0 { alpha * x.ln() } else { f64::NEG_INFINITY })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|&l| (l - top).exp()).collect();
    let z = ksum(w.iter().copied());
    Ok(Pmf {
        probs: w.iter().map(|x| x / z).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pmf(v: &[f64]) -> Pmf {
        Pmf::new(v, false).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(pmf(&[0.5, 0.25, 0.25]).m(), 3);
        let p = Pmf::new(&[2.0, 1.0, 1.0], true).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.25, 0.25]);
        assert!(matches!(Pmf::new(&[0.5, 0.6], false), Err(Error::BadSum { .. })));
        assert!(matches!(Pmf::new(&[1.0], false), Err(Error::TooShort { len: 1 })));
        assert!(matches!(
            Pmf::new(&[1.1, -0.1], false),
            Err(Error::NegativeMass { index: 1, .. })
        ));
        assert!(Pmf::new(&[0.5, 0.5 + 5e-10], false).is_ok());
    }

    #[test]
    fn half_divergence_values() {
        let u3 = Pmf::uniform(3).unwrap();
        assert_eq!(renyi_half_divergence(&u3, &u3).unwrap(), 0.0);
        let u2 = Pmf::uniform(2).unwrap();
        assert_abs_diff_eq!(renyi_half_divergence(&pmf(&[1.0, 0.0]), &u2).unwrap(), 1.0, epsilon = 1e-14);
        let d = renyi_half_divergence(&pmf(&[0.5, 0.25, 0.25]), &u3).unwrap();
        assert_abs_diff_eq!(d, 0.0418558944, epsilon = 1e-10);
        let disjoint = renyi_half_divergence(&pmf(&[1.0, 0.0]), &pmf(&[0.0, 1.0])).unwrap();
        assert!(disjoint.is_infinite());
    }

    #[test]
    fn suite_values() {
        let s = distance_suite(&pmf(&[0.5, 0.25, 0.25]), &Pmf::uniform(3).unwrap()).unwrap();
        assert_abs_diff_eq!(s.tv, 1.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.hellinger_sq, 0.0144014403, epsilon = 1e-9);
        assert_abs_diff_eq!(s.kl, 0.0849625007, epsilon = 1e-9);
        assert_abs_diff_eq!(s.chi_sq, 0.125, epsilon = 1e-14);
        assert_abs_diff_eq!(s.entropy, 1.5, epsilon = 1e-14);

        let s = distance_suite(&pmf(&[1.0, 0.0]), &Pmf::uniform(2).unwrap()).unwrap();
        assert_abs_diff_eq!(s.tv, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.hellinger_sq, 1.0 - 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.d_half, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.kl, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.chi_sq, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sandwich_values() {
        let (lo, mid, hi) = tv_sandwich(&pmf(&[0.5, 0.25, 0.25]), &Pmf::uniform(3).unwrap()).unwrap();
        assert_abs_diff_eq!(lo, 0.48570226, epsilon = 1e-7);
        assert_abs_diff_eq!(mid, 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 0.98559856, epsilon = 1e-7);
        let u = Pmf::uniform(4).unwrap();
        assert_eq!(tv_sandwich(&u, &u).unwrap(), (0.5, 1.0, 1.0));
        assert_eq!(tv_sandwich(&pmf(&[1.0, 0.0]), &pmf(&[0.0, 1.0])).unwrap(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn chernoff_values() {
        let u2 = Pmf::uniform(2).unwrap();
        assert_abs_diff_eq!(chernoff_information(&u2, &u2).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(chernoff_information(&pmf(&[1.0, 0.0]), &u2).unwrap(), 1.0, epsilon = 1e-9);
        let (c, alpha) = chernoff_with_alpha(&pmf(&[0.75, 0.25]), &u2).unwrap();
        assert_abs_diff_eq!(c, 0.0500445, epsilon = 1e-6);
        assert!((alpha - 0.488).abs() < 5e-3);
    }

    #[test]
    fn tilt_values() {
        let p = pmf(&[0.75, 0.25]);
        let t = tilted_pmf(&p, 1.0).unwrap();
        assert_abs_diff_eq!(t.get(0), 0.75, epsilon = 1e-15);
        let t = tilted_pmf(&p, 0.5).unwrap();
        assert_abs_diff_eq!(t.get(0), 0.633974596, epsilon = 1e-9);
        let t = tilted_pmf(&p, 1e-12).unwrap();
        assert_abs_diff_eq!(t.get(0), 0.5, epsilon = 1e-9);
        assert_eq!(tilted_pmf(&pmf(&[1.0, 0.0]), 2.0).unwrap().get(1), 0.0);
        assert!(tilted_pmf(&p, 0.0).is_err());
    }

    fn arb_pair() -> impl Strategy<Value = (Pmf, Pmf)> {
        (2usize..=8).prop_flat_map(|m| {
            (
                proptest::collection::vec(0.0f64..1.0, m),
                proptest::collection::vec(0.0f64..1.0, m),
            )
                .prop_filter("nonzero", |(a, b)| a.iter().sum::<f64>() > 1e-6 && b.iter().sum::<f64>() > 1e-6)
                .prop_map(|(a, b)| (Pmf::new(&a, true).unwrap(), Pmf::new(&b, true).unwrap()))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn sandwich_ordering((p, q) in arb_pair()) {
            let (lo, mid, hi) = tv_sandwich(&p, &q).unwrap();
            prop_assert!(mid - lo >= -1e-12);
            prop_assert!(hi - mid >= -1e-12);
        }

        #[test]
        fn divergence_chain((p, q) in arb_pair()) {
            let s = distance_suite(&p, &q).unwrap();
            prop_assert!(s.d_half <= s.kl + 1e-12);
            prop_assert!(s.kl <= (1.0 + s.chi_sq).log2() + 1e-12);
            prop_assert!((s.d_half - (-2.0 * (1.0 - s.hellinger_sq).log2())).abs() < 1e-9);
        }

        #[test]
        fn half_divergence_to_uniform((p, _q) in arb_pair()) {
            let u = Pmf::uniform(p.m()).unwrap();
            let d = renyi_half_divergence(&p, &u).unwrap();
            let target = (p.m() as f64).log2() - renyi_half_entropy(&p);
            prop_assert!((d - target.max(0.0)).abs() < 1e-12);
        }

        #[test]
        fn chernoff_between_half_and_full((p, _q) in arb_pair()) {
            let u = Pmf::uniform(p.m()).unwrap();
            let d = renyi_half_divergence(&p, &u).unwrap();
            let c = chernoff_information(&p, &u).unwrap();
            prop_assert!(c >= 0.5 * d - 1e-9);
            prop_assert!(c <= d + 1e-9);
        }

        #[test]
        fn tilt_composes((p, _q) in arb_pair(), a in 0.1f64..3.0, b in 0.1f64..3.0) {
            let twice = tilted_pmf(&tilted_pmf(&p, a).unwrap(), b).unwrap();
            let once = tilted_pmf(&p, a * b).unwrap();
            for x in 0..p.m() {
                prop_assert!((twice.get(x) - once.get(x)).abs() < 1e-12);
            }
        }
    }
}

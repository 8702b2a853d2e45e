//! Exact small-blocklength fundamental limits by exhaustive enumeration:
//! type classes for memoryless sources, all strings for Markov chains.

pub mod profile;
pub mod types;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::fmt_sig;
use crate::numeric::{big_from_log2, big_pow, big_ratio, multinomial, factorials, mersenne};
use crate::par::Execution;
use crate::pmf::{renyi_half_divergence, Pmf};
use crate::sources::Source;
use profile::{memoryless_overlap, Profile};
use types::{for_each_composition, type_log_prob};

pub use types::{enumerate_type_classes, TypeClass};

/// Default limit on the number of type classes enumerated.
pub const DEFAULT_TYPE_CAP: u64 = 100_000_000;
/// Default limit on `m^n` for full Markov enumeration.
pub const DEFAULT_MARKOV_CAP: u64 = 1 << 24;
/// Environment variable overriding both caps.
pub const CAP_ENV: &str = "SCLAB_ENUM_CAP";

/// Tolerance used when flooring `nR`.
const FLOOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStrategy {
    /// Evaluate every blocklength from 1 upward.
    #[default]
    Linear,
    /// Skip blocklengths excluded by a provable lower bound on the criterion,
    /// then scan linearly. Returns the same blocklength as `Linear`.
    Bracketed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub type_cap: u64,
    pub markov_cap: u64,
    pub exec: Execution,
    pub strategy: SearchStrategy,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            type_cap: DEFAULT_TYPE_CAP,
            markov_cap: DEFAULT_MARKOV_CAP,
            exec: Execution::default(),
            strategy: SearchStrategy::default(),
        }
    }
}

impl OracleConfig {
    /// Defaults, with both caps replaced by `SCLAB_ENUM_CAP` when it is set.
    pub fn from_env() -> Self {
        let mut cfg = OracleConfig::default();
        if let Some(cap) = std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            cfg.type_cap = cap;
            cfg.markov_cap = cap;
        }
        cfg
    }
}

/// Which sample complexity to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Fixed-length codes, max of error and relative codebook size.
    #[serde(rename = "n_fl")]
    NFl,
    /// Fixed-length codes, sum of the two.
    #[serde(rename = "N_fl")]
    BigNFl,
    /// Variable-length codes, max criterion.
    #[serde(rename = "n_star")]
    NStar,
    #[serde(rename = "N_star")]
    BigNStar,
    /// Prefix-free codes, max criterion.
    #[serde(rename = "n_p")]
    NP,
    #[serde(rename = "N_p")]
    BigNP,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::NFl,
        Variant::BigNFl,
        Variant::NStar,
        Variant::BigNStar,
        Variant::NP,
        Variant::BigNP,
    ];

    /// True for the variants that add the two error terms.
    pub fn is_sum(self) -> bool {
        matches!(self, Variant::BigNFl | Variant::BigNStar | Variant::BigNP)
    }

    /// Upper end of the meaningful epsilon range.
    pub fn epsilon_limit(self) -> f64 {
        if self.is_sum() {
            2.0
        } else {
            1.0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::NFl => "n_fl",
            Variant::BigNFl => "N_fl",
            Variant::NStar => "n_star",
            Variant::BigNStar => "N_star",
            Variant::NP => "n_p",
            Variant::BigNP => "N_p",
        }
    }

    /// `c` such that the criterion at `n` is at least `c (1 - TV_n)`.
    fn overlap_factor(self) -> f64 {
        match self {
            Variant::BigNFl => 1.0,
            Variant::NFl | Variant::BigNStar | Variant::BigNP => 0.5,
            Variant::NStar | Variant::NP => 0.25,
        }
    }

    pub fn check_epsilon(self, epsilon: f64) -> Result<()> {
        if !(epsilon > 0.0 && epsilon < self.epsilon_limit()) {
            return Err(Error::BadEpsilon {
                epsilon,
                range: if self.is_sum() { "(0, 2)" } else { "(0, 1)" },
            });
        }
        Ok(())
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub n: usize,
    pub criterion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub variant: Variant,
    pub epsilon: f64,
    /// Smallest blocklength meeting the target, or `None` if none up to `n_max`.
    pub n_found: Option<usize>,
    pub n_max: usize,
    pub trace: Vec<TracePoint>,
}

impl ComplexityReport {
    pub fn is_found(&self) -> bool {
        self.n_found.is_some()
    }

    /// One CSV row per scanned blocklength: variant, epsilon, n, criterion.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["variant", "epsilon", "n", "criterion"]).map_err(io)?;
        for t in &self.trace {
            w.write_record([
                self.variant.name().to_string(),
                fmt_sig(self.epsilon),
                t.n.to_string(),
                fmt_sig(t.criterion),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Every criterion at one blocklength. None depends on epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criteria {
    pub n: usize,
    /// `1 - TV(P_n, U^n)`.
    pub overlap: f64,
    pub n_fl: f64,
    pub n_star: f64,
    pub big_n_star: f64,
    pub n_p: f64,
    pub big_n_p: f64,
}

impl Criteria {
    pub fn get(&self, v: Variant) -> f64 {
        match v {
            Variant::NFl => self.n_fl,
            Variant::BigNFl => self.overlap,
            Variant::NStar => self.n_star,
            Variant::BigNStar => self.big_n_star,
            Variant::NP => self.n_p,
            Variant::BigNP => self.big_n_p,
        }
    }

    fn from_profile(p: &Profile) -> Self {
        let budgets = 0..=p.max_budget();
        let size = |l: u32| (l as f64 - p.log2_space).exp2();
        let mut c = Criteria {
            n: p.n,
            overlap: p.overlap(),
            n_fl: p.best_max_codebook().1,
            n_star: f64::INFINITY,
            big_n_star: f64::INFINITY,
            n_p: f64::INFINITY,
            big_n_p: f64::INFINITY,
        };
        for l in budgets {
            let t_star = p.tail(p.one_to_one_frac(l));
            let t_p = p.tail(p.prefix_frac(l));
            let s = size(l);
            c.n_star = c.n_star.min(t_star.max(s));
            c.big_n_star = c.big_n_star.min(t_star + s);
            c.n_p = c.n_p.min(t_p.max(s));
            c.big_n_p = c.big_n_p.min(t_p + s);
        }
        c
    }
}

/// Sample-complexity searches over one source, caching per-blocklength
/// results across variants and targets.
#[derive(Debug, Clone)]
pub struct ComplexityOracle {
    source: Source,
    config: OracleConfig,
    overlap: HashMap<usize, f64>,
    criteria: HashMap<usize, Criteria>,
}

impl ComplexityOracle {
    pub fn new(source: Source, config: OracleConfig) -> Self {
        ComplexityOracle {
            source,
            config,
            overlap: HashMap::new(),
            criteria: HashMap::new(),
        }
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn profile(&self, n: usize) -> Result<Profile> {
        build_profile(&self.source, n, &self.config)
    }

    /// `1 - TV(P_n, U^n)`.
    pub fn overlap(&mut self, n: usize) -> Result<f64> {
        if let Some(&v) = self.overlap.get(&n) {
            return Ok(v);
        }
        let v = match &self.source {
            Source::Memoryless(s) => {
                memoryless_overlap(&s.marginal, n, self.config.type_cap, self.config.exec)?.0
            }
            Source::Markov(_) => self.criteria(n)?.overlap,
        };
        self.overlap.insert(n, v);
        Ok(v)
    }

    pub fn criteria(&mut self, n: usize) -> Result<Criteria> {
        if let Some(&c) = self.criteria.get(&n) {
            return Ok(c);
        }
        let c = Criteria::from_profile(&self.profile(n)?);
        self.criteria.insert(n, c);
        self.overlap.entry(n).or_insert(c.overlap);
        Ok(c)
    }

    pub fn criterion(&mut self, variant: Variant, n: usize) -> Result<f64> {
        if variant == Variant::BigNFl {
            self.overlap(n)
        } else {
            Ok(self.criteria(n)?.get(variant))
        }
    }

    /// First blocklength that could satisfy `variant` at `epsilon`, using
    /// `criterion(n) >= c (1 - TV_n)` and the monotonicity of `TV_n`.
    fn bracket_start(&mut self, variant: Variant, epsilon: f64, n_max: usize) -> Result<usize> {
        let c = variant.overlap_factor();
        let Source::Memoryless(src) = &self.source else {
            return Ok(1);
        };
        let d = renyi_half_divergence(&src.marginal, &Pmf::uniform(src.m())?)?;
        let skip = (c / epsilon).log2();
        if d == 0.0 {
            // The overlap is identically 1.
            return Ok(if c <= epsilon { 1 } else { n_max + 1 });
        }
        // 2^(-nD-1) <= 1 - TV_n <= 2^(-nD/2).
        let lo_real = (skip - 1.0) / d;
        let mut lo = ((lo_real * (1.0 - 1e-9) - 1e-9).ceil().max(1.0)) as usize;
        let hi_real = 2.0 * skip / d;
        let mut hi = ((hi_real * (1.0 + 1e-9) + 1e-9).ceil().max(1.0) as usize).min(n_max);
        if lo > n_max {
            return Ok(n_max + 1);
        }
        lo = lo.min(hi);
        if c * self.overlap(hi)? > epsilon {
            return Ok(if hi >= n_max { n_max + 1 } else { hi + 1 });
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if c * self.overlap(mid)? <= epsilon {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    /// Smallest `n <= n_max` whose criterion is at most `epsilon`.
    pub fn search(&mut self, variant: Variant, epsilon: f64, n_max: usize) -> Result<ComplexityReport> {
        variant.check_epsilon(epsilon)?;
        if n_max == 0 {
            return Err(Error::BadRange("n_max must be at least 1".into()));
        }
        let start = match self.config.strategy {
            SearchStrategy::Linear => 1,
            SearchStrategy::Bracketed => self.bracket_start(variant, epsilon, n_max)?,
        };
        let mut trace = Vec::new();
        for n in start..=n_max {
            let v = self.criterion(variant, n)?;
            trace.push(TracePoint { n, criterion: v });
            if v <= epsilon {
                return Ok(ComplexityReport {
                    variant,
                    epsilon,
                    n_found: Some(n),
                    n_max,
                    trace,
                });
            }
        }
        Ok(ComplexityReport {
            variant,
            epsilon,
            n_found: None,
            n_max,
            trace,
        })
    }
}

fn build_profile(source: &Source, n: usize, cfg: &OracleConfig) -> Result<Profile> {
    if n == 0 {
        return Err(Error::BadRange("blocklength must be at least 1".into()));
    }
    match source {
        Source::Memoryless(s) => Profile::memoryless(&s.marginal, n, cfg.type_cap, cfg.exec),
        Source::Markov(s) => Profile::markov(s, n, cfg.markov_cap, cfg.exec),
    }
}

/// `TV(P^n, U^n)`.
pub fn exact_tv_to_uniform(p: &Pmf, n: usize) -> Result<f64> {
    exact_tv_with(p, n, &OracleConfig::from_env())
}

pub fn exact_tv_with(p: &Pmf, n: usize, cfg: &OracleConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::BadRange("blocklength must be at least 1".into()));
    }
    Ok(memoryless_overlap(p, n, cfg.type_cap, cfg.exec)?.1)
}

/// Total probability of the `k` most likely length-`n` strings.
pub fn top_k_mass(source: &Source, n: usize, k: &BigUint) -> Result<f64> {
    top_k_mass_with(source, n, k, &OracleConfig::from_env())
}

pub fn top_k_mass_with(source: &Source, n: usize, k: &BigUint, cfg: &OracleConfig) -> Result<f64> {
    let total = big_pow(source.m(), n);
    if *k > total {
        return Err(Error::KOutOfRange {
            k: k.to_string(),
            total: total.to_string(),
        });
    }
    let prof = build_profile(source, n, cfg)?;
    if k.is_zero() {
        return Ok(0.0);
    }
    if *k == total {
        return Ok(prof.top(2.0));
    }
    Ok(prof.top(big_ratio(k, &total)))
}

/// `floor(nR)` with a small tolerance for rates given as decimals.
pub fn rate_budget(n: usize, rate: f64) -> Result<u32> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::NonpositiveRate { rate });
    }
    Ok((n as f64 * rate + FLOOR_TOL).floor() as u32)
}

/// Number of strings an optimal one-to-one code describes in at most `L`
/// bits: `2^(L+1) - 1`.
pub fn one_to_one_budget_count(l: u32) -> BigUint {
    mersenne(l as u64 + 1)
}

/// Number of strings a lossless prefix code can describe in at most `L` bits:
/// `2^L - 1`, or all `m^n` strings when `2^L >= m^n`.
pub fn prefix_budget_count(l: u32, m: usize, n: usize) -> BigUint {
    let total = big_pow(m, n);
    let pow = BigUint::from(1u8) << l;
    if pow >= total {
        total
    } else {
        pow - 1u8
    }
}

fn tail_of_count(prof: &Profile, k: &BigUint, total: &BigUint) -> f64 {
    if k >= total {
        0.0
    } else {
        prof.tail(big_ratio(k, total))
    }
}

/// Smallest excess-rate probabilities at rate `R`: for one-to-one codes and
/// for prefix-free codes.
pub fn excess_rate_exact(source: &Source, n: usize, rate: f64) -> Result<(f64, f64)> {
    excess_rate_with(source, n, rate, &OracleConfig::from_env())
}

pub fn excess_rate_with(source: &Source, n: usize, rate: f64, cfg: &OracleConfig) -> Result<(f64, f64)> {
    let l = rate_budget(n, rate)?;
    let prof = build_profile(source, n, cfg)?;
    let total = big_pow(source.m(), n);
    let eps_star = tail_of_count(&prof, &one_to_one_budget_count(l), &total);
    let eps_prefix = tail_of_count(&prof, &prefix_budget_count(l, source.m(), n), &total);
    Ok((eps_star, eps_prefix))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedTradeoff {
    /// `min_C P(C^c) + |C|/m^n`, equal to `1 - TV`.
    pub sum_value: f64,
    /// `min_C max{P(C^c), |C|/m^n}`.
    pub max_value: f64,
    /// Size of the likelihood-ratio codebook `{x : P(x) >= m^-n}`.
    #[serde(serialize_with = "serialize_big")]
    pub k_sum: BigUint,
    /// Size of a codebook attaining `max_value`. Exact when `m^n < 2^53`,
    /// otherwise rounded to double precision.
    #[serde(serialize_with = "serialize_big")]
    pub k_max: BigUint,
}

fn serialize_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Best fixed-length codebooks of top-k form for both criteria.
pub fn best_fixed_tradeoff(source: &Source, n: usize) -> Result<FixedTradeoff> {
    best_fixed_tradeoff_with(source, n, &OracleConfig::from_env())
}

pub fn best_fixed_tradeoff_with(source: &Source, n: usize, cfg: &OracleConfig) -> Result<FixedTradeoff> {
    let prof = build_profile(source, n, cfg)?;
    let (x_max, max_value) = prof.best_max_codebook();
    let k_sum = likelihood_ratio_count(source, n, &prof)?;
    Ok(FixedTradeoff {
        sum_value: prof.overlap(),
        max_value,
        k_sum,
        k_max: frac_to_count(x_max, prof.log2_space),
    })
}

fn frac_to_count(x: f64, log2_space: f64) -> BigUint {
    if x <= 0.0 {
        return BigUint::zero();
    }
    if log2_space < 53.0 {
        BigUint::from((x * log2_space.exp2()).round() as u64)
    } else {
        big_from_log2(x.log2() + log2_space)
    }
}

/// Exact number of strings with `P(x) >= m^-n`.
fn likelihood_ratio_count(source: &Source, n: usize, prof: &Profile) -> Result<BigUint> {
    let cut = -prof.log2_space - 1e-9;
    match source {
        Source::Memoryless(s) => {
            let log2_p: Vec<f64> = s.marginal.probs().iter().map(|x| x.log2()).collect();
            let facts = factorials(n);
            let mut total = BigUint::zero();
            let mut buf = vec![0u32; s.m()];
            for_each_composition(n as u32, &mut buf, |c| {
                if type_log_prob(&log2_p, c) >= cut {
                    total += multinomial(c, &facts);
                }
            });
            Ok(total)
        }
        Source::Markov(_) => Ok(BigUint::from(
            prof.levels.iter().filter(|l| l.lp >= cut).count(),
        )),
    }
}

/// Sample complexity of `variant` with the configuration read from the
/// environment and a linear scan.
pub fn sample_complexity(
    source: &Source,
    epsilon: f64,
    variant: Variant,
    n_max: usize,
) -> Result<ComplexityReport> {
    ComplexityOracle::new(source.clone(), OracleConfig::from_env()).search(variant, epsilon, n_max)
}

/// `D_{1/2}(P^n || Q^n)` summed over type classes.
pub fn product_half_divergence(p: &Pmf, q: &Pmf, n: usize, cap: u64) -> Result<f64> {
    if p.m() != q.m() {
        return Err(Error::DimensionMismatch {
            left: p.m(),
            right: q.m(),
        });
    }
    // sqrt(p q) as a sub-probability vector: its n-fold product summed over
    // all strings is the affinity of the product laws.
    let root: Vec<f64> = p.probs().iter().zip(q.probs()).map(|(a, b)| (a * b).sqrt()).collect();
    let log_root: Vec<f64> = root.iter().map(|x| x.log2()).collect();
    let classes = enumerate_type_classes(p, n, cap)?;
    let mut terms = Vec::with_capacity(classes.len());
    for t in &classes {
        let lp = type_log_prob(&log_root, &t.counts);
        if lp > f64::NEG_INFINITY {
            terms.push((t.log2_count + lp).exp2());
        }
    }
    let s = crate::numeric::ksum(terms);
    Ok(if s <= 0.0 { f64::INFINITY } else { (-2.0 * s.log2()).max(0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{MarkovSource, MemorylessSource};

    fn mem(v: &[f64]) -> Source {
        Source::Memoryless(MemorylessSource::new(Pmf::new(v, false).unwrap()))
    }

    #[test]
    fn tv_examples() {
        let u = Pmf::uniform(3).unwrap();
        assert!(exact_tv_to_uniform(&u, 5).unwrap().abs() < 1e-14);
        let p = Pmf::new(&[0.75, 0.25], false).unwrap();
        assert!((exact_tv_to_uniform(&p, 2).unwrap() - 0.3125).abs() < 1e-15);
        let p = Pmf::new(&[0.9, 0.1], false).unwrap();
        assert!((exact_tv_to_uniform(&p, 2).unwrap() - 0.56).abs() < 1e-15);
    }

    #[test]
    fn top_k_examples() {
        let s = mem(&[0.75, 0.25]);
        assert!((top_k_mass(&s, 2, &BigUint::from(1u8)).unwrap() - 0.5625).abs() < 1e-15);
        assert!((top_k_mass(&s, 2, &BigUint::from(4u8)).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(top_k_mass(&s, 2, &BigUint::from(5u8)), Err(Error::KOutOfRange { .. })));
        let point = mem(&[1.0, 0.0]);
        assert_eq!(top_k_mass(&point, 10, &BigUint::from(1u8)).unwrap(), 1.0);
    }

    #[test]
    fn excess_rate_examples() {
        let (star, prefix) = excess_rate_exact(&mem(&[0.75, 0.25]), 2, 0.5).unwrap();
        assert!((star - 0.0625).abs() < 1e-15);
        assert!((prefix - 0.4375).abs() < 1e-15);
        let (star, _) = excess_rate_exact(&mem(&[0.5, 0.5]), 2, 1.0).unwrap();
        assert_eq!(star, 0.0);
        let (star, _) = excess_rate_exact(&mem(&[1.0, 0.0]), 7, 0.1).unwrap();
        assert_eq!(star, 0.0);
        assert!(matches!(excess_rate_exact(&mem(&[0.5, 0.5]), 2, 0.0), Err(Error::NonpositiveRate { .. })));
    }

    #[test]
    fn fixed_tradeoff_examples() {
        let t = best_fixed_tradeoff(&mem(&[0.9, 0.1]), 1).unwrap();
        assert!((t.sum_value - 0.6).abs() < 1e-15);
        assert_eq!(t.max_value, 0.5);
        assert_eq!(t.k_max, BigUint::from(1u8));
        assert_eq!(t.k_sum, BigUint::from(1u8));
        let t = best_fixed_tradeoff(&mem(&[0.5, 0.5]), 6).unwrap();
        assert!((t.sum_value - 1.0).abs() < 1e-14);
        assert_eq!(t.k_sum, BigUint::from(64u8));
    }

    #[test]
    fn search_examples() {
        let point = mem(&[1.0, 0.0]);
        let r = sample_complexity(&point, 0.01, Variant::NFl, 50).unwrap();
        assert_eq!(r.n_found, Some(7));
        let p = mem(&[0.9, 0.1]);
        let r = sample_complexity(&p, 0.5, Variant::BigNFl, 50).unwrap();
        assert_eq!(r.n_found, Some(2));
        assert!((r.trace[0].criterion - 0.6).abs() < 1e-15);
        assert!((r.trace[1].criterion - 0.44).abs() < 1e-15);
        let r = sample_complexity(&p, 0.5, Variant::NFl, 50).unwrap();
        assert_eq!(r.n_found, Some(1));
        assert!(matches!(
            sample_complexity(&p, 1.5, Variant::NFl, 5),
            Err(Error::BadEpsilon { .. })
        ));
        assert!(sample_complexity(&p, 1.5, Variant::BigNFl, 5).is_ok());
    }

    #[test]
    fn bracketed_matches_linear() {
        for probs in [[0.7, 0.3, 0.0], [0.5, 0.3, 0.2], [0.6, 0.2, 0.2], [1.0, 0.0, 0.0]] {
            let src = mem(&probs);
            for variant in Variant::ALL {
                for eps in [0.5, 0.2, 0.05] {
                    let mut lin = ComplexityOracle::new(src.clone(), OracleConfig::default());
                    let cfg = OracleConfig {
                        strategy: SearchStrategy::Bracketed,
                        ..OracleConfig::default()
                    };
                    let mut br = ComplexityOracle::new(src.clone(), cfg);
                    let a = lin.search(variant, eps, 80).unwrap();
                    let b = br.search(variant, eps, 80).unwrap();
                    assert_eq!(a.n_found, b.n_found, "{probs:?} {variant} {eps}");
                }
            }
        }
    }

    #[test]
    fn markov_point_mass_matches_memoryless() {
        let chain = Source::Markov(MarkovSource::new(
            Pmf::new(&[1.0, 0.0], false).unwrap(),
            vec![vec![1.0, 0.0], vec![1.0, 0.0]],
        )
        .unwrap());
        let r = sample_complexity(&chain, 0.01, Variant::NFl, 12).unwrap();
        assert_eq!(r.n_found, Some(7));
    }

    #[test]
    fn csv_report() {
        let r = sample_complexity(&mem(&[0.9, 0.1]), 0.5, Variant::BigNFl, 5).unwrap();
        let csv = r.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("variant,epsilon,n,criterion"));
        assert!(lines.next().unwrap().starts_with("N_fl,0.5,1,0.6"));
    }

    #[test]
    fn tensorization_by_types() {
        let p = Pmf::new(&[0.5, 0.3, 0.2], false).unwrap();
        let q = Pmf::new(&[0.2, 0.2, 0.6], false).unwrap();
        let d1 = renyi_half_divergence(&p, &q).unwrap();
        for n in 1..=8 {
            let dn = product_half_divergence(&p, &q, n, 1_000_000).unwrap();
            assert!((dn - n as f64 * d1).abs() < 1e-9);
        }
    }
}

//! Concrete codes for length-n blocks: the optimal one-to-one code,
//! fixed-length codebook codes and a prefix-free code, all driven by one
//! deterministic probability ranking of the strings.
//!
//! Strings are ranked by decreasing probability, ties broken
//! lexicographically. Ranks count from 1.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{big_pow, factorials};
use crate::oracles::profile::markov_string_log_probs;
use crate::oracles::types::{composition_count, for_each_composition};
use crate::oracles::{rate_budget, OracleConfig};
use crate::par::{monte_carlo_count, Execution};
use crate::pmf::Pmf;
use crate::sources::Source;

/// Memoryless rankings up to this many strings are stored as tables.
pub const MATERIALIZE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    OneToOneOptimal,
    FixedLength,
    Prefix,
}

impl FromStr for CodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" | "one_to_one_optimal" => Ok(CodeKind::OneToOneOptimal),
            "fixed" | "fixed_length" => Ok(CodeKind::FixedLength),
            "prefix" => Ok(CodeKind::Prefix),
            _ => Err(Error::Parse(format!("unknown code kind {s:?}"))),
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeKind::OneToOneOptimal => "one_to_one_optimal",
            CodeKind::FixedLength => "fixed_length",
            CodeKind::Prefix => "prefix",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CodeParams {
    None,
    /// Codebook size for fixed-length codes.
    Codebook(BigUint),
    /// Rate in bits per symbol for prefix codes.
    Rate(f64),
}

/// Output of [`CodeSpec::encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Encoded {
    /// Codeword as a string of `'0'`/`'1'`, possibly empty.
    Word(String),
    /// The fixed-length code declared an error.
    ErrorFlag,
}

impl Encoded {
    pub fn len(&self) -> Option<usize> {
        match self {
            Encoded::Word(w) => Some(w.len()),
            Encoded::ErrorFlag => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }
}

/// Probability ranking of all `m^n` strings.
#[derive(Debug, Clone)]
enum Ranking {
    /// `order[r]` is the index of the string with rank `r + 1`.
    Table { order: Vec<u64>, rank: Vec<u64> },
    Groups(GroupRanking),
}

/// Ranking of a memoryless source without listing strings. Symbols with
/// equal probability form classes; strings with equal class counts are
/// equiprobable, and class-count vectors with equal probability form a group.
#[derive(Debug, Clone)]
struct GroupRanking {
    m: usize,
    n: usize,
    class_of: Vec<usize>,
    class_lp: Vec<f64>,
    /// `pow[c][e] = (size of class c)^e`.
    pow: Vec<Vec<BigUint>>,
    facts: Vec<BigUint>,
    groups: Vec<Group>,
    /// `before[g]` = number of strings in groups ahead of `g`.
    before: Vec<BigUint>,
}

#[derive(Debug, Clone)]
struct Group {
    lp: f64,
    members: Vec<Vec<u32>>,
}

/// Probability classes of the alphabet, most likely first.
fn symbol_classes(p: &Pmf) -> (Vec<usize>, Vec<f64>) {
    let mut values: Vec<f64> = p.probs().to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    values.dedup();
    let class_of = p
        .probs()
        .iter()
        .map(|x| values.iter().position(|v| v == x).unwrap())
        .collect();
    (class_of, values.iter().map(|v| v.log2()).collect())
}

/// log2-probability of any string with class counts `r`, accumulated in class
/// order so equal counts give bit-identical results.
fn class_log_prob(class_lp: &[f64], r: &[u32]) -> f64 {
    let mut lp = 0.0;
    for (&c, &l) in r.iter().zip(class_lp) {
        if c > 0 {
            if l == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            lp += c as f64 * l;
        }
    }
    lp
}

fn by_probability(a: (f64, u64), b: (f64, u64)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

fn string_index(x: &[usize], m: usize) -> u64 {
    x.iter().fold(0u64, |acc, &s| acc * m as u64 + s as u64)
}

fn index_string(mut idx: u64, m: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = (idx % m as u64) as usize;
        idx /= m as u64;
    }
    out
}

impl GroupRanking {
    fn new(p: &Pmf, n: usize, cap: u64) -> Result<Self> {
        let (class_of, class_lp) = symbol_classes(p);
        let k = class_lp.len();
        let required = composition_count(n, k);
        if required > cap as u128 {
            return Err(Error::EnumerationTooLarge {
                required: required.to_string(),
                cap,
            });
        }
        let mut sizes = vec![0usize; k];
        for &c in &class_of {
            sizes[c] += 1;
        }
        let pow: Vec<Vec<BigUint>> = sizes
            .iter()
            .map(|&s| {
                let mut row = Vec::with_capacity(n + 1);
                let mut acc = BigUint::one();
                for _ in 0..=n {
                    row.push(acc.clone());
                    acc *= BigUint::from(s);
                }
                row
            })
            .collect();
        let mut vectors: Vec<(f64, Vec<u32>)> = Vec::with_capacity(required as usize);
        let mut buf = vec![0u32; k];
        for_each_composition(n as u32, &mut buf, |r| {
            vectors.push((class_log_prob(&class_lp, r), r.to_vec()));
        });
        vectors.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut groups: Vec<Group> = Vec::new();
        for (lp, r) in vectors {
            match groups.last_mut() {
                Some(g) if g.lp.total_cmp(&lp) == Ordering::Equal => g.members.push(r),
                _ => groups.push(Group {
                    lp,
                    members: vec![r],
                }),
            }
        }
        let mut ranking = GroupRanking {
            m: p.m(),
            n,
            class_of,
            class_lp,
            pow,
            facts: factorials(n),
            groups,
            before: Vec::new(),
        };
        let mut acc = BigUint::zero();
        let mut before = Vec::with_capacity(ranking.groups.len() + 1);
        for g in &ranking.groups {
            before.push(acc.clone());
            for r in &g.members {
                acc += ranking.completions(r);
            }
        }
        before.push(acc);
        ranking.before = before;
        Ok(ranking)
    }

    /// Number of strings with class counts exactly `r`.
    fn completions(&self, r: &[u32]) -> BigUint {
        let len: u32 = r.iter().sum();
        let mut v = self.facts[len as usize].clone();
        let mut denom = BigUint::one();
        for (c, &rc) in r.iter().enumerate() {
            denom *= &self.facts[rc as usize];
            v *= &self.pow[c][rc as usize];
        }
        v / denom
    }

    fn class_counts(&self, x: &[usize]) -> Vec<u32> {
        let mut r = vec![0u32; self.pow.len()];
        for &s in x {
            r[self.class_of[s]] += 1;
        }
        r
    }

    /// Strings of group `g` matching `prefix` then `a`, counted over the rest.
    fn count_after(&self, remaining: &[Vec<u32>], a: usize) -> BigUint {
        let c = self.class_of[a];
        let mut total = BigUint::zero();
        for r in remaining {
            if r[c] > 0 {
                let mut next = r.clone();
                next[c] -= 1;
                total += self.completions(&next);
            }
        }
        total
    }

    fn rank(&self, x: &[usize]) -> BigUint {
        let r = self.class_counts(x);
        let lp = class_log_prob(&self.class_lp, &r);
        let g = self
            .groups
            .partition_point(|g| g.lp.total_cmp(&lp) == Ordering::Greater);
        let mut remaining = self.groups[g].members.clone();
        let mut below = BigUint::zero();
        for &s in x {
            for a in 0..s {
                below += self.count_after(&remaining, a);
            }
            let c = self.class_of[s];
            remaining.retain(|r| r[c] > 0);
            for r in &mut remaining {
                r[c] -= 1;
            }
        }
        &self.before[g] + below + 1u8
    }

    fn unrank(&self, rank: &BigUint) -> Vec<usize> {
        // Group containing the rank: last g with before[g] < rank.
        let g = self.before[1..].partition_point(|b| b < rank);
        let mut offset = rank - &self.before[g] - 1u8;
        let mut remaining = self.groups[g].members.clone();
        let mut out = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            for a in 0..self.m {
                let cnt = self.count_after(&remaining, a);
                if offset < cnt {
                    out.push(a);
                    let c = self.class_of[a];
                    remaining.retain(|r| r[c] > 0);
                    for r in &mut remaining {
                        r[c] -= 1;
                    }
                    break;
                }
                offset -= cnt;
            }
        }
        out
    }
}

impl Ranking {
    fn build(source: &Source, n: usize, cfg: &OracleConfig) -> Result<Self> {
        let m = source.m();
        let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let keyed: Vec<(f64, u64)> = match source {
            Source::Memoryless(s) => {
                if total > MATERIALIZE_LIMIT as u128 {
                    return Ok(Ranking::Groups(GroupRanking::new(&s.marginal, n, cfg.type_cap)?));
                }
                let (class_of, class_lp) = symbol_classes(&s.marginal);
                let k = class_lp.len();
                (0..total as u64)
                    .map(|i| {
                        let mut r = vec![0u32; k];
                        for sym in index_string(i, m, n) {
                            r[class_of[sym]] += 1;
                        }
                        (class_log_prob(&class_lp, &r), i)
                    })
                    .collect()
            }
            Source::Markov(s) => {
                if total > cfg.markov_cap as u128 {
                    return Err(Error::EnumerationTooLarge {
                        required: format!("{m}^{n}"),
                        cap: cfg.markov_cap,
                    });
                }
                markov_string_log_probs(s, n)
                    .into_iter()
                    .enumerate()
                    .map(|(i, lp)| (lp, i as u64))
                    .collect()
            }
        };
        let mut keyed = keyed;
        keyed.sort_by(|a, b| by_probability(*a, *b));
        let order: Vec<u64> = keyed.iter().map(|k| k.1).collect();
        let mut rank = vec![0u64; order.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i as usize] = r as u64;
        }
        Ok(Ranking::Table { order, rank })
    }

    fn rank(&self, x: &[usize], m: usize) -> BigUint {
        match self {
            Ranking::Table { rank, .. } => BigUint::from(rank[string_index(x, m) as usize] + 1),
            Ranking::Groups(g) => g.rank(x),
        }
    }

    fn unrank(&self, r: &BigUint, m: usize, n: usize) -> Vec<usize> {
        match self {
            Ranking::Table { order, .. } => {
                let i = r.to_u64().expect("rank fits the table") - 1;
                index_string(order[i as usize], m, n)
            }
            Ranking::Groups(g) => g.unrank(r),
        }
    }
}

/// A code for length-`n` strings of a fixed source.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub kind: CodeKind,
    pub n: usize,
    pub m: usize,
    pub params: CodeParams,
    /// `m^n`.
    total: BigUint,
    ranking: Ranking,
    /// Fixed-length: codebook size. Prefix: strings with short words.
    short_count: BigUint,
    /// Length of the short words.
    short_len: usize,
    /// Fixed-length index bits, or index bits after the escape prefix.
    index_bits: usize,
}

/// `ceil(log2 k)` for `k >= 1`.
fn ceil_log2(k: &BigUint) -> usize {
    if k <= &BigUint::one() {
        0
    } else {
        (k - 1u8).bits() as usize
    }
}

fn to_bits(v: &BigUint, width: usize) -> String {
    let s = if v.is_zero() { String::new() } else { v.to_str_radix(2) };
    format!("{}{}", "0".repeat(width.saturating_sub(s.len())), s)
}

fn from_bits(bits: &str) -> Result<BigUint> {
    if !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::InvalidCodeword(bits.to_string()));
    }
    if bits.is_empty() {
        return Ok(BigUint::zero());
    }
    BigUint::parse_bytes(bits.as_bytes(), 2).ok_or_else(|| Error::InvalidCodeword(bits.to_string()))
}

/// Build a code of the given kind. `params` must be `Codebook` for fixed-length
/// codes and `Rate` for prefix codes.
pub fn build_code(source: &Source, n: usize, kind: CodeKind, params: CodeParams) -> Result<CodeSpec> {
    build_code_with(source, n, kind, params, &OracleConfig::from_env())
}

pub fn build_code_with(
    source: &Source,
    n: usize,
    kind: CodeKind,
    params: CodeParams,
    cfg: &OracleConfig,
) -> Result<CodeSpec> {
    if n == 0 {
        return Err(Error::BadParams("blocklength must be at least 1".into()));
    }
    let m = source.m();
    let total = big_pow(m, n);
    let (short_count, short_len, index_bits) = match (kind, &params) {
        (CodeKind::OneToOneOptimal, CodeParams::None) => (BigUint::zero(), 0, 0),
        (CodeKind::FixedLength, CodeParams::Codebook(k)) => {
            if k.is_zero() || *k > total {
                return Err(Error::BadParams(format!("codebook size {k} outside [1, {total}]")));
            }
            (k.clone(), ceil_log2(k), ceil_log2(k))
        }
        (CodeKind::Prefix, CodeParams::Rate(rate)) => {
            let l = rate_budget(n, *rate).map_err(|e| Error::BadParams(e.to_string()))? as usize;
            let pow = BigUint::one() << l;
            if total <= pow {
                // Every string fits in a plain index of at most L bits.
                let b = ceil_log2(&total);
                (total.clone(), b, b)
            } else {
                let short = pow - 1u8;
                let rest = &total - &short;
                (short, l, ceil_log2(&rest))
            }
        }
        _ => {
            return Err(Error::BadParams(format!(
                "parameters {params:?} do not fit a {kind} code"
            )))
        }
    };
    let ranking = Ranking::build(source, n, cfg)?;
    Ok(CodeSpec {
        kind,
        n,
        m,
        params,
        total,
        ranking,
        short_count,
        short_len,
        index_bits,
    })
}

impl CodeSpec {
    fn check_string(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if let Some(&symbol) = x.iter().find(|&&s| s >= self.m) {
            return Err(Error::SymbolOutOfRange { symbol, m: self.m });
        }
        Ok(())
    }

    /// `m^n`.
    pub fn total(&self) -> &BigUint {
        &self.total
    }

    /// Fixed-length: codebook size. Prefix: number of strings with short words.
    pub fn short_count(&self) -> &BigUint {
        &self.short_count
    }

    pub fn short_len(&self) -> usize {
        self.short_len
    }

    /// Fixed-length index bits, or index bits after the prefix escape.
    pub fn index_bits(&self) -> usize {
        self.index_bits
    }

    /// Probability rank of `x`, counting from 1.
    pub fn rank(&self, x: &[usize]) -> Result<BigUint> {
        self.check_string(x)?;
        Ok(self.ranking.rank(x, self.m))
    }

    /// The string with rank `r`.
    pub fn unrank(&self, r: &BigUint) -> Result<Vec<usize>> {
        if r.is_zero() || *r > self.total {
            return Err(Error::KOutOfRange {
                k: r.to_string(),
                total: self.total.to_string(),
            });
        }
        Ok(self.ranking.unrank(r, self.m, self.n))
    }

    /// Whether the short words all fit: the prefix code's plain-index mode.
    fn prefix_plain(&self) -> bool {
        self.kind == CodeKind::Prefix && self.short_count == self.total
    }

    /// Codeword length of the string with rank `r`; `None` for a
    /// fixed-length error.
    pub fn length_of_rank(&self, r: &BigUint) -> Option<usize> {
        match self.kind {
            CodeKind::OneToOneOptimal => Some(r.bits() as usize - 1),
            CodeKind::FixedLength => (r <= &self.short_count).then_some(self.index_bits),
            CodeKind::Prefix => Some(if r <= &self.short_count {
                self.short_len
            } else {
                self.short_len + self.index_bits
            }),
        }
    }

    fn word_of_rank(&self, r: &BigUint) -> Encoded {
        match self.kind {
            // Binary expansion of r without its leading 1.
            CodeKind::OneToOneOptimal => Encoded::Word(r.to_str_radix(2)[1..].to_string()),
            CodeKind::FixedLength => {
                if r <= &self.short_count {
                    Encoded::Word(to_bits(&(r - 1u8), self.index_bits))
                } else {
                    Encoded::ErrorFlag
                }
            }
            CodeKind::Prefix => {
                if r <= &self.short_count {
                    Encoded::Word(to_bits(&(r - 1u8), self.short_len))
                } else {
                    let idx = r - &self.short_count - 1u8;
                    Encoded::Word(format!("{}{}", "1".repeat(self.short_len), to_bits(&idx, self.index_bits)))
                }
            }
        }
    }

    pub fn encode(&self, x: &[usize]) -> Result<Encoded> {
        let r = self.rank(x)?;
        Ok(self.word_of_rank(&r))
    }

    /// Inverse of [`encode`](Self::encode) on a single codeword.
    pub fn decode(&self, bits: &str) -> Result<Vec<usize>> {
        let bad = || Error::InvalidCodeword(bits.to_string());
        let v = from_bits(bits)?;
        let rank = match self.kind {
            CodeKind::OneToOneOptimal => (BigUint::one() << bits.len()) + v,
            CodeKind::FixedLength => {
                if bits.len() != self.index_bits || v >= self.short_count {
                    return Err(bad());
                }
                v + 1u8
            }
            CodeKind::Prefix => {
                let (r, used) = self.prefix_parse(bits).ok_or_else(bad)?;
                if used != bits.len() {
                    return Err(bad());
                }
                r
            }
        };
        if rank > self.total {
            return Err(bad());
        }
        self.unrank(&rank)
    }

    /// Read one prefix codeword from the front of `bits`: `(rank, bits used)`.
    fn prefix_parse(&self, bits: &str) -> Option<(BigUint, usize)> {
        let l = self.short_len;
        if bits.len() < l {
            return None;
        }
        let head = from_bits(&bits[..l]).ok()?;
        if self.prefix_plain() {
            let r = head + 1u8;
            return (r <= self.total).then_some((r, l));
        }
        if bits[..l].chars().any(|c| c == '0') {
            return Some((head + 1u8, l));
        }
        let end = l + self.index_bits;
        if bits.len() < end {
            return None;
        }
        let idx = from_bits(&bits[l..end]).ok()?;
        let r = &self.short_count + idx + 1u8;
        (r <= self.total).then_some((r, end))
    }

    /// Decode a concatenation of prefix codewords.
    pub fn decode_stream(&self, bits: &str) -> Result<Vec<Vec<usize>>> {
        if self.kind != CodeKind::Prefix {
            return Err(Error::BadParams("only prefix codes are self-delimiting".into()));
        }
        from_bits(bits)?;
        let mut out = Vec::new();
        let mut pos = 0;
        // Every prefix codeword has at least one bit because m^n >= 2.
        while pos < bits.len() {
            let (r, used) = self
                .prefix_parse(&bits[pos..])
                .ok_or_else(|| Error::InvalidCodeword(bits[pos..].to_string()))?;
            out.push(self.unrank(&r)?);
            pos += used;
        }
        Ok(out)
    }

    /// Kraft sum `sum_x 2^(-len(x))` over all strings with a codeword.
    pub fn kraft_sum(&self) -> f64 {
        let pow2 = |e: usize| 2f64.powi(-(e as i32));
        let total = self.total.to_f64().unwrap_or(f64::INFINITY);
        match self.kind {
            CodeKind::OneToOneOptimal => {
                // 2^j words of length j for j < floor(log2 N), then the rest.
                let top = self.total.bits() as usize - 1;
                let full = top as f64;
                let rest = &self.total - ((BigUint::one() << top) - 1u8);
                full + rest.to_f64().unwrap_or(f64::INFINITY) * pow2(top)
            }
            CodeKind::FixedLength => self.short_count.to_f64().unwrap_or(f64::INFINITY) * pow2(self.index_bits),
            CodeKind::Prefix => {
                if self.prefix_plain() {
                    total * pow2(self.short_len)
                } else {
                    let short = self.short_count.to_f64().unwrap_or(f64::INFINITY);
                    short * pow2(self.short_len)
                        + (total - short) * pow2(self.short_len + self.index_bits)
                }
            }
        }
    }

    /// Every string with its rank and codeword, most likely first.
    pub fn table(&self) -> Result<Vec<(Vec<usize>, BigUint, Encoded)>> {
        let limit = BigUint::from(1u32 << 16);
        if self.total > limit {
            return Err(Error::EnumerationTooLarge {
                required: self.total.to_string(),
                cap: 1 << 16,
            });
        }
        let n = self.total.to_u64().unwrap();
        (1..=n)
            .map(|r| {
                let r = BigUint::from(r);
                let x = self.unrank(&r)?;
                let w = self.word_of_rank(&r);
                Ok((x, r, w))
            })
            .collect()
    }
}

/// Fraction of `trials` sampled strings whose codeword is longer than `nR`
/// bits (fixed-length errors count as excess).
pub fn empirical_excess_rate(
    source: &Source,
    code: &CodeSpec,
    rate: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    empirical_excess_rate_with(source, code, rate, trials, seed, Execution::default())
}

pub fn empirical_excess_rate_with(
    source: &Source,
    code: &CodeSpec,
    rate: f64,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::BadParams("trials must be at least 1".into()));
    }
    if source.m() != code.m {
        return Err(Error::DimensionMismatch {
            left: source.m(),
            right: code.m,
        });
    }
    let budget = code.n as f64 * rate;
    let hits = monte_carlo_count(exec, seed, trials, |rng| {
        let x = source.sample_with(code.n, rng);
        let r = code.ranking.rank(&x, code.m);
        match code.length_of_rank(&r) {
            Some(len) => len as f64 > budget + 1e-9,
            None => true,
        }
    });
    Ok(hits as f64 / trials as f64)
}

//! Probability profiles of length-n strings: the list of distinct string
//! probabilities with their multiplicities, sorted from most to least likely.
//!
//! Multiplicities are stored as fractions of `m^n` and masses as plain
//! probabilities, so every quantity stays within `[0, 1]` regardless of `n`.

use crate::error::{Error, Result};
use crate::numeric::{log2_factorials, pairwise_sum, KahanSum};
use crate::oracles::types::{composition_count, for_each_composition};
use crate::par::{map_indexed, Execution};
use crate::pmf::Pmf;
use crate::sources::MarkovSource;

/// Above this `log2 m^n`, fractions of the string space underflow.
pub const MAX_LOG2_SPACE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    /// log2 of the probability of each string in the level.
    pub lp: f64,
    /// Number of strings divided by `m^n`.
    pub frac: f64,
    /// Total probability of the level.
    pub mass: f64,
    /// Position in enumeration order; breaks ties deterministically.
    pub idx: u64,
}

fn check_space(m: usize, n: usize) -> Result<f64> {
    let log2_space = n as f64 * (m as f64).log2();
    if log2_space > MAX_LOG2_SPACE {
        return Err(Error::BadParams(format!(
            "string space 2^{log2_space:.1} too large for an exact profile"
        )));
    }
    Ok(log2_space)
}

fn check_type_cap(m: usize, n: usize, cap: u64) -> Result<()> {
    let required = composition_count(n, m);
    if required > cap as u128 {
        return Err(Error::EnumerationTooLarge {
            required: required.to_string(),
            cap,
        });
    }
    Ok(())
}

/// Shared per-(P, n) constants for type enumeration.
struct TypeWalk {
    m: usize,
    n: usize,
    log2_p: Vec<f64>,
    lf: Vec<f64>,
    log2_space: f64,
}

impl TypeWalk {
    fn new(p: &Pmf, n: usize) -> Result<Self> {
        Ok(TypeWalk {
            m: p.m(),
            n,
            log2_p: p.probs().iter().map(|x| x.log2()).collect(),
            lf: log2_factorials(n),
            log2_space: check_space(p.m(), n)?,
        })
    }

    /// Visit every type whose first count is `c0` as `(lp, frac, mass)`.
    fn chunk<F: FnMut(f64, f64, f64)>(&self, c0: usize, mut f: F) {
        let mut rest = vec![0u32; self.m - 1];
        let head_lp = if c0 == 0 { 0.0 } else { c0 as f64 * self.log2_p[0] };
        let head_lc = self.lf[self.n] - self.lf[c0];
        for_each_composition((self.n - c0) as u32, &mut rest, |c| {
            let mut lp = head_lp;
            let mut lc = head_lc;
            for (k, &ck) in c.iter().enumerate() {
                if ck > 0 {
                    lp += ck as f64 * self.log2_p[k + 1];
                    lc -= self.lf[ck as usize];
                }
            }
            let frac = (lc - self.log2_space).exp2();
            let mass = if lp == f64::NEG_INFINITY || lp.is_nan() {
                0.0
            } else {
                (lc + lp).exp2()
            };
            f(if mass > 0.0 { lp } else { f64::NEG_INFINITY }, frac, mass);
        });
    }

    fn chunk_len(&self, c0: usize) -> u64 {
        composition_count(self.n - c0, self.m - 1) as u64
    }
}

/// `(1 - TV, TV)` between `P^n` and the uniform law, by streaming over types.
pub fn memoryless_overlap(p: &Pmf, n: usize, cap: u64, exec: Execution) -> Result<(f64, f64)> {
    check_type_cap(p.m(), n, cap)?;
    let walk = TypeWalk::new(p, n)?;
    let parts = map_indexed(exec, n + 1, |c0| {
        let mut s = KahanSum::new();
        let mut d = KahanSum::new();
        walk.chunk(c0, |_, frac, mass| {
            s.add(mass.min(frac));
            d.add((mass - frac).abs());
        });
        (s.value(), d.value())
    });
    let s: Vec<f64> = parts.iter().map(|x| x.0).collect();
    let d: Vec<f64> = parts.iter().map(|x| x.1).collect();
    Ok((pairwise_sum(&s), 0.5 * pairwise_sum(&d)))
}

/// Sorted probability profile with prefix sums.
#[derive(Debug, Clone)]
pub struct Profile {
    pub m: usize,
    pub n: usize,
    /// `log2 m^n`.
    pub log2_space: f64,
    pub levels: Vec<Level>,
    /// `cum_frac[j]` is the fraction of strings in levels before `j`.
    cum_frac: Vec<f64>,
    prefix_mass: Vec<f64>,
    suffix_mass: Vec<f64>,
}

fn sort_levels(levels: &mut [Level], exec: Execution) {
    let cmp = |a: &Level, b: &Level| b.lp.total_cmp(&a.lp).then(a.idx.cmp(&b.idx));
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::slice::ParallelSliceMut;
            levels.par_sort_unstable_by(cmp);
        }
        _ => levels.sort_unstable_by(cmp),
    }
}

impl Profile {
    /// Profile of `P^n` built from its type classes.
    pub fn memoryless(p: &Pmf, n: usize, cap: u64, exec: Execution) -> Result<Self> {
        check_type_cap(p.m(), n, cap)?;
        let walk = TypeWalk::new(p, n)?;
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0u64;
        for c0 in 0..=n {
            offsets.push(acc);
            acc += walk.chunk_len(c0);
        }
        let chunks = map_indexed(exec, n + 1, |c0| {
            let mut out = Vec::with_capacity(walk.chunk_len(c0) as usize);
            let mut zero_frac = KahanSum::new();
            let mut idx = offsets[c0];
            walk.chunk(c0, |lp, frac, mass| {
                if mass > 0.0 {
                    out.push(Level { lp, frac, mass, idx });
                } else {
                    zero_frac.add(frac);
                }
                idx += 1;
            });
            (out, zero_frac.value())
        });
        let mut levels = Vec::with_capacity(acc as usize);
        let mut zero = Vec::with_capacity(n + 1);
        for (mut chunk, z) in chunks {
            levels.append(&mut chunk);
            zero.push(z);
        }
        Ok(Self::finish(p.m(), n, walk.log2_space, levels, pairwise_sum(&zero), exec))
    }

    /// Profile of a Markov chain by listing all `m^n` strings.
    pub fn markov(src: &MarkovSource, n: usize, cap: u64, exec: Execution) -> Result<Self> {
        let m = src.m();
        let log2_space = check_space(m, n)?;
        let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if total > cap as u128 || n == 0 {
            if n == 0 {
                return Err(Error::BadRange("blocklength must be at least 1".into()));
            }
            return Err(Error::EnumerationTooLarge {
                required: format!("{m}^{n}"),
                cap,
            });
        }
        let lps = markov_string_log_probs(src, n);
        let frac = (-log2_space).exp2();
        let mut levels = Vec::with_capacity(lps.len());
        let mut zeros = 0u64;
        for (idx, &lp) in lps.iter().enumerate() {
            let mass = lp.exp2();
            if mass > 0.0 {
                levels.push(Level {
                    lp,
                    frac,
                    mass,
                    idx: idx as u64,
                });
            } else {
                zeros += 1;
            }
        }
        Ok(Self::finish(m, n, log2_space, levels, zeros as f64 * frac, exec))
    }

    fn finish(
        m: usize,
        n: usize,
        log2_space: f64,
        mut levels: Vec<Level>,
        zero_frac: f64,
        exec: Execution,
    ) -> Self {
        sort_levels(&mut levels, exec);
        if zero_frac > 0.0 {
            levels.push(Level {
                lp: f64::NEG_INFINITY,
                frac: zero_frac,
                mass: 0.0,
                idx: u64::MAX,
            });
        }
        let len = levels.len();
        let mut cum_frac = Vec::with_capacity(len + 1);
        let mut prefix_mass = Vec::with_capacity(len + 1);
        let (mut f, mut pm) = (KahanSum::new(), KahanSum::new());
        cum_frac.push(0.0);
        prefix_mass.push(0.0);
        for l in &levels {
            f.add(l.frac);
            pm.add(l.mass);
            cum_frac.push(f.value());
            prefix_mass.push(pm.value());
        }
        let mut suffix_mass = vec![0.0; len + 1];
        let mut sm = KahanSum::new();
        for j in (0..len).rev() {
            sm.add(levels[j].mass);
            suffix_mass[j] = sm.value();
        }
        Profile {
            m,
            n,
            log2_space,
            levels,
            cum_frac,
            prefix_mass,
            suffix_mass,
        }
    }

    /// Mass per unit of string fraction in level `j`, i.e. `m^n` times the
    /// probability of each string.
    fn density(&self, j: usize) -> f64 {
        let l = &self.levels[j];
        if l.frac > 0.0 {
            l.mass / l.frac
        } else {
            0.0
        }
    }

    /// Level containing position `x` (a fraction of the string space).
    fn locate(&self, x: f64) -> usize {
        // First j with cum_frac[j + 1] > x.
        self.cum_frac[1..].partition_point(|&c| c <= x)
    }

    /// Probability of all but the `x m^n` most likely strings.
    pub fn tail(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.suffix_mass[0];
        }
        let j = self.locate(x);
        if j >= self.levels.len() {
            return 0.0;
        }
        self.suffix_mass[j + 1] + (self.cum_frac[j + 1] - x) * self.density(j)
    }

    /// Probability of the `x m^n` most likely strings.
    pub fn top(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let j = self.locate(x);
        if j >= self.levels.len() {
            return self.prefix_mass[self.levels.len()];
        }
        self.prefix_mass[j] + (x - self.cum_frac[j]) * self.density(j)
    }

    /// `1 - TV` to the uniform law.
    pub fn overlap(&self) -> f64 {
        pairwise_sum(
            &self
                .levels
                .iter()
                .map(|l| l.mass.min(l.frac))
                .collect::<Vec<_>>(),
        )
    }

    pub fn tv(&self) -> f64 {
        0.5 * pairwise_sum(
            &self
                .levels
                .iter()
                .map(|l| (l.mass - l.frac).abs())
                .collect::<Vec<_>>(),
        )
    }

    /// Fraction of strings at least as likely as a uniform string.
    pub fn likelihood_ratio_frac(&self) -> f64 {
        let cut = -self.log2_space - 1e-9;
        let j = self.levels.partition_point(|l| l.lp >= cut);
        self.cum_frac[j]
    }

    /// `(k/m^n, value)` minimising `max{tail(k), k/m^n}` over integer `k`.
    pub fn best_max_codebook(&self) -> (f64, f64) {
        let len = self.levels.len();
        // First level at whose end the tail has dropped below the size.
        let (mut lo, mut hi) = (0, len);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.suffix_mass[mid + 1] > self.cum_frac[mid + 1] {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let j = lo.min(len.saturating_sub(1));
        let r = self.density(j);
        let x_star = (self.suffix_mass[j] + self.cum_frac[j] * r) / (1.0 + r);
        let mut candidates = vec![0.0, 1.0];
        if self.log2_space < 1000.0 {
            let space = self.log2_space.exp2();
            let k = (x_star * space).floor();
            candidates.push(k / space);
            candidates.push((k + 1.0) / space);
        } else {
            candidates.push(x_star);
        }
        let mut best = (1.0, 1.0);
        for x in candidates {
            let x = x.clamp(0.0, 1.0);
            let v = self.tail(x).max(x);
            if v < best.1 {
                best = (x, v);
            }
        }
        best
    }

    /// Fraction `(2^(L+1) - 1) / m^n`, the size of the optimal one-to-one
    /// code's set of codewords no longer than `L` bits.
    pub fn one_to_one_frac(&self, l: u32) -> f64 {
        let space = self.log2_space;
        ((l as f64 + 1.0 - space).exp2() - (-space).exp2()).min(1.0)
    }

    /// Fraction of strings a prefix code can give codewords of at most `L`
    /// bits while staying lossless: `2^L - 1`, or everything when `2^L >= m^n`.
    pub fn prefix_frac(&self, l: u32) -> f64 {
        let space = self.log2_space;
        if l as f64 >= space {
            1.0
        } else {
            ((l as f64 - space).exp2() - (-space).exp2()).max(0.0)
        }
    }

    /// Largest codeword budget worth considering.
    pub fn max_budget(&self) -> u32 {
        self.log2_space.ceil() as u32 + 1
    }
}

/// log2-probabilities of every string, indexed in base `m` with the first
/// symbol most significant.
pub fn markov_string_log_probs(src: &MarkovSource, n: usize) -> Vec<f64> {
    let m = src.m();
    let log_t: Vec<Vec<f64>> = src
        .trans()
        .iter()
        .map(|r| r.iter().map(|x| x.log2()).collect())
        .collect();
    let mut cur: Vec<f64> = src.mu().probs().iter().map(|x| x.log2()).collect();
    for _ in 1..n {
        let mut next = Vec::with_capacity(cur.len() * m);
        for (s, &lp) in cur.iter().enumerate() {
            let last = s % m;
            next.extend(log_t[last].iter().map(|t| lp + t));
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pmf(v: &[f64]) -> Pmf {
        Pmf::new(v, false).unwrap()
    }

    #[test]
    fn tv_small_cases() {
        let (s, tv) = memoryless_overlap(&pmf(&[0.75, 0.25]), 2, 1000, Execution::Sequential).unwrap();
        assert!((tv - 0.3125).abs() < 1e-15);
        assert!((s - 0.6875).abs() < 1e-15);
        let (_, tv) = memoryless_overlap(&pmf(&[0.9, 0.1]), 2, 1000, Execution::Sequential).unwrap();
        assert!((tv - 0.56).abs() < 1e-15);
    }

    #[test]
    fn profile_tail_and_top() {
        let p = Profile::memoryless(&pmf(&[0.75, 0.25]), 2, 1000, Execution::Sequential).unwrap();
        assert!((p.top(0.25) - 0.5625).abs() < 1e-15);
        assert!((p.tail(0.75) - 0.0625).abs() < 1e-15);
        assert!((p.top(0.5) - 0.75).abs() < 1e-15);
        assert!((p.tail(1.0)).abs() < 1e-15);
        assert!((p.tv() - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn zero_mass_types_are_pooled() {
        let p = Profile::memoryless(&pmf(&[1.0, 0.0]), 10, 1000, Execution::Sequential).unwrap();
        assert_eq!(p.levels.len(), 2);
        assert_eq!(p.top(2f64.powi(-10)), 1.0);
        let (x, v) = p.best_max_codebook();
        assert_eq!(x, 2f64.powi(-10));
        assert_eq!(v, 2f64.powi(-10));
    }

    #[test]
    fn best_max_codebook_scan() {
        let p = Profile::memoryless(&pmf(&[0.9, 0.1]), 1, 1000, Execution::Sequential).unwrap();
        let (x, v) = p.best_max_codebook();
        assert_eq!((x, v), (0.5, 0.5));
    }

    #[test]
    fn markov_enumeration_order() {
        let src = MarkovSource::new(pmf(&[1.0, 0.0]), vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let lps = markov_string_log_probs(&src, 3);
        assert_eq!(lps[0b010], 0.0);
        assert!(lps.iter().enumerate().all(|(i, &l)| i == 0b010 || l == f64::NEG_INFINITY));
        let prof = Profile::markov(&src, 3, 1 << 10, Execution::Sequential).unwrap();
        assert_eq!(prof.levels.len(), 2);
        assert_eq!(prof.tv(), 1.0 - 0.125);
    }
}

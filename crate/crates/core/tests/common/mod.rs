//! Naive reference implementations that enumerate every string.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sclab_core::{MarkovSource, MemorylessSource, Pmf, Source};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random pmf on `m` symbols with entries bounded away from zero.
pub fn random_pmf(r: &mut ChaCha8Rng, m: usize) -> Pmf {
    let raw: Vec<f64> = (0..m).map(|_| r.random_range(0.02..1.0)).collect();
    Pmf::new(&raw, true).unwrap()
}

/// Random pmf that may contain zeros.
pub fn random_sparse_pmf(r: &mut ChaCha8Rng, m: usize) -> Pmf {
    loop {
        let raw: Vec<f64> = (0..m)
            .map(|_| if r.random_bool(0.2) { 0.0 } else { r.random_range(0.0..1.0) })
            .collect();
        if raw.iter().sum::<f64>() > 0.0 {
            return Pmf::new(&raw, true).unwrap();
        }
    }
}

pub fn random_chain(r: &mut ChaCha8Rng, m: usize) -> MarkovSource {
    let mu = random_pmf(r, m);
    let trans = (0..m).map(|_| random_pmf(r, m).probs().to_vec()).collect();
    MarkovSource::new(mu, trans).unwrap()
}

pub fn mem(p: &Pmf) -> Source {
    Source::Memoryless(MemorylessSource::new(p.clone()))
}

/// Every length-`n` string over `m` symbols, first symbol most significant.
pub fn all_strings(m: usize, n: usize) -> Vec<Vec<usize>> {
    let total = m.pow(n as u32);
    (0..total)
        .map(|mut i| {
            let mut x = vec![0; n];
            for slot in x.iter_mut().rev() {
                *slot = i % m;
                i /= m;
            }
            x
        })
        .collect()
}

/// Probability of each string, multiplied out directly.
pub fn string_probs(source: &Source, n: usize) -> Vec<f64> {
    let m = source.m();
    all_strings(m, n)
        .iter()
        .map(|x| match source {
            Source::Memoryless(s) => x.iter().map(|&a| s.marginal.get(a)).product(),
            Source::Markov(s) => {
                let mut p = s.mu().get(x[0]);
                for w in x.windows(2) {
                    p *= s.trans()[w[0]][w[1]];
                }
                p
            }
        })
        .collect()
}

pub fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn tv_to_uniform(probs: &[f64]) -> f64 {
    let u = 1.0 / probs.len() as f64;
    probs.iter().map(|p| (p - u).abs()).sum::<f64>() / 2.0
}

/// Mass of the `k` most likely strings.
pub fn top_k(sorted: &[f64], k: usize) -> f64 {
    sorted[..k.min(sorted.len())].iter().sum()
}

/// Mass outside the `k` most likely strings.
pub fn tail_k(sorted: &[f64], k: usize) -> f64 {
    sorted[k.min(sorted.len())..].iter().sum()
}

/// Excess-rate probabilities of the best one-to-one and best prefix code at
/// rate `R`, with `L = floor(nR)` and string ranks counted from 1.
pub fn excess_rates(sorted: &[f64], n: usize, rate: f64) -> (f64, f64) {
    let l = (n as f64 * rate + 1e-9).floor() as u32;
    let big_n = sorted.len();
    let star = tail_k(sorted, ((1u128 << (l + 1)) - 1).min(big_n as u128) as usize);
    let pre = if (1u128 << l) >= big_n as u128 {
        0.0
    } else {
        tail_k(sorted, (1usize << l) - 1)
    };
    (star, pre)
}

/// The six criteria at one blocklength, from sorted string probabilities:
/// `(N_fl, n_fl, n_star, N_star, n_p, N_p)`.
pub fn criteria(sorted: &[f64]) -> [f64; 6] {
    let big_n = sorted.len();
    let nf = big_n as f64;
    // suffix[k] = mass outside the top k strings.
    let mut suffix = vec![0.0; big_n + 1];
    for k in (0..big_n).rev() {
        suffix[k] = suffix[k + 1] + sorted[k];
    }
    let n_fl_sum = 1.0 - tv_to_uniform(sorted);
    let n_fl = (0..=big_n)
        .map(|k| suffix[k].max(k as f64 / nf))
        .fold(f64::INFINITY, f64::min);
    let mut c = [n_fl_sum, n_fl, f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY];
    let mut l = 0u32;
    loop {
        let size = (1u128 << l) as f64 / nf;
        let t_star = suffix[((1u128 << (l + 1)) - 1).min(big_n as u128) as usize];
        let k_p = if (1u128 << l) >= big_n as u128 { big_n } else { (1usize << l) - 1 };
        let t_p = suffix[k_p];
        c[2] = c[2].min(t_star.max(size));
        c[3] = c[3].min(t_star + size);
        c[4] = c[4].min(t_p.max(size));
        c[5] = c[5].min(t_p + size);
        if (1u128 << l) >= big_n as u128 {
            break;
        }
        l += 1;
    }
    c
}

/// First `n` in `1..=n_max` whose criterion (index into [`criteria`]) is at
/// most `epsilon`.
pub fn naive_complexity(source: &Source, idx: usize, epsilon: f64, n_max: usize) -> Option<usize> {
    (1..=n_max).find(|&n| criteria(&sorted_desc(string_probs(source, n)))[idx] <= epsilon)
}

/// Exact mean and variance of the collision statistic over all `m^n` strings.
pub fn collision_moments_brute(p: &Pmf, n: usize) -> (f64, f64) {
    let m = p.m();
    let src = mem(p);
    let probs = string_probs(&src, n);
    let (mut e1, mut e2) = (0.0, 0.0);
    for (x, w) in all_strings(m, n).iter().zip(&probs) {
        let z = sclab_core::universal::collision_statistic(x, m).unwrap().z_value;
        e1 += w * z;
        e2 += w * z * z;
    }
    (e1, e2 - e1 * e1)
}

/// `D_1/2` between two string laws given as probability vectors.
pub fn half_divergence(p: &[f64], q: &[f64]) -> f64 {
    -2.0 * p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum::<f64>().log2()
}

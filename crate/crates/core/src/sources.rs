//! Memoryless and finite-state Markov sources, their n-letter order-1/2
//! divergences and divergence rates.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{is_irreducible, jacobi_eigen, perron_pair, SquareMatrix};
use crate::numeric::ksum;
use crate::pmf::Pmf;

const ROW_TOL: f64 = 1e-9;
const SYM_TOL: f64 = 1e-12;
const PERRON_TOL: f64 = 1e-12;
const PERRON_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemorylessSource {
    pub marginal: Pmf,
}

impl MemorylessSource {
    pub fn new(marginal: Pmf) -> Self {
        MemorylessSource { marginal }
    }

    pub fn m(&self) -> usize {
        self.marginal.m()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovSource {
    mu: Pmf,
    #[serde(rename = "P")]
    trans: Vec<Vec<f64>>,
}

impl MarkovSource {
    pub fn new(mu: Pmf, trans: Vec<Vec<f64>>) -> Result<Self> {
        let m = mu.m();
        if trans.len() != m {
            return Err(Error::DimensionMismatch {
                left: m,
                right: trans.len(),
            });
        }
        for (row, r) in trans.iter().enumerate() {
            if r.len() != m {
                return Err(Error::DimensionMismatch {
                    left: m,
                    right: r.len(),
                });
            }
            if let Some(&bad) = r.iter().find(|&&x| x.is_nan() || x < 0.0) {
                return Err(Error::NotStochastic {
                    row,
                    reason: format!("negative entry {bad}"),
                });
            }
            let s = ksum(r.iter().copied());
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::NotStochastic {
                    row,
                    reason: format!("row sums to {s}"),
                });
            }
        }
        Ok(MarkovSource { mu, trans })
    }

    /// The i.i.d. uniform source written as a chain.
    pub fn uniform(m: usize) -> Result<Self> {
        let u = Pmf::uniform(m)?;
        let rows = vec![u.probs().to_vec(); m];
        Ok(MarkovSource { mu: u, trans: rows })
    }

    /// A memoryless source written as a chain whose rows all equal the marginal.
    pub fn from_memoryless(src: &MemorylessSource) -> Self {
        let p = src.marginal.clone();
        let rows = vec![p.probs().to_vec(); p.m()];
        MarkovSource { mu: p, trans: rows }
    }

    pub fn m(&self) -> usize {
        self.mu.m()
    }

    pub fn mu(&self) -> &Pmf {
        &self.mu
    }

    pub fn trans(&self) -> &[Vec<f64>] {
        &self.trans
    }

    pub fn is_symmetric(&self) -> bool {
        let m = self.m();
        (0..m).all(|i| (0..i).all(|j| (self.trans[i][j] - self.trans[j][i]).abs() <= SYM_TOL))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Source {
    Memoryless(MemorylessSource),
    Markov(MarkovSource),
}

impl Source {
    pub fn m(&self) -> usize {
        match self {
            Source::Memoryless(s) => s.m(),
            Source::Markov(s) => s.m(),
        }
    }

    /// Exact `log2 P(x^n)`; `-inf` for strings of probability zero.
    pub fn string_log_prob(&self, x: &[usize]) -> Result<f64> {
        if x.is_empty() {
            return Err(Error::EmptyString);
        }
        let m = self.m();
        if let Some(&symbol) = x.iter().find(|&&s| s >= m) {
            return Err(Error::SymbolOutOfRange { symbol, m });
        }
        let terms: Vec<f64> = match self {
            Source::Memoryless(s) => x.iter().map(|&a| s.marginal.get(a).log2()).collect(),
            Source::Markov(s) => std::iter::once(s.mu.get(x[0]).log2())
                .chain(x.windows(2).map(|w| s.trans[w[0]][w[1]].log2()))
                .collect(),
        };
        if terms.contains(&f64::NEG_INFINITY) {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(ksum(terms))
    }

    /// A length-`n` sample path, fully determined by `seed`.
    pub fn sample_path(&self, n: usize, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        match self {
            Source::Memoryless(s) => {
                let dist = WeightedIndex::new(s.marginal.probs()).expect("valid pmf");
                (0..n).map(|_| dist.sample(rng)).collect()
            }
            Source::Markov(s) => {
                if n == 0 {
                    return Vec::new();
                }
                let init = WeightedIndex::new(s.mu.probs()).expect("valid pmf");
                let rows: Vec<WeightedIndex<f64>> = s
                    .trans
                    .iter()
                    .map(|r| WeightedIndex::new(r).expect("stochastic row"))
                    .collect();
                let mut out = Vec::with_capacity(n);
                let mut state = init.sample(rng);
                out.push(state);
                for _ in 1..n {
                    state = rows[state].sample(rng);
                    out.push(state);
                }
                out
            }
        }
    }
}

pub fn string_log_prob(source: &Source, x: &[usize]) -> Result<f64> {
    source.string_log_prob(x)
}

pub fn sample_path(source: &Source, n: usize, seed: u64) -> Vec<usize> {
    source.sample_path(n, seed)
}

fn check_pair(x: &MarkovSource, y: &MarkovSource) -> Result<()> {
    if x.m() != y.m() {
        return Err(Error::DimensionMismatch {
            left: x.m(),
            right: y.m(),
        });
    }
    Ok(())
}

/// Entrywise `sqrt(P_ij Q_ij)`.
fn hadamard_root(x: &MarkovSource, y: &MarkovSource) -> SquareMatrix {
    let m = x.m();
    let mut out = SquareMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, (x.trans[i][j] * y.trans[i][j]).sqrt());
        }
    }
    out
}

/// Order-1/2 divergence in bits between the length-`n` marginals of two chains,
/// evaluated as `-2 log2(w^T M^(n-1) 1)` with `w = sqrt(mu nu)` and
/// `M = sqrt(P Q)` entrywise.
pub fn markov_pair_divergence(x: &MarkovSource, y: &MarkovSource, n: usize) -> Result<f64> {
    check_pair(x, y)?;
    if n == 0 {
        return Err(Error::BadRange("blocklength must be at least 1".into()));
    }
    let m = x.m();
    let mat = hadamard_root(x, y);
    let w: Vec<f64> = (0..m).map(|i| (x.mu.get(i) * y.mu.get(i)).sqrt()).collect();
    let mut u = vec![1.0; m];
    let mut log_scale = 0.0;
    for _ in 1..n {
        u = mat.mul_vec(&u);
        let top = u.iter().copied().fold(0.0, f64::max);
        if top == 0.0 {
            return Ok(f64::INFINITY);
        }
        for e in &mut u {
            *e /= top;
        }
        log_scale += top.log2();
    }
    let s = ksum(w.iter().zip(&u).map(|(a, b)| a * b));
    if s <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-2.0 * (s.log2() + log_scale)).max(0.0))
}

/// Perron data of `sqrt(P Q)` needed by the finite-blocklength bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub perron_value: f64,
    pub perron_right_vec: Vec<f64>,
    pub v_max: f64,
    pub v_min: f64,
    /// `sqrt(mu) . v` for the initial distribution of the first chain.
    pub w_dot_v: f64,
}

/// Divergence rate `-2 log2 lambda` of `x` against `y`, with the Perron data.
pub fn markov_divergence_rate(
    x: &MarkovSource,
    y: &MarkovSource,
) -> Result<(f64, SpectralReport)> {
    check_pair(x, y)?;
    let mat = hadamard_root(x, y);
    if !irreducible_matrix(&mat) {
        return Err(Error::NotIrreducible);
    }
    let (lambda, v) = perron_pair(&mat, PERRON_TOL, PERRON_MAX_ITER)?;
    let v_max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let v_min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let w_dot_v = ksum(x.mu.probs().iter().zip(&v).map(|(a, b)| a.sqrt() * b));
    let rate = (-2.0 * lambda.log2()).max(0.0);
    Ok((
        rate,
        SpectralReport {
            perron_value: lambda,
            perron_right_vec: v,
            v_max,
            v_min,
            w_dot_v,
        },
    ))
}

fn irreducible_matrix(m: &SquareMatrix) -> bool {
    is_irreducible(m)
}

/// Strong connectivity of the positive pattern of a square nonnegative matrix.
pub fn irreducibility_check(matrix: &[Vec<f64>]) -> bool {
    match SquareMatrix::from_rows(matrix) {
        Ok(m) => is_irreducible(&m),
        Err(_) => false,
    }
}

/// For a symmetric chain started uniformly, the n-letter divergence to the
/// uniform source from the eigen-decomposition of `sqrt(P / m)`.
pub fn symmetric_spectrum_divergence(x: &MarkovSource, n: usize) -> Result<f64> {
    if !x.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if !x.mu.is_uniform() {
        return Err(Error::InitialNotUniform);
    }
    if n == 0 {
        return Err(Error::BadRange("blocklength must be at least 1".into()));
    }
    let m = x.m();
    let mut mat = SquareMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            mat.set(i, j, (x.trans[i][j] / m as f64).sqrt());
        }
    }
    // Symmetrize exactly so Jacobi sees a symmetric input.
    for i in 0..m {
        for j in 0..i {
            let avg = 0.5 * (mat.get(i, j) + mat.get(j, i));
            mat.set(i, j, avg);
            mat.set(j, i, avg);
        }
    }
    let (values, vectors) = jacobi_eigen(&mat, 1e-14);
    let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if top == 0.0 {
        return Ok(f64::INFINITY);
    }
    let e = (n - 1) as i32;
    let s = ksum(values.iter().zip(&vectors).map(|(lambda, v)| {
        let dot = ksum(v.iter().copied());
        (lambda / top).powi(e) * dot * dot / m as f64
    }));
    if s <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-2.0 * (s.log2() + e as f64 * top.log2())).max(0.0))
}

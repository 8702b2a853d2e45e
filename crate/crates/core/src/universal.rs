//! Collision-based uniformity testing: the pair-collision statistic, its
//! moments, single-shot and amplified threshold tests, and Monte Carlo
//! operating points.

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{amplification_runs, single_shot_samples};
use crate::error::{Error, Result};
use crate::par::{block_rng, map_indexed, monte_carlo_count, Execution};
use crate::pmf::{chi_square, kl_divergence, renyi_half_divergence, Pmf};
use crate::sources::{MemorylessSource, Source};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionReport {
    /// `m * collisions / C(n, 2) - 1`, unbiased for the chi-square distance to uniform.
    pub z_value: f64,
    pub n: usize,
    pub m: usize,
    pub collisions: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    AcceptUniform,
    RejectUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub decision: Decision,
    pub z_value: f64,
    /// `delta / 2`.
    pub threshold: f64,
    pub n_used: usize,
}

fn pairs(n: usize) -> f64 {
    n as f64 * (n as f64 - 1.0) / 2.0
}

pub fn collision_statistic(x: &[usize], m: usize) -> Result<CollisionReport> {
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewSamples { n });
    }
    let mut counts = vec![0u64; m];
    for &s in x {
        if s >= m {
            return Err(Error::SymbolOutOfRange { symbol: s, m });
        }
        counts[s] += 1;
    }
    let collisions: u64 = counts.iter().map(|&c| c * c.saturating_sub(1) / 2).sum();
    Ok(CollisionReport {
        z_value: m as f64 * collisions as f64 / pairs(n) - 1.0,
        n,
        m,
        collisions,
    })
}

/// Mean of the statistic on `n` samples from `p`, and the upper bound
/// `(4m^2/n^2)|P|_2^2 + (4m^2/n)(|P|_3^3 - |P|_2^4)` on its variance.
pub fn collision_moments(p: &Pmf, n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::TooFewSamples { n });
    }
    let m = p.m() as f64;
    let (n2, n3) = (p.norm2_sq(), p.norm3_cubed());
    let nf = n as f64;
    let mean = m * n2 - 1.0;
    let var = 4.0 * m * m / (nf * nf) * n2 + 4.0 * m * m / nf * (n3 - n2 * n2);
    Ok((mean, var))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::BadDelta { delta })
    }
}

fn decide(z_value: f64, delta: f64, n_used: usize) -> TestOutcome {
    let threshold = delta / 2.0;
    TestOutcome {
        decision: if z_value > threshold {
            Decision::RejectUniform
        } else {
            Decision::AcceptUniform
        },
        z_value,
        threshold,
        n_used,
    }
}

/// Reject uniformity iff the collision statistic exceeds `delta / 2`.
pub fn uniformity_test(x: &[usize], m: usize, delta: f64) -> Result<TestOutcome> {
    check_delta(delta)?;
    let r = collision_statistic(x, m)?;
    Ok(decide(r.z_value, delta, x.len()))
}

/// Strict-majority vote over `ceil(18 log2(1/epsilon))` single-shot tests, each
/// on `ceil(200 sqrt(m) / delta)` fresh samples from `sampler`. The reported
/// statistic is the order statistic that decides the vote.
pub fn amplified_uniformity_test(
    sampler: &Source,
    delta: f64,
    epsilon: f64,
    seed: u64,
    exec: Execution,
) -> Result<TestOutcome> {
    check_delta(delta)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadEpsilon {
            epsilon,
            range: "(0, 1)",
        });
    }
    let m = sampler.m();
    let runs = amplification_runs(epsilon);
    let n0 = single_shot_samples(m, delta).max(2);
    let mut z = map_indexed(exec, runs, |r| {
        let mut rng = block_rng(seed, r as u64);
        let x = sampler.sample_with(n0, &mut rng);
        collision_statistic(&x, m).map(|c| c.z_value)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    z.sort_by(f64::total_cmp);
    Ok(decide(z[runs - runs / 2 - 1], delta, runs * n0))
}

/// The paired perturbation `((1+eta)/m, (1-eta)/m, ...)` with `eta` chosen so
/// the chi-square distance to uniform equals `delta`. For odd `m` the last
/// symbol keeps mass `1/m`.
pub fn paired_perturbation(m: usize, delta: f64) -> Result<Pmf> {
    if m < 2 {
        return Err(Error::BadRange(format!("alphabet size must be at least 2, got {m}")));
    }
    check_delta(delta)?;
    let k = m / 2;
    let eta = (delta * m as f64 / (2 * k) as f64).sqrt();
    if eta > 1.0 {
        return Err(Error::BadRange(format!(
            "no paired perturbation of size {m} has chi-square {delta}"
        )));
    }
    let mf = m as f64;
    let mut p = vec![1.0 / mf; m];
    for i in 0..k {
        p[2 * i] = (1.0 + eta) / mf;
        p[2 * i + 1] = (1.0 - eta) / mf;
    }
    Pmf::new(&p, false)
}

/// `(D_1/2(P||U), KL(P||U), log2(1 + chi^2(P||U)))`, which is nondecreasing.
pub fn divergence_chain(p: &Pmf) -> Result<(f64, f64, f64)> {
    let u = Pmf::uniform(p.m())?;
    Ok((
        renyi_half_divergence(p, &u)?,
        kl_divergence(p, &u)?,
        (1.0 + chi_square(p, &u)?).log2(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub m: usize,
    pub delta: f64,
    pub n: usize,
    pub trials: usize,
    pub reject_rate_p: f64,
    pub reject_rate_u: f64,
    pub seed: u64,
}

impl OperatingPoint {
    pub const CSV_HEADER: [&'static str; 7] =
        ["m", "delta", "n", "trials", "reject_rate_P", "reject_rate_U", "seed"];

    pub fn csv_record(&self, fmt: impl Fn(f64) -> String) -> [String; 7] {
        [
            self.m.to_string(),
            fmt(self.delta),
            self.n.to_string(),
            self.trials.to_string(),
            fmt(self.reject_rate_p),
            fmt(self.reject_rate_u),
            self.seed.to_string(),
        ]
    }
}

// Keeps the uniform-side streams disjoint from the planted side.
const UNIFORM_SALT: u64 = 0x5851_f42d_4c95_7f2d;

fn rejection_rate(source: &Source, delta: f64, n: usize, trials: usize, seed: u64, exec: Execution) -> f64 {
    let m = source.m();
    let threshold = delta / 2.0;
    let hits = monte_carlo_count(exec, seed, trials, |rng: &mut ChaCha8Rng| {
        let x = source.sample_with(n, rng);
        collision_statistic(&x, m).map(|c| c.z_value > threshold).unwrap_or(false)
    });
    hits as f64 / trials as f64
}

/// Empirical rejection frequencies of the single-shot test on `n` samples,
/// under `p` and under uniform, over `trials` seeded trials each.
pub fn empirical_operating_point(
    p: &Pmf,
    delta: f64,
    n: usize,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<OperatingPoint> {
    if n < 2 {
        return Err(Error::TooFewSamples { n });
    }
    if trials == 0 {
        return Err(Error::BadRange("trials must be at least 1".into()));
    }
    let m = p.m();
    let planted = Source::Memoryless(MemorylessSource::new(p.clone()));
    let uniform = Source::Memoryless(MemorylessSource::new(Pmf::uniform(m)?));
    Ok(OperatingPoint {
        m,
        delta,
        n,
        trials,
        reject_rate_p: rejection_rate(&planted, delta, n, trials, seed, exec),
        reject_rate_u: rejection_rate(&uniform, delta, n, trials, seed ^ UNIFORM_SALT, exec),
        seed,
    })
}

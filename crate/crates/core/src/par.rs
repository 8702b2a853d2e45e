//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! rayon's pool; without it, or with [`Execution::Sequential`], the same
//! closures run in order. Results never depend on the execution mode: work is
//! split into fixed blocks and recombined in block order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Monte Carlo trials per independently seeded block.
pub const MC_BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// `(0..n).map(f).collect()`, possibly in parallel. Output order is index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Generator for block `block` of a run seeded by `seed`. Each block reads its
/// own ChaCha stream, so blocks can be evaluated in any order.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Count the trials for which `trial` returns true, over `trials` trials.
pub fn monte_carlo_count<F>(exec: Execution, seed: u64, trials: usize, trial: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync + Send,
{
    let blocks = trials.div_ceil(MC_BLOCK);
    let counts = map_indexed(exec, blocks, |b| {
        let mut rng = block_rng(seed, b as u64);
        let len = MC_BLOCK.min(trials - b * MC_BLOCK);
        (0..len).filter(|_| trial(&mut rng)).count() as u64
    });
    counts.iter().sum()
}

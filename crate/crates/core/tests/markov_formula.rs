mod common;

use approx::assert_abs_diff_eq;
use sclab_core::sources::{markov_divergence_rate, markov_pair_divergence, symmetric_spectrum_divergence};
use sclab_core::{MarkovSource, Pmf, Source};

use common::*;

#[test]
fn pair_divergence_matches_enumeration() {
    let mut r = rng(31);
    for m in 2..=3 {
        for _ in 0..5 {
            let x = random_chain(&mut r, m);
            let y = random_chain(&mut r, m);
            let n_top = if m == 2 { 10 } else { 7 };
            for n in 1..=n_top {
                let px = string_probs(&Source::Markov(x.clone()), n);
                let py = string_probs(&Source::Markov(y.clone()), n);
                assert_abs_diff_eq!(markov_pair_divergence(&x, &y, n).unwrap(), half_divergence(&px, &py), epsilon = 1e-8);
            }
        }
    }
}

#[test]
fn alternating_chain_is_one_bit_per_symbol() {
    let alt = MarkovSource::new(Pmf::new(&[1.0, 0.0], false).unwrap(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let u = MarkovSource::uniform(2).unwrap();
    for n in [1, 2, 5, 50, 500] {
        assert_abs_diff_eq!(markov_pair_divergence(&alt, &u, n).unwrap(), n as f64, epsilon = 1e-9);
    }
}

#[test]
fn symmetric_spectrum_agrees_with_products() {
    let sym = MarkovSource::new(
        Pmf::uniform(3).unwrap(),
        vec![vec![0.6, 0.3, 0.1], vec![0.3, 0.5, 0.2], vec![0.1, 0.2, 0.7]],
    )
    .unwrap();
    let u = MarkovSource::uniform(3).unwrap();
    let (rate, _) = markov_divergence_rate(&sym, &u).unwrap();
    for n in [1, 3, 10, 100, 200] {
        let direct = markov_pair_divergence(&sym, &u, n).unwrap();
        assert_abs_diff_eq!(symmetric_spectrum_divergence(&sym, n).unwrap(), direct, epsilon = 1e-8);
        assert!((direct / n as f64 - rate).abs() <= (2.0 * 3f64.log2() + 2.0) / n as f64);
    }
}

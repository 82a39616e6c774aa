//! Shared fixtures for the benchmarks: deterministic samples from the chain
//! samplers so every run measures the same inputs.

use nfagen::chain::{default_steps, ChainParams};
use nfagen::class::{ClassSpec, Family};
use nfagen::metropolis::{chain_rng, sample_uniform_labeled};
use nfagen::{Alphabet, Nfa};

pub fn alphabet() -> Alphabet {
    Alphabet::new(2).unwrap()
}

/// A fixed trim automaton sampled by the plain chain.
pub fn sampled_trim(n: usize, seed: u64) -> Nfa {
    let class = ClassSpec::trim();
    let params = ChainParams::default_for(&class);
    let mut rng = chain_rng(seed, 0);
    sample_uniform_labeled(&class, n, alphabet(), &params, default_steps(n), &mut rng)
        .unwrap()
        .0
}

/// A fixed member of the per-letter-bounded single-initial class.
pub fn sampled_bullet(n: usize, seed: u64) -> Nfa {
    let class = ClassSpec::new(Family::DegPerLetter(2), true).unwrap();
    let params = ChainParams::default_for(&class);
    let mut rng = chain_rng(seed, 0);
    sample_uniform_labeled(&class, n, alphabet(), &params, default_steps(n), &mut rng)
        .unwrap()
        .0
}

//! The random-graph baseline generator: independent Bernoulli transitions
//! with per-letter density `σ/n`, Bernoulli final states, and either a pinned
//! single initial state or Bernoulli initial states.

use crate::automaton::{Alphabet, Nfa};
use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Parameters of the baseline model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvParams {
    pub n: usize,
    pub alphabet: usize,
    /// Expected number of outgoing transitions per state and letter; each
    /// triple `(p, a, q)` is present independently with probability `σ/n`.
    pub sigma: f64,
    /// Probability that a state is final.
    pub p_f: f64,
    /// Probability that a state is initial; when absent the initial set is
    /// pinned to `{1}`.
    pub p_i: Option<f64>,
}

impl TvParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        if !(self.sigma >= 0.0 && self.sigma <= self.n as f64) {
            return Err(Error::InvalidParams(format!(
                "sigma = {} must lie in [0, n] so that sigma/n is a probability",
                self.sigma
            )));
        }
        for (name, p) in [("p_f", Some(self.p_f)), ("p_i", self.p_i)] {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParams(format!("{name} = {p} not in [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

/// Draws one automaton. Consumes the generator in a fixed order (finals by
/// state, then initials if Bernoulli, then transitions lexicographically),
/// so draws are reproducible from the seed.
pub fn tabakov_vardi<R: Rng + ?Sized>(params: &TvParams, rng: &mut R) -> Result<Nfa> {
    params.validate()?;
    let alphabet = Alphabet::new(params.alphabet)?;
    let n = params.n;
    let mut a = Nfa::new(n, alphabet)?;
    for q in 0..n {
        if rng.random_bool(params.p_f) {
            a.set_final(q);
        }
    }
    match params.p_i {
        Some(p_i) => {
            for q in 0..n {
                if rng.random_bool(p_i) {
                    a.set_initial(q);
                }
            }
        }
        None => a.set_initial(0),
    }
    let density = params.sigma / n as f64;
    for p in 0..n {
        for l in alphabet.letters() {
            for q in 0..n {
                if rng.random_bool(density) {
                    a.add_transition(p, l, q);
                }
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metropolis::chain_rng;

    fn params(sigma: f64) -> TvParams {
        TvParams {
            n: 10,
            alphabet: 2,
            sigma,
            p_f: 0.2,
            p_i: None,
        }
    }

    #[test]
    fn sigma_zero_gives_no_transitions() {
        let mut rng = chain_rng(1, 0);
        for _ in 0..20 {
            let a = tabakov_vardi(&params(0.0), &mut rng).unwrap();
            assert_eq!(a.transition_count(), 0);
        }
    }

    #[test]
    fn sigma_larger_than_n_rejected() {
        let mut rng = chain_rng(1, 0);
        assert!(tabakov_vardi(&params(11.0), &mut rng).is_err());
    }

    #[test]
    fn pinned_initial_state() {
        let mut rng = chain_rng(2, 0);
        let a = tabakov_vardi(&params(2.0), &mut rng).unwrap();
        assert_eq!(a.initial().to_sorted_vec(), vec![0]);
    }

    #[test]
    fn expected_transition_count_within_3_sigma() {
        // k·n·σ transitions in expectation; each of the k·n² slots is an
        // independent Bernoulli(σ/n).
        let p = params(2.0);
        let slots = (p.alphabet * p.n * p.n) as f64;
        let prob = p.sigma / p.n as f64;
        let draws = 10_000u64;
        let mut rng = chain_rng(3, 0);
        let mut total = 0u64;
        for _ in 0..draws {
            total += tabakov_vardi(&p, &mut rng).unwrap().transition_count() as u64;
        }
        let mean = slots * prob * draws as f64;
        let sd = (slots * prob * (1.0 - prob) * draws as f64).sqrt();
        assert!(
            (total as f64 - mean).abs() < 3.0 * sd,
            "total {total} vs mean {mean} (sd {sd})"
        );
    }

    #[test]
    fn bernoulli_initials_when_requested() {
        let mut p = params(1.0);
        p.p_i = Some(1.0);
        let mut rng = chain_rng(4, 0);
        let a = tabakov_vardi(&p, &mut rng).unwrap();
        assert_eq!(a.initial().count(), p.n);
    }
}

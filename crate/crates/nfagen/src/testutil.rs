//! Helpers shared by unit tests across modules.

use crate::automaton::{Alphabet, Nfa};
use rand::Rng;

/// A random automaton with independent Bernoulli components; no class
/// membership implied.
pub(crate) fn random_nfa<R: Rng>(n: usize, k: usize, density: f64, rng: &mut R) -> Nfa {
    let mut a = Nfa::new(n, Alphabet::new(k).unwrap()).unwrap();
    for q in 0..n {
        if rng.random_bool(0.5) {
            a.set_initial(q);
        }
        if rng.random_bool(0.5) {
            a.set_final(q);
        }
    }
    for p in 0..n {
        for l in 0..k {
            for q in 0..n {
                if rng.random_bool(density) {
                    a.add_transition(p, l, q);
                }
            }
        }
    }
    a
}

/// The 4-state rigid automaton used as a worked example throughout the tests:
/// I = {1}, F = {4}, Δ = {(1,a,2),(2,b,3),(3,b,2),(3,a,4),(4,b,4),(4,a,1)}
/// in 1-based names.
pub(crate) fn cycle4() -> Nfa {
    let mut a = Nfa::new(4, Alphabet::new(2).unwrap()).unwrap();
    a.set_initial(0);
    a.set_final(3);
    a.add_transition(0, 0, 1);
    a.add_transition(1, 1, 2);
    a.add_transition(2, 1, 1);
    a.add_transition(2, 0, 3);
    a.add_transition(3, 1, 3);
    a.add_transition(3, 0, 0);
    a
}

//! Uniform random generation of nondeterministic finite automata.
//!
//! Two sampling regimes over a class of `n`-state automata (all automata,
//! trim automata, trim with bounded out-degree, optionally restricted to a
//! single initial state):
//!
//! * **uniform over labeled automata** — a symmetric Markov chain whose moves
//!   flip one initial bit, one final bit or one transition, rejecting moves
//!   that leave the class ([`metropolis::sample_uniform_labeled`]);
//! * **uniform over isomorphism classes** — the same chain with a
//!   Metropolis-Hastings correction that accepts a proposal `y` from `x`
//!   with probability `min{1, |Aut(y)|/|Aut(x)|}`, which reweights each
//!   labeled automaton by its automorphism group size and makes every
//!   isomorphism class equally likely
//!   ([`metropolis::sample_uniform_up_to_iso`]).
//!
//! Group sizes come from label-partition backtracking ([`iso`]), with a
//! reduction of counting to isomorphism tests on tailed automata ([`gadget`])
//! and a degree-preserving digraph encoding ([`encode`]) as independently
//! testable alternatives. Small spaces can be enumerated exhaustively
//! ([`census`]) to verify every distributional claim against exact kernels
//! ([`chain::KernelMatrix`], [`stats::exact_stationary`]).
//!
//! ```
//! use nfagen::chain::{default_steps, ChainParams};
//! use nfagen::metropolis::{chain_rng, sample_uniform_up_to_iso};
//! use nfagen::{Alphabet, ClassSpec};
//!
//! let class = ClassSpec::trim();
//! let params = ChainParams::default_for(&class);
//! let mut rng = chain_rng(42, 0);
//! let (nfa, sample) = sample_uniform_up_to_iso(
//!     &class,
//!     8,
//!     Alphabet::new(2).unwrap(),
//!     &params,
//!     default_steps(8),
//!     &mut rng,
//!     None,
//! )
//! .unwrap();
//! assert!(nfa.is_trim());
//! assert!(sample.aut_of_output >= 1);
//! println!("{}", nfagen::format::serialize_automaton(&nfa));
//! ```

pub mod automaton;
pub mod baseline;
pub mod census;
pub mod chain;
pub mod class;
pub mod dfa;
pub mod encode;
mod error;
pub mod format;
pub mod gadget;
pub mod harness;
pub mod iso;
pub mod labeling;
pub mod metropolis;
pub mod stats;
#[cfg(test)]
pub(crate) mod testutil;

pub use automaton::{Alphabet, Nfa, Permutation, StateSet};
pub use chain::{ChainParams, KernelMatrix, MixingBudget, Move};
pub use class::{ClassSpec, Family};
pub use error::{Error, Result};
pub use iso::CanonicalForm;

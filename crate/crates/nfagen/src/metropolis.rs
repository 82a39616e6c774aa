//! Metropolis-Hastings correction of the symmetric chain, making the
//! stationary law uniform over isomorphism classes instead of over labeled
//! automata.
//!
//! A labeled automaton generated with probability `|Aut(x)| / (γ·n!)` lands
//! in each isomorphism class with probability `1/γ`, because a class has
//! `n!/|Aut|` labeled members. Running the symmetric kernel and accepting a
//! proposal `y` with probability `min{1, |Aut(y)|/|Aut(x)|}` produces exactly
//! that stationary law; the normalizer `γ·n!` cancels in the ratio and is
//! never computed. A rejected proposal (either because it left the class or
//! because the ratio turned it down) holds the chain for one time step.
//!
//! Only the proposal's group order is computed per step; the current state's
//! order rides along in [`MetropolisState`]. A shared [`AutCache`] absorbs
//! the repeated proposals the chain makes while it sits in a high-symmetry
//! neighborhood (the start state is the worst case).

use crate::automaton::{Alphabet, Nfa};
use crate::chain::{propose, ChainParams, Move};
use crate::class::ClassSpec;
use crate::error::{Error, Result};
use crate::iso::automorphism_group_size;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

/// Deterministic per-chain generator: one master seed, one stream per chain,
/// so parallel fan-out reproduces sequential runs bit for bit.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Bounded concurrent memo of automorphism group sizes, keyed by the exact
/// labeled automaton. Values are immutable once computed, so racing inserts
/// are harmless. Two generations give cheap approximate LRU behavior: when
/// the hot generation fills up it becomes the cold one and lookups promote.
pub struct AutCache {
    inner: Mutex<CacheInner>,
    capacity: usize,
    hits: AtomicU64,
    misses: AtomicU64,
}

struct CacheInner {
    hot: HashMap<Nfa, u128>,
    cold: HashMap<Nfa, u128>,
}

impl AutCache {
    pub fn new(capacity: usize) -> Self {
        AutCache {
            inner: Mutex::new(CacheInner {
                hot: HashMap::new(),
                cold: HashMap::new(),
            }),
            capacity: capacity.max(1),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    /// `|Aut(a)|`, memoized.
    pub fn group_size(&self, a: &Nfa) -> u128 {
        {
            let mut inner = self.inner.lock().expect("cache lock");
            if let Some(&v) = inner.hot.get(a) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return v;
            }
            if let Some(&v) = inner.cold.get(a) {
                // promote
                self.hits.fetch_add(1, Ordering::Relaxed);
                inner.hot.insert(a.clone(), v);
                return v;
            }
        }
        // compute outside the lock; duplicated work on a race is benign
        let v = automorphism_group_size(a);
        self.misses.fetch_add(1, Ordering::Relaxed);
        let mut inner = self.inner.lock().expect("cache lock");
        if inner.hot.len() >= self.capacity {
            inner.cold = std::mem::take(&mut inner.hot);
        }
        inner.hot.insert(a.clone(), v);
        v
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }
}

/// Acceptance probability `min{1, aut_y / aut_x}` of the class-uniform
/// Metropolis chain. Moves toward larger automorphism groups are always
/// accepted. Panics on zero input: group orders are at least 1.
pub fn acceptance_probability(aut_x: u128, aut_y: u128) -> f64 {
    assert!(aut_x >= 1 && aut_y >= 1, "group orders are positive");
    if aut_y >= aut_x {
        1.0
    } else {
        aut_y as f64 / aut_x as f64
    }
}

/// In-class start state: `(Q, Σ, ∅, Q, Q)` for plain classes, the
/// single-initial chain for bullet classes.
pub fn start_state(class: &ClassSpec, n: usize, alphabet: Alphabet) -> Result<Nfa> {
    let start = if class.bullet() {
        Nfa::single_initial_chain(n, alphabet)?
    } else {
        Nfa::all_initial_all_final(n, alphabet)?
    };
    debug_assert!(class.contains(&start));
    Ok(start)
}

/// Counters shared by both samplers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainStats {
    pub steps: u64,
    /// Proposals applied (the automaton changed).
    pub accepted: u64,
    /// Proposals rejected because the result left the class.
    pub rejected_class: u64,
    /// Proposals rejected by the Metropolis ratio (always 0 for the plain chain).
    pub rejected_ratio: u64,
    /// Steps that proposed nothing (lazy holds and leftover move mass).
    pub held: u64,
}

impl ChainStats {
    pub fn accept_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.steps as f64
        }
    }
}

/// Walking state of a Metropolis chain: the automaton and its cached group
/// order, plus tallies.
#[derive(Clone, Debug)]
pub struct MetropolisState {
    current: Nfa,
    aut_current: u128,
    pub stats: ChainStats,
}

impl MetropolisState {
    pub fn start(class: &ClassSpec, n: usize, alphabet: Alphabet) -> Result<Self> {
        let current = start_state(class, n, alphabet)?;
        let aut_current = automorphism_group_size(&current);
        Ok(MetropolisState {
            current,
            aut_current,
            stats: ChainStats::default(),
        })
    }

    pub fn from_state(class: &ClassSpec, current: Nfa) -> Result<Self> {
        if !class.contains(&current) {
            return Err(Error::InvalidParams(
                "metropolis start state must belong to the class".into(),
            ));
        }
        let aut_current = automorphism_group_size(&current);
        Ok(MetropolisState {
            current,
            aut_current,
            stats: ChainStats::default(),
        })
    }

    pub fn current(&self) -> &Nfa {
        &self.current
    }

    pub fn aut_current(&self) -> u128 {
        self.aut_current
    }
}

/// Group size of a proposal. The overwhelmingly common case, a proposal
/// whose states all carry distinct degree/flag profiles, is answered
/// without touching the shared cache, so the cache only ever holds the
/// expensive high-symmetry states the chain lingers near at the start.
fn group_size_cached(a: &Nfa, cache: Option<&AutCache>) -> u128 {
    if a.n() <= 4 {
        return automorphism_group_size(a); // direct enumeration beats a lookup
    }
    if crate::iso::degree_profile_discrete(a) {
        return 1;
    }
    match cache {
        Some(c) => c.group_size(a),
        None => automorphism_group_size(a),
    }
}

/// One Metropolis step. Exactly one time step elapses whether or not the
/// proposal is accepted.
pub fn metropolis_step<R: Rng + ?Sized>(
    state: &mut MetropolisState,
    class: &ClassSpec,
    params: &ChainParams,
    rng: &mut R,
    cache: Option<&AutCache>,
) {
    state.stats.steps += 1;
    let x = &mut state.current;
    let mv = propose(x.n(), x.alphabet().size(), params, rng);
    if matches!(mv, Move::Hold) {
        state.stats.held += 1;
        return;
    }
    mv.apply_in_place(x);
    if !class.contains(x) {
        mv.apply_in_place(x);
        state.stats.rejected_class += 1;
        return;
    }
    let aut_y = group_size_cached(x, cache);
    let accept = acceptance_probability(state.aut_current, aut_y);
    if accept >= 1.0 || rng.random::<f64>() < accept {
        state.aut_current = aut_y;
        state.stats.accepted += 1;
    } else {
        mv.apply_in_place(x);
        state.stats.rejected_ratio += 1;
    }
}

/// Variant that retries ratio-rejected proposals without advancing the step
/// counter until one is accepted (class rejections still hold the chain).
/// Exposed for experimentation; the standard step above is the one whose
/// stationary law is verified.
pub fn metropolis_step_retry<R: Rng + ?Sized>(
    state: &mut MetropolisState,
    class: &ClassSpec,
    params: &ChainParams,
    rng: &mut R,
    cache: Option<&AutCache>,
    max_retries: u64,
) {
    state.stats.steps += 1;
    for _ in 0..max_retries {
        let x = &mut state.current;
        let mv = propose(x.n(), x.alphabet().size(), params, rng);
        if matches!(mv, Move::Hold) {
            state.stats.held += 1;
            return;
        }
        mv.apply_in_place(x);
        if !class.contains(x) {
            mv.apply_in_place(x);
            state.stats.rejected_class += 1;
            return;
        }
        let aut_y = group_size_cached(x, cache);
        let accept = acceptance_probability(state.aut_current, aut_y);
        if accept >= 1.0 || rng.random::<f64>() < accept {
            state.aut_current = aut_y;
            state.stats.accepted += 1;
            return;
        }
        mv.apply_in_place(x);
        state.stats.rejected_ratio += 1;
        // retry without consuming a time step
    }
}

/// Runs the plain symmetric chain for `steps` steps from the fixed start
/// state and returns the final automaton: asymptotically uniform over the
/// labeled automata of the class.
pub fn sample_uniform_labeled<R: Rng + ?Sized>(
    class: &ClassSpec,
    n: usize,
    alphabet: Alphabet,
    params: &ChainParams,
    steps: u64,
    rng: &mut R,
) -> Result<(Nfa, ChainStats)> {
    params.validate_for(class)?;
    let mut x = start_state(class, n, alphabet)?;
    let mut stats = ChainStats::default();
    for _ in 0..steps {
        stats.steps += 1;
        match crate::chain::step_in_place(&mut x, class, params, rng) {
            crate::chain::StepOutcome::Moved(_) => stats.accepted += 1,
            crate::chain::StepOutcome::Held(Move::Hold) => stats.held += 1,
            crate::chain::StepOutcome::Held(_) => stats.rejected_class += 1,
        }
    }
    Ok((x, stats))
}

/// Runs the Metropolis chain for `steps` steps from the fixed start state and
/// returns the final automaton: its isomorphism class is asymptotically
/// uniform over the classes of the class space.
pub fn sample_uniform_up_to_iso<R: Rng + ?Sized>(
    class: &ClassSpec,
    n: usize,
    alphabet: Alphabet,
    params: &ChainParams,
    steps: u64,
    rng: &mut R,
    cache: Option<&AutCache>,
) -> Result<(Nfa, MhSample)> {
    params.validate_for(class)?;
    let mut state = MetropolisState::start(class, n, alphabet)?;
    for _ in 0..steps {
        metropolis_step(&mut state, class, params, rng, cache);
    }
    let MetropolisState {
        current,
        aut_current,
        stats,
    } = state;
    Ok((
        current,
        MhSample {
            stats,
            aut_of_output: aut_current,
        },
    ))
}

/// Per-sample metadata of the Metropolis sampler.
#[derive(Clone, Copy, Debug)]
pub struct MhSample {
    pub stats: ChainStats,
    pub aut_of_output: u128,
}

/// Guard for the global rejection sampler.
pub const REJECTION_MAX_STATES: usize = 6;

#[derive(Clone, Copy, Debug, Default)]
pub struct RejectionStats {
    /// Labeled samples drawn, including the accepted one.
    pub attempts: u64,
}

/// Draws uniform labeled samples and keeps each with probability
/// `|Aut|/n!`: the output class law is exactly uniform, at the cost of about
/// `n!/E[|Aut|]` attempts per accepted sample, hence the small-`n` guard.
///
/// Each attempt runs its chain for the mixing budget, not the bare `n³`
/// floor: the rejection identity needs the proposal law to actually be
/// uniform, and at these sizes `n³` steps still remember the fixed start.
pub fn naive_rejection_sample<R: Rng + ?Sized>(
    class: &ClassSpec,
    n: usize,
    alphabet: Alphabet,
    rng: &mut R,
) -> Result<(Nfa, RejectionStats)> {
    if n > REJECTION_MAX_STATES {
        return Err(Error::GuardExceeded(format!(
            "rejection sampling limited to n <= {REJECTION_MAX_STATES}, got {n}"
        )));
    }
    let params = ChainParams::default_for(class);
    let fact = crate::census::factorial(n) as f64;
    let steps = crate::chain::distribution_check_steps(class, n, alphabet.size(), &params, 0.005);
    let mut stats = RejectionStats::default();
    loop {
        let (candidate, _) = sample_uniform_labeled(class, n, alphabet, &params, steps, rng)?;
        stats.attempts += 1;
        let keep = automorphism_group_size(&candidate) as f64 / fact;
        if rng.random_bool(keep.min(1.0)) {
            return Ok((candidate, stats));
        }
    }
}

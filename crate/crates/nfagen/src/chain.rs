//! The symmetric move kernel on automaton classes.
//!
//! One step from `x`: pick a move kind with probabilities `ρ1` (flip an
//! initial-set bit), `ρ2` (flip a final-set bit), `ρ3` (flip a transition),
//! holding with the leftover mass `1 - ρ1 - ρ2 - ρ3`; then pick the target
//! uniformly (a state, a state, or a triple in `Q × Σ × Q`). The proposal is
//! accepted iff the flipped automaton still belongs to the class, otherwise
//! the chain holds. Off-diagonal transition probabilities are therefore
//! `ρ1/n`, `ρ2/n` and `ρ3/(k·n²)`, identical in both directions, so the
//! kernel is symmetric and its stationary distribution on an irreducible
//! class is uniform over the labeled automata of the class.
//!
//! The lazy variant first holds with probability 1/2, which makes the chain
//! aperiodic on `All` (where no proposal is ever rejected); the restricted
//! classes reject some moves and get their aperiodicity for free.
//!
//! Single-initial ("bullet") classes use `ρ1 = 0`, `ρ2 = ρ`, `ρ3 = 1 - ρ`:
//! initial flips are never proposed and the initial set stays pinned.

use crate::automaton::Nfa;
use crate::class::ClassSpec;
use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Move-kind probabilities plus the lazy switch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    pub lazy: bool,
}

impl ChainParams {
    pub fn new(rho1: f64, rho2: f64, rho3: f64, lazy: bool) -> Result<Self> {
        for (name, r) in [("rho1", rho1), ("rho2", rho2), ("rho3", rho3)] {
            if !(0.0..=1.0).contains(&r) || !r.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {r} not in [0, 1]")));
            }
        }
        if rho1 + rho2 + rho3 > 1.0 + 1e-12 {
            return Err(Error::InvalidParams(format!(
                "rho1 + rho2 + rho3 = {} exceeds 1",
                rho1 + rho2 + rho3
            )));
        }
        Ok(ChainParams {
            rho1,
            rho2,
            rho3,
            lazy,
        })
    }

    /// Equal thirds, the default for non-bullet classes.
    pub fn thirds(lazy: bool) -> Self {
        ChainParams {
            rho1: 1.0 / 3.0,
            rho2: 1.0 / 3.0,
            rho3: 1.0 / 3.0,
            lazy,
        }
    }

    /// Bullet-class parameters `(0, ρ, 1-ρ)` with `0 < ρ < 1`.
    pub fn bullet(rho: f64, lazy: bool) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParams(format!("rho = {rho} not in (0, 1)")));
        }
        ChainParams::new(0.0, rho, 1.0 - rho, lazy)
    }

    /// Defaults per class: lazy equal thirds on `All` (the mixing bound is
    /// stated for the lazy chain), plain equal thirds on the restricted
    /// classes, and `ρ = 1/2` on bullet classes.
    pub fn default_for(class: &ClassSpec) -> Self {
        if class.bullet() {
            ChainParams::bullet(0.5, false).expect("valid")
        } else {
            ChainParams::thirds(matches!(class.family(), crate::class::Family::All))
        }
    }

    /// Ergodicity requirements: positive move probabilities, and no initial
    /// flips on bullet classes.
    pub fn validate_for(&self, class: &ClassSpec) -> Result<()> {
        if class.bullet() {
            if self.rho1 != 0.0 {
                return Err(Error::InvalidParams(
                    "bullet classes require rho1 = 0".into(),
                ));
            }
            if self.rho2 <= 0.0 || self.rho3 <= 0.0 {
                return Err(Error::InvalidParams(
                    "bullet classes require rho2, rho3 > 0".into(),
                ));
            }
            if (self.rho2 + self.rho3 - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParams(
                    "bullet classes require rho2 + rho3 = 1".into(),
                ));
            }
        } else if self.rho1 <= 0.0 || self.rho2 <= 0.0 || self.rho3 <= 0.0 {
            return Err(Error::InvalidParams(
                "irreducibility requires rho1, rho2, rho3 > 0".into(),
            ));
        }
        Ok(())
    }
}

/// An elementary move of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    ToggleInitial(usize),
    ToggleFinal(usize),
    ToggleTransition(usize, usize, usize),
    Hold,
}

/// Draws one proposal. Consumes the generator in a fixed order (lazy coin if
/// enabled, move-kind uniform, then target indices), so runs are reproducible
/// bit for bit from the seed.
pub fn propose<R: Rng + ?Sized>(n: usize, k: usize, params: &ChainParams, rng: &mut R) -> Move {
    if params.lazy && rng.random_bool(0.5) {
        return Move::Hold;
    }
    let u: f64 = rng.random();
    if u < params.rho1 {
        Move::ToggleInitial(rng.random_range(0..n))
    } else if u < params.rho1 + params.rho2 {
        Move::ToggleFinal(rng.random_range(0..n))
    } else if u < params.rho1 + params.rho2 + params.rho3 {
        let p = rng.random_range(0..n);
        let a = rng.random_range(0..k);
        let q = rng.random_range(0..n);
        Move::ToggleTransition(p, a, q)
    } else {
        Move::Hold
    }
}

impl Move {
    pub(crate) fn apply_in_place(&self, x: &mut Nfa) {
        match *self {
            Move::ToggleInitial(q) => x.toggle_initial_in_place(q),
            Move::ToggleFinal(q) => x.toggle_final_in_place(q),
            Move::ToggleTransition(p, a, q) => x.toggle_transition_in_place(p, a, q),
            Move::Hold => {}
        }
    }
}

/// Outcome of one in-place step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// The proposal left the class (or was a hold); the state is unchanged.
    Held(Move),
    /// The flipped automaton was accepted.
    Moved(Move),
}

/// One chain step, mutating `x`. `x` must belong to the class.
pub fn step_in_place<R: Rng + ?Sized>(
    x: &mut Nfa,
    class: &ClassSpec,
    params: &ChainParams,
    rng: &mut R,
) -> StepOutcome {
    let mv = propose(x.n(), x.alphabet().size(), params, rng);
    if matches!(mv, Move::Hold) {
        return StepOutcome::Held(mv);
    }
    mv.apply_in_place(x);
    if class.contains(x) {
        StepOutcome::Moved(mv)
    } else {
        mv.apply_in_place(x); // toggles are involutions
        StepOutcome::Held(mv)
    }
}

/// One chain step as a pure function.
pub fn step<R: Rng + ?Sized>(x: &Nfa, class: &ClassSpec, params: &ChainParams, rng: &mut R) -> Nfa {
    debug_assert!(
        class.contains(x),
        "step precondition: x must be in the class"
    );
    let mut y = x.clone();
    step_in_place(&mut y, class, params, rng);
    y
}

/// Exact one-step transition probability from `x` to `y` (both in the class),
/// including the diagonal `S(x, x) = 1 - Σ_{y≠x} S(x, y)`.
pub fn kernel_probability(x: &Nfa, y: &Nfa, class: &ClassSpec, params: &ChainParams) -> f64 {
    let n = x.n() as f64;
    let k = x.alphabet().size() as f64;
    let base = if x == y {
        let mut leaving = 0.0;
        let mut scratch = x.clone();
        for q in 0..x.n() {
            scratch.toggle_initial_in_place(q);
            if class.contains(&scratch) {
                leaving += params.rho1 / n;
            }
            scratch.toggle_initial_in_place(q);
            scratch.toggle_final_in_place(q);
            if class.contains(&scratch) {
                leaving += params.rho2 / n;
            }
            scratch.toggle_final_in_place(q);
        }
        for p in 0..x.n() {
            for a in x.alphabet().letters() {
                for q in 0..x.n() {
                    scratch.toggle_transition_in_place(p, a, q);
                    if class.contains(&scratch) {
                        leaving += params.rho3 / (k * n * n);
                    }
                    scratch.toggle_transition_in_place(p, a, q);
                }
            }
        }
        1.0 - leaving
    } else {
        single_toggle_probability(x, y, params)
    };
    if params.lazy {
        if x == y {
            0.5 + 0.5 * base
        } else {
            0.5 * base
        }
    } else {
        base
    }
}

/// Probability of reaching `y` from `x` in exactly one accepted toggle, or 0.
fn single_toggle_probability(x: &Nfa, y: &Nfa, params: &ChainParams) -> f64 {
    let n = x.n() as f64;
    let k = x.alphabet().size() as f64;
    let di = x.initial().symmetric_difference_count(y.initial());
    let df = x.finals().symmetric_difference_count(y.finals());
    let mut dt = 0;
    for a in x.alphabet().letters() {
        for p in 0..x.n() {
            dt += x
                .successors(p, a)
                .symmetric_difference_count(y.successors(p, a));
            if dt > 1 {
                return 0.0;
            }
        }
    }
    match (di, df, dt) {
        (1, 0, 0) => params.rho1 / n,
        (0, 1, 0) => params.rho2 / n,
        (0, 0, 1) => params.rho3 / (k * n * n),
        _ => 0.0,
    }
}

/// The empirical step budget: `n³`.
pub fn default_steps(n: usize) -> u64 {
    (n as u64).pow(3)
}

/// A step budget derived from the lazy-chain mixing bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingBudget {
    pub epsilon: f64,
    pub steps: u64,
}

/// Mixing-time bound for the lazy chain on the full space, by decomposition
/// into lazy hypercube walks of dimensions `n`, `n` and `k·n²`:
///
/// ```text
/// max( ⌈(n/ρ1)(ln n + ln(1/(ρ1 ε)))⌉,
///      ⌈(n/ρ2)(ln n + ln(1/(ρ2 ε)))⌉,
///      ⌈(k n²/ρ3)(ln(k n²) + ln(1/(ρ3 ε)))⌉ )
/// ```
///
/// Natural logarithms throughout. For the restricted classes this is a
/// heuristic budget, not a bound.
pub fn mixing_budget(
    n: usize,
    k: usize,
    params: &ChainParams,
    epsilon: f64,
) -> Result<MixingBudget> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "epsilon = {epsilon} not in (0, 1]"
        )));
    }
    if params.rho1 <= 0.0 || params.rho2 <= 0.0 || params.rho3 <= 0.0 {
        return Err(Error::InvalidParams(
            "mixing budget requires rho1, rho2, rho3 > 0".into(),
        ));
    }
    let term =
        |dim: f64, rho: f64| -> f64 { (dim / rho) * (dim.ln() + (1.0 / (rho * epsilon)).ln()) };
    let nn = n as f64;
    let t1 = term(nn, params.rho1).ceil();
    let t2 = term(nn, params.rho2).ceil();
    let t3 = term(k as f64 * nn * nn, params.rho3).ceil();
    let steps = t1.max(t2).max(t3).max(1.0) as u64;
    Ok(MixingBudget { epsilon, steps })
}

/// Step budget for distribution-sensitive sampling: the empirical `n³`
/// floor, raised to the hypercube mixing bound at `ε` when that is larger.
/// At verification scale (small `n`) `n³` alone does not come close to
/// forgetting the fixed start state, while at large `n` the cubic floor
/// dominates. Bullet classes have no initial-set dimension, so only the
/// final-set and transition terms apply.
pub fn distribution_check_steps(
    class: &ClassSpec,
    n: usize,
    k: usize,
    params: &ChainParams,
    epsilon: f64,
) -> u64 {
    let term = |dim: f64, rho: f64| -> u64 {
        if rho <= 0.0 {
            return 0;
        }
        ((dim / rho) * (dim.ln() + (1.0 / (rho * epsilon)).ln())).ceil() as u64
    };
    let nn = n as f64;
    let t1 = if class.bullet() {
        0
    } else {
        term(nn, params.rho1)
    };
    let t2 = term(nn, params.rho2);
    let t3 = term(k as f64 * nn * nn, params.rho3);
    default_steps(n).max(t1).max(t2).max(t3).max(1)
}

/// A small enumerated class together with the dense one-step matrix on it.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    automata: Vec<Nfa>,
    probs: Vec<f64>,
    dim: usize,
}

impl KernelMatrix {
    /// Plain symmetric kernel on an enumerated class: off-diagonal entries
    /// come from the single-toggle probabilities (membership of both ends in
    /// the class is implied by the list), the diagonal takes the leftover row
    /// mass, exactly `S(x,x) = 1 - Σ_{y≠x} S(x,y)`.
    pub fn plain(automata: Vec<Nfa>, params: &ChainParams) -> Self {
        Self::build(automata, params, |_| 1)
    }

    /// Metropolis-corrected kernel `P(x,y) = min{1, aut(y)/aut(x)}·S(x,y)`
    /// for `x ≠ y`; `aut` gives each element's automorphism group size.
    pub fn metropolis<F: Fn(&Nfa) -> u128>(
        automata: Vec<Nfa>,
        params: &ChainParams,
        aut: F,
    ) -> Self {
        Self::build(automata, params, aut)
    }

    fn build<F: Fn(&Nfa) -> u128>(automata: Vec<Nfa>, params: &ChainParams, aut: F) -> Self {
        let dim = automata.len();
        let weights: Vec<f64> = automata.iter().map(|a| aut(a) as f64).collect();
        let mut probs = vec![0.0; dim * dim];
        for i in 0..dim {
            let mut off_mass = 0.0;
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let s = single_toggle_probability(&automata[i], &automata[j], params);
                if s == 0.0 {
                    continue;
                }
                let ratio = (weights[j] / weights[i]).min(1.0);
                let mut p = ratio * s;
                if params.lazy {
                    p *= 0.5;
                }
                probs[i * dim + j] = p;
                off_mass += p;
            }
            // the true diagonal is nonnegative; guard the few ulps of
            // accumulation error on rows whose off-diagonal mass is full
            probs[i * dim + i] = (1.0 - off_mass).max(0.0);
        }
        KernelMatrix {
            automata,
            probs,
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn automata(&self) -> &[Nfa] {
        &self.automata
    }

    #[inline]
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.probs[i * self.dim..(i + 1) * self.dim]
    }

    /// `out = v · M` (left multiplication by a row vector).
    pub fn mul_left(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            let row = self.row(i);
            for j in 0..self.dim {
                out[j] += vi * row[j];
            }
        }
        out
    }

    /// Strong connectivity of the positive-probability graph.
    pub fn is_strongly_connected(&self) -> bool {
        if self.dim == 0 {
            return false;
        }
        let forward = self.reach(0, false);
        let backward = self.reach(0, true);
        forward.iter().all(|&b| b) && backward.iter().all(|&b| b)
    }

    fn reach(&self, from: usize, reversed: bool) -> Vec<bool> {
        let mut seen = vec![false; self.dim];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for v in 0..self.dim {
                let p = if reversed {
                    self.prob(v, u)
                } else {
                    self.prob(u, v)
                };
                if p > 0.0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Period-1 test for an irreducible chain: the gcd of `d(u) + 1 - d(v)`
    /// over all edges `(u, v)`, with `d` any BFS distance from a root, is the
    /// period of the graph.
    pub fn is_aperiodic(&self) -> bool {
        if !self.is_strongly_connected() {
            return false;
        }
        let mut dist = vec![i64::MIN; self.dim];
        dist[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in 0..self.dim {
                if self.prob(u, v) > 0.0 && dist[v] == i64::MIN {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g: i64 = 0;
        for u in 0..self.dim {
            for v in 0..self.dim {
                if self.prob(u, v) > 0.0 {
                    g = gcd(g, (dist[u] + 1 - dist[v]).abs());
                }
            }
        }
        g == 1
    }

    /// CSV rendering: header row of indices, then one probability row per line.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "index,{}",
            (0..self.dim)
                .map(|j| j.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|p| format!("{p:.17e}")).collect();
            let _ = writeln!(out, "{i},{}", row.join(","));
        }
        out
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Alphabet;
    use crate::class::Family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ChainParams::new(0.4, 0.4, 0.4, false).is_err());
        assert!(ChainParams::new(-0.1, 0.5, 0.5, false).is_err());
        assert!(ChainParams::bullet(0.0, false).is_err());
        assert!(ChainParams::bullet(1.0, false).is_err());
        let bullet = ChainParams::bullet(0.5, false).unwrap();
        assert_eq!(bullet.rho1, 0.0);
        let class = ClassSpec::new(Family::Trim, true).unwrap();
        assert!(bullet.validate_for(&class).is_ok());
        assert!(ChainParams::thirds(false).validate_for(&class).is_err());
    }

    #[test]
    fn default_steps_is_cubic() {
        assert_eq!(default_steps(1), 1);
        assert_eq!(default_steps(5), 125);
        assert_eq!(default_steps(20), 8000);
    }

    #[test]
    fn all_class_accepts_every_proposal() {
        let class = ClassSpec::all();
        let params = ChainParams::thirds(false);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut x = Nfa::all_initial_all_final(3, k2()).unwrap();
        for _ in 0..10_000 {
            match step_in_place(&mut x, &class, &params, &mut rng) {
                StepOutcome::Held(mv) => assert_eq!(mv, Move::Hold),
                StepOutcome::Moved(_) => {}
            }
        }
    }

    #[test]
    fn per_move_marginals_match_the_kernel_law() {
        // On All every proposal is accepted, so the per-target frequencies
        // must match rho1/n, rho2/n, rho3/(k n²) within 3σ over 10⁶ draws.
        let n = 3;
        let k = 2;
        let params = ChainParams::thirds(false);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 1_000_000u64;
        let mut init_hits = vec![0u64; n];
        let mut final_hits = vec![0u64; n];
        let mut trans_hits = vec![0u64; k * n * n];
        for _ in 0..draws {
            match propose(n, k, &params, &mut rng) {
                Move::ToggleInitial(q) => init_hits[q] += 1,
                Move::ToggleFinal(q) => final_hits[q] += 1,
                Move::ToggleTransition(p, a, q) => trans_hits[(a * n + p) * n + q] += 1,
                Move::Hold => {}
            }
        }
        let check = |hits: u64, p: f64| {
            let mean = p * draws as f64;
            let sd = (draws as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (hits as f64 - mean).abs() <= 3.0 * sd,
                "hits {hits} vs mean {mean} (sd {sd})"
            );
        };
        for &h in &init_hits {
            check(h, (1.0 / 3.0) / n as f64);
        }
        for &h in &final_hits {
            check(h, (1.0 / 3.0) / n as f64);
        }
        for &h in &trans_hits {
            check(h, (1.0 / 3.0) / (k * n * n) as f64);
        }
    }

    #[test]
    fn kernel_symmetric_on_exhaustively_enumerated_small_spaces() {
        // every off-diagonal pair of every class at n <= 2 (and the bullet
        // degree-bounded space), exactly
        let k = k2();
        let spaces = [
            (ClassSpec::all(), 1, ChainParams::thirds(false)),
            (ClassSpec::trim(), 1, ChainParams::thirds(false)),
            (ClassSpec::all(), 2, ChainParams::thirds(false)),
            (
                ClassSpec::new(Family::DegPerLetter(2), true).unwrap(),
                2,
                ChainParams::bullet(0.5, false).unwrap(),
            ),
        ];
        for (class, n, params) in spaces {
            let automata = crate::census::enumerate_class(&class, n, k).unwrap();
            for (i, x) in automata.iter().enumerate() {
                for y in &automata[i + 1..] {
                    let fwd = kernel_probability(x, y, &class, &params);
                    let bwd = kernel_probability(y, x, &class, &params);
                    assert_eq!(fwd, bwd, "{class:?} {x:?} vs {y:?}");
                }
            }
        }
    }

    #[test]
    fn bullet_chain_never_touches_initial_set() {
        let class = ClassSpec::new(Family::Trim, true).unwrap();
        let params = ChainParams::bullet(0.5, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x = Nfa::single_initial_chain(4, k2()).unwrap();
        for _ in 0..20_000 {
            let out = step_in_place(&mut x, &class, &params, &mut rng);
            if let StepOutcome::Moved(Move::ToggleInitial(_))
            | StepOutcome::Held(Move::ToggleInitial(_)) = out
            {
                panic!("initial toggle proposed under rho1 = 0");
            }
            assert_eq!(x.initial().to_sorted_vec(), vec![0]);
        }
    }

    #[test]
    fn single_state_trim_moves_exhaustively() {
        // From ({1}, Σ, ∅, {1}, {1}) in the trim class: initial and final
        // flips break trimness and must be rejected; loop flips are accepted.
        let class = ClassSpec::trim();
        let a0 = Nfa::all_initial_all_final(1, k2()).unwrap();
        let mut x = a0.clone();
        for mv in [Move::ToggleInitial(0), Move::ToggleFinal(0)] {
            mv.apply_in_place(&mut x);
            assert!(!class.contains(&x));
            mv.apply_in_place(&mut x);
        }
        for a in 0..2 {
            let mv = Move::ToggleTransition(0, a, 0);
            mv.apply_in_place(&mut x);
            assert!(class.contains(&x));
            mv.apply_in_place(&mut x);
        }
        assert_eq!(x, a0);
    }

    #[test]
    fn kernel_probability_final_flip() {
        let class = ClassSpec::all();
        let params = ChainParams::thirds(false);
        let x = Nfa::all_initial_all_final(2, k2()).unwrap();
        let y = x.toggle_final(0).unwrap();
        let p = kernel_probability(&x, &y, &class, &params);
        assert!((p - (1.0 / 3.0) / 2.0).abs() < 1e-15);
        // two transition flips apart → probability 0
        let z = x
            .toggle_transition(0, 0, 1)
            .unwrap()
            .toggle_transition(1, 0, 0)
            .unwrap();
        assert_eq!(kernel_probability(&x, &z, &class, &params), 0.0);
    }

    #[test]
    fn kernel_symmetry_spot_checks() {
        let class = ClassSpec::trim();
        let params = ChainParams::thirds(false);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut x = Nfa::all_initial_all_final(3, k2()).unwrap();
        for _ in 0..200 {
            let before = x.clone();
            if let StepOutcome::Moved(_) = step_in_place(&mut x, &class, &params, &mut rng) {
                let fwd = kernel_probability(&before, &x, &class, &params);
                let bwd = kernel_probability(&x, &before, &class, &params);
                assert!((fwd - bwd).abs() < 1e-15);
                assert!(fwd > 0.0);
            }
        }
    }

    #[test]
    fn mixing_budget_forced_values() {
        // n = 1, k = 2, ρ = 1/3 each, ε = 1: every log(1/(ρε)) is log 3, so
        // the terms are ⌈3 ln 3⌉ = 4, 4 and ⌈6 ln 6⌉ = 11.
        let params = ChainParams::thirds(true);
        let b = mixing_budget(1, 2, &params, 1.0).unwrap();
        assert_eq!(b.steps, 11);
    }

    #[test]
    fn mixing_budget_monotone_in_epsilon() {
        let params = ChainParams::thirds(true);
        let mut prev = 0;
        for eps in [0.5, 0.1, 0.01, 0.001] {
            let b = mixing_budget(10, 2, &params, eps).unwrap();
            assert!(b.steps >= prev);
            prev = b.steps;
        }
    }

    #[test]
    fn mixing_budget_rejects_zero_rho() {
        let params = ChainParams::bullet(0.5, false).unwrap();
        assert!(mixing_budget(5, 2, &params, 0.1).is_err());
    }
}

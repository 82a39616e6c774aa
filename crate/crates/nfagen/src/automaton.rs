//! The automaton value model: alphabets, state sets, NFAs and permutations.
//!
//! States are indexed `0..n` internally and rendered `1..=n` in every
//! serialized document, so that the single pinned initial state of the
//! "bullet" classes is state `1` on the wire and state `0` in memory.
//! All values here are immutable in spirit: every operation either returns a
//! fresh automaton or is an explicitly named in-place toggle used by the
//! samplers (toggles are involutions, so callers can revert them cheaply).

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Largest alphabet we can render with letters `a..=z`.
pub const MAX_ALPHABET: usize = 26;

/// A fixed finite alphabet of size `k`, with `2 <= k <= 26`.
///
/// Letters are identified by their rank `0..k` and printed `a`, `b`, `c`, …
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(k: usize) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&k) {
            return Err(Error::InvalidAlphabet(k));
        }
        Ok(Alphabet(k))
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }

    pub fn letters(self) -> std::ops::Range<usize> {
        0..self.0
    }

    pub fn letter_char(self, letter: usize) -> char {
        debug_assert!(letter < self.0);
        (b'a' + letter as u8) as char
    }

    pub fn letter_from_str(self, s: &str) -> Result<usize> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() => {
                let idx = (c as u8 - b'a') as usize;
                if idx < self.0 {
                    return Ok(idx);
                }
                Err(Error::UnknownLetter(s.to_string()))
            }
            _ => Err(Error::UnknownLetter(s.to_string())),
        }
    }
}

/// A set of states over a fixed universe `0..n`, stored as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StateSet {
    words: Vec<u64>,
}

#[inline]
fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet {
            words: vec![0; word_count(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = StateSet::empty(n);
        for q in 0..n {
            s.insert(q);
        }
        s
    }

    pub fn singleton(n: usize, q: usize) -> Self {
        let mut s = StateSet::empty(n);
        s.insert(q);
        s
    }

    /// Builds the set whose members are the set bits of `mask` (universe `0..n`, `n <= 32`).
    pub fn from_mask(n: usize, mask: u32) -> Self {
        debug_assert!(n <= 32);
        let mut s = StateSet::empty(n);
        s.words[0] = u64::from(mask);
        s
    }

    #[inline]
    pub fn contains(&self, q: usize) -> bool {
        self.words[q >> 6] & (1 << (q & 63)) != 0
    }

    #[inline]
    pub fn insert(&mut self, q: usize) {
        self.words[q >> 6] |= 1 << (q & 63);
    }

    #[inline]
    pub fn remove(&mut self, q: usize) {
        self.words[q >> 6] &= !(1 << (q & 63));
    }

    #[inline]
    pub fn toggle(&mut self, q: usize) {
        self.words[q >> 6] ^= 1 << (q & 63);
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &StateSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).any(|(w, o)| w & o != 0)
    }

    /// Number of members in `self` but not in `other` plus vice versa.
    pub fn symmetric_difference_count(&self, other: &StateSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(w, o)| (w ^ o).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    pub fn to_sorted_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// The image of this set under `phi`, over the same universe size.
    pub fn permuted(&self, phi: &Permutation) -> StateSet {
        let mut out = StateSet {
            words: vec![0; self.words.len()],
        };
        for q in self.iter() {
            out.insert(phi.apply(q));
        }
        out
    }
}

/// A bijection of `{0, …, n-1}` onto itself.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn from_mapping(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n {
                return Err(Error::NotBijective(format!(
                    "image {v} out of range 0..{n}"
                )));
            }
            if seen[v] {
                return Err(Error::NotBijective(format!("image {v} repeated")));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    #[inline]
    pub fn apply(&self, q: usize) -> usize {
        self.map[q]
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (q, &v) in self.map.iter().enumerate() {
            inv[v] = q;
        }
        Permutation { map: inv }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Mapping rendered with 1-based state names, for documents and witnesses.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.map.iter().map(|&v| v + 1).collect()
    }

    /// A uniformly random permutation (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            map.swap(i, j);
        }
        Permutation { map }
    }
}

/// Visits every permutation of `{0, …, n-1}` exactly once (Heap's algorithm).
///
/// The visitor receives the permutation as a slice; return `false` to stop
/// early. Used by the brute-force oracles, so it deliberately does not share
/// code with the labeling-based searches.
pub fn for_each_permutation<F: FnMut(&[usize]) -> bool>(n: usize, mut f: F) {
    let mut arr: Vec<usize> = (0..n).collect();
    if !f(&arr) {
        return;
    }
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                arr.swap(0, i);
            } else {
                arr.swap(c[i], i);
            }
            if !f(&arr) {
                return;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// A nondeterministic finite automaton `(Q, Σ, Δ, I, F)` with `Q = {0, …, n-1}`.
///
/// Equality is component-wise set equality, so two values compare equal
/// exactly when they are the same labeled automaton.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Nfa {
    n: usize,
    alphabet: Alphabet,
    initial: StateSet,
    finals: StateSet,
    /// `delta[a * n + p]` is the successor set of `p` under letter `a`.
    delta: Vec<StateSet>,
}

impl Nfa {
    /// An automaton with no initial states, no final states and no transitions.
    pub fn new(n: usize, alphabet: Alphabet) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse(
                "automaton must have at least one state".into(),
            ));
        }
        Ok(Nfa {
            n,
            alphabet,
            initial: StateSet::empty(n),
            finals: StateSet::empty(n),
            delta: vec![StateSet::empty(n); alphabet.size() * n],
        })
    }

    /// `(Q, Σ, ∅, Q, Q)`: every state initial and final, no transitions.
    /// Trim by construction and a member of every non-bullet class.
    pub fn all_initial_all_final(n: usize, alphabet: Alphabet) -> Result<Self> {
        let mut a = Nfa::new(n, alphabet)?;
        a.initial = StateSet::full(n);
        a.finals = StateSet::full(n);
        Ok(a)
    }

    /// The single-initial chain `0 → 1 → … → n-1` on the first letter, with
    /// every state final. Trim, in every bullet class with `m >= 1`.
    pub fn single_initial_chain(n: usize, alphabet: Alphabet) -> Result<Self> {
        let mut a = Nfa::new(n, alphabet)?;
        a.initial.insert(0);
        a.finals = StateSet::full(n);
        for i in 0..n.saturating_sub(1) {
            a.add_transition(i, 0, i + 1);
        }
        Ok(a)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn finals(&self) -> &StateSet {
        &self.finals
    }

    #[inline]
    pub fn successors(&self, p: usize, a: usize) -> &StateSet {
        &self.delta[a * self.n + p]
    }

    #[inline]
    pub fn has_transition(&self, p: usize, a: usize, q: usize) -> bool {
        self.delta[a * self.n + p].contains(q)
    }

    pub fn add_transition(&mut self, p: usize, a: usize, q: usize) {
        self.delta[a * self.n + p].insert(q);
    }

    pub fn set_initial(&mut self, q: usize) {
        self.initial.insert(q);
    }

    pub fn set_final(&mut self, q: usize) {
        self.finals.insert(q);
    }

    pub(crate) fn set_initial_mask(&mut self, mask: u32) {
        self.initial = StateSet::from_mask(self.n, mask);
    }

    pub(crate) fn set_final_mask(&mut self, mask: u32) {
        self.finals = StateSet::from_mask(self.n, mask);
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().map(StateSet::count).sum()
    }

    /// All transitions `(p, a, q)` in lexicographic order.
    pub fn transitions(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.transition_count());
        for p in 0..self.n {
            for a in self.alphabet.letters() {
                for q in self.successors(p, a).iter() {
                    out.push((p, a, q));
                }
            }
        }
        out
    }

    pub fn out_degree(&self, p: usize) -> usize {
        self.alphabet
            .letters()
            .map(|a| self.successors(p, a).count())
            .sum()
    }

    pub fn out_degree_letter(&self, p: usize, a: usize) -> usize {
        self.successors(p, a).count()
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.n).map(|p| self.out_degree(p)).max().unwrap_or(0)
    }

    fn check_state(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::StateOutOfRange {
                state: q + 1,
                n: self.n,
            });
        }
        Ok(())
    }

    fn check_letter(&self, a: usize) -> Result<()> {
        if a >= self.alphabet.size() {
            return Err(Error::UnknownLetter(format!("letter index {a}")));
        }
        Ok(())
    }

    /// Flips membership of `q` in the initial set. Involution.
    pub fn toggle_initial(&self, q: usize) -> Result<Nfa> {
        self.check_state(q)?;
        let mut out = self.clone();
        out.initial.toggle(q);
        Ok(out)
    }

    /// Flips membership of `q` in the final set. Involution.
    pub fn toggle_final(&self, q: usize) -> Result<Nfa> {
        self.check_state(q)?;
        let mut out = self.clone();
        out.finals.toggle(q);
        Ok(out)
    }

    /// Flips presence of the transition `(p, a, q)`. Involution.
    pub fn toggle_transition(&self, p: usize, a: usize, q: usize) -> Result<Nfa> {
        self.check_state(p)?;
        self.check_state(q)?;
        self.check_letter(a)?;
        let mut out = self.clone();
        out.delta[a * out.n + p].toggle(q);
        Ok(out)
    }

    #[inline]
    pub(crate) fn toggle_initial_in_place(&mut self, q: usize) {
        self.initial.toggle(q);
    }

    #[inline]
    pub(crate) fn toggle_final_in_place(&mut self, q: usize) {
        self.finals.toggle(q);
    }

    #[inline]
    pub(crate) fn toggle_transition_in_place(&mut self, p: usize, a: usize, q: usize) {
        self.delta[a * self.n + p].toggle(q);
    }

    /// Set of states reachable from the initial set (the empty path counts).
    pub fn accessible(&self) -> StateSet {
        let mut reach = self.initial.clone();
        loop {
            let mut changed = false;
            for a in self.alphabet.letters() {
                for p in 0..self.n {
                    if reach.contains(p) {
                        let succ = &self.delta[a * self.n + p];
                        for q in succ.iter() {
                            if !reach.contains(q) {
                                reach.insert(q);
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                return reach;
            }
        }
    }

    /// Set of states from which some final state is reachable.
    pub fn co_accessible(&self) -> StateSet {
        let mut co = self.finals.clone();
        loop {
            let mut changed = false;
            for a in self.alphabet.letters() {
                for p in 0..self.n {
                    if !co.contains(p) && self.delta[a * self.n + p].intersects(&co) {
                        co.insert(p);
                        changed = true;
                    }
                }
            }
            if !changed {
                return co;
            }
        }
    }

    /// True when every state is accessible and co-accessible.
    pub fn is_trim(&self) -> bool {
        self.accessible().count() == self.n && self.co_accessible().count() == self.n
    }

    /// The automaton `φ(A)`: states renamed by `phi`, structure preserved.
    pub fn apply_permutation(&self, phi: &Permutation) -> Result<Nfa> {
        if phi.n() != self.n {
            return Err(Error::SizeMismatch {
                perm: phi.n(),
                n: self.n,
            });
        }
        let mut out = Nfa::new(self.n, self.alphabet).expect("n >= 1");
        out.initial = self.initial.permuted(phi);
        out.finals = self.finals.permuted(phi);
        for a in self.alphabet.letters() {
            for p in 0..self.n {
                let img = &mut out.delta[a * self.n + phi.apply(p)];
                for q in self.delta[a * self.n + p].iter() {
                    img.insert(phi.apply(q));
                }
            }
        }
        Ok(out)
    }

    /// Whether the automaton accepts `word` (letters by rank).
    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut current = self.initial.clone();
        for &a in word {
            let mut next = StateSet::empty(self.n);
            for p in current.iter() {
                next.union_with(&self.delta[a * self.n + p]);
            }
            current = next;
            if current.is_empty() {
                return false;
            }
        }
        current.intersects(&self.finals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    /// The four-state automaton from the worked isomorphism example:
    /// I = {1}, F = {4}, transitions 1-a->2, 2-b->3, 3-b->2, 3-a->4, 4-b->4, 4-a->1
    /// (1-based names; stored 0-based).
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

    #[test]
    fn alphabet_bounds() {
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(2).is_ok());
        assert!(Alphabet::new(26).is_ok());
        assert!(Alphabet::new(27).is_err());
    }

    #[test]
    fn state_set_basics() {
        let mut s = StateSet::empty(70);
        assert!(s.is_empty());
        s.insert(0);
        s.insert(69);
        assert!(s.contains(69));
        assert_eq!(s.count(), 2);
        assert_eq!(s.to_sorted_vec(), vec![0, 69]);
        s.toggle(69);
        assert!(!s.contains(69));
        assert_eq!(StateSet::full(70).count(), 70);
    }

    #[test]
    fn all_initial_all_final_is_trim() {
        // (Q, Σ, ∅, Q, Q) is trim: initial states are accessible, final states
        // are co-accessible, and every state is both.
        for n in 1..6 {
            let a = Nfa::all_initial_all_final(n, k2()).unwrap();
            assert!(a.is_trim());
        }
    }

    #[test]
    fn three_state_example_is_trim() {
        // 3 states, I = {1}, F = {3}, per-letter degree <= 2 but a state of
        // total degree 4.
        let a = fig_top3();
        assert!(a.is_trim());
    }

    /// 1-based: I={1}, F={3}, Δ = {(1,a,2),(1,a,3),(1,b,1),(2,a,3),(2,b,3),(2,a,1),(2,b,1)}.
    pub(crate) fn fig_top3() -> Nfa {
        let mut a = Nfa::new(3, Alphabet::new(2).unwrap()).unwrap();
        a.set_initial(0);
        a.set_final(2);
        a.add_transition(0, 0, 1);
        a.add_transition(0, 0, 2);
        a.add_transition(0, 1, 0);
        a.add_transition(1, 0, 2);
        a.add_transition(1, 1, 2);
        a.add_transition(1, 0, 0);
        a.add_transition(1, 1, 0);
        a
    }

    #[test]
    fn unreachable_state_not_trim() {
        // n=2, I={1}, F={1}, no transitions: state 2 unreachable.
        let mut a = Nfa::new(2, k2()).unwrap();
        a.set_initial(0);
        a.set_final(0);
        assert!(!a.is_trim());
    }

    #[test]
    fn toggles_are_involutions() {
        let a = cycle4();
        let b = a.toggle_initial(2).unwrap().toggle_initial(2).unwrap();
        assert_eq!(a, b);
        let b = a.toggle_final(0).unwrap().toggle_final(0).unwrap();
        assert_eq!(a, b);
        let b = a
            .toggle_transition(1, 0, 1)
            .unwrap()
            .toggle_transition(1, 0, 1)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn toggle_transition_adds_to_empty() {
        let a = Nfa::new(2, k2()).unwrap();
        let b = a.toggle_transition(0, 0, 1).unwrap();
        assert_eq!(b.transitions(), vec![(0, 0, 1)]);
    }

    #[test]
    fn toggle_out_of_range_errors() {
        let a = cycle4();
        assert!(a.toggle_initial(4).is_err());
        assert!(a.toggle_transition(0, 2, 1).is_err());
    }

    #[test]
    fn identity_permutation_fixes_automaton() {
        let a = cycle4();
        assert_eq!(a.apply_permutation(&Permutation::identity(4)).unwrap(), a);
    }

    #[test]
    fn permutation_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let phi = Permutation::random(4, &mut rng);
            let a = cycle4();
            let b = a.apply_permutation(&phi).unwrap();
            assert_eq!(b.apply_permutation(&phi.inverse()).unwrap(), a);
        }
    }

    #[test]
    fn isomorphic_pair_by_stated_bijection() {
        // φ(1)=2, φ(2)=3, φ(3)=4, φ(4)=1 (1-based) maps the first automaton
        // of the worked example onto the second.
        let a1 = cycle4();
        let phi = Permutation::from_mapping(vec![1, 2, 3, 0]).unwrap();
        let a2 = a1.apply_permutation(&phi).unwrap();
        // Expected target, built explicitly: I={2}, F={1},
        // Δ = {(2,a,3),(3,b,4),(4,b,3),(4,a,1),(1,b,1),(1,a,2)} in 1-based names.
        let mut want = Nfa::new(4, k2()).unwrap();
        want.set_initial(1);
        want.set_final(0);
        want.add_transition(1, 0, 2);
        want.add_transition(2, 1, 3);
        want.add_transition(3, 1, 2);
        want.add_transition(3, 0, 0);
        want.add_transition(0, 1, 0);
        want.add_transition(0, 0, 1);
        assert_eq!(a2, want);
    }

    #[test]
    fn trim_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mut a = Nfa::new(5, k2()).unwrap();
            a.set_initial_mask(rng.random_range(0..32));
            a.set_final_mask(rng.random_range(0..32));
            for p in 0..5 {
                for l in 0..2 {
                    for q in 0..5 {
                        if rng.random_bool(0.2) {
                            a.add_transition(p, l, q);
                        }
                    }
                }
            }
            let phi = Permutation::random(5, &mut rng);
            let b = a.apply_permutation(&phi).unwrap();
            assert_eq!(a.is_trim(), b.is_trim());
        }
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::from_mapping(vec![0, 0]).is_err());
        assert!(Permutation::from_mapping(vec![0, 2]).is_err());
        assert!(Permutation::from_mapping(vec![1, 0]).is_ok());
    }

    #[test]
    fn heap_enumeration_visits_all() {
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(4, |p| {
            seen.insert(p.to_vec());
            true
        });
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn accepts_simple_words() {
        let a = cycle4();
        // 1 -a-> 2 -b-> 3 -a-> 4(final)
        assert!(a.accepts(&[0, 1, 0]));
        assert!(!a.accepts(&[0]));
        assert!(!a.accepts(&[]));
    }
}

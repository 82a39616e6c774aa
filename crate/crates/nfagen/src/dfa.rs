//! Deterministic automata, subset construction and minimization, used by the
//! evaluation harness to measure minimal-DFA sizes of sampled NFAs.

use crate::automaton::{Alphabet, Nfa, StateSet};
use std::collections::HashMap;

/// A deterministic automaton with a partial transition function. Every state
/// is reachable from the initial state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dfa {
    n: usize,
    alphabet: Alphabet,
    initial: usize,
    finals: StateSet,
    /// `trans[p * k + a]`, `None` when undefined.
    trans: Vec<Option<usize>>,
}

impl Dfa {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &StateSet {
        &self.finals
    }

    pub fn step(&self, p: usize, a: usize) -> Option<usize> {
        self.trans[p * self.alphabet.size() + a]
    }

    pub fn is_complete(&self) -> bool {
        self.trans.iter().all(Option::is_some)
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut q = self.initial;
        for &a in word {
            match self.step(q, a) {
                Some(next) => q = next,
                None => return false,
            }
        }
        self.finals.contains(q)
    }

    /// View as an NFA (for isomorphism checks and serialization).
    pub fn to_nfa(&self) -> Nfa {
        let mut out = Nfa::new(self.n, self.alphabet).expect("positive size");
        out.set_initial(self.initial);
        for q in self.finals.iter() {
            out.set_final(q);
        }
        for p in 0..self.n {
            for a in self.alphabet.letters() {
                if let Some(q) = self.step(p, a) {
                    out.add_transition(p, a, q);
                }
            }
        }
        out
    }
}

/// Subset construction over reachable subsets only. The empty successor set
/// yields no transition (the result is partial); an automaton with no initial
/// state becomes the single dead state accepting nothing.
pub fn determinize(a: &Nfa) -> Dfa {
    let k = a.alphabet().size();
    let n = a.n();
    if a.initial().is_empty() {
        return Dfa {
            n: 1,
            alphabet: a.alphabet(),
            initial: 0,
            finals: StateSet::empty(1),
            trans: vec![None; k],
        };
    }
    let mut index: HashMap<StateSet, usize> = HashMap::new();
    let mut subsets: Vec<StateSet> = vec![a.initial().clone()];
    index.insert(a.initial().clone(), 0);
    let mut trans: Vec<Option<usize>> = Vec::new();
    let mut next = 0;
    while next < subsets.len() {
        let current = subsets[next].clone();
        for l in 0..k {
            let mut succ = StateSet::empty(n);
            for p in current.iter() {
                succ.union_with(a.successors(p, l));
            }
            if succ.is_empty() {
                trans.push(None);
                continue;
            }
            let id = match index.get(&succ) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    index.insert(succ.clone(), id);
                    subsets.push(succ);
                    id
                }
            };
            trans.push(Some(id));
        }
        next += 1;
    }
    let mut finals = StateSet::empty(subsets.len());
    for (i, s) in subsets.iter().enumerate() {
        if s.intersects(a.finals()) {
            finals.insert(i);
        }
    }
    Dfa {
        n: subsets.len(),
        alphabet: a.alphabet(),
        initial: 0,
        finals,
        trans,
    }
}

/// Result of minimization, carrying both size conventions.
#[derive(Clone, Debug)]
pub struct MinimizedDfa {
    /// The minimal complete automaton.
    pub dfa: Dfa,
    /// Whether completing the input required adding a sink.
    pub sink_added: bool,
    /// States of the minimal complete automaton: the size reported by the
    /// harness. When the input was already complete no sink was ever added,
    /// so this count carries no artificial state.
    pub reported_size: usize,
    /// States after dropping the dead class (if any): the trim count, kept in
    /// report metadata alongside the complete count.
    pub trim_size: usize,
}

/// Completes the automaton with a sink if needed, then Moore partition
/// refinement down to the minimal complete DFA for the same language.
pub fn minimize(d: &Dfa) -> MinimizedDfa {
    let k = d.alphabet.size();
    // completion
    let sink_added = !d.is_complete();
    let n = d.n + usize::from(sink_added);
    let sink = d.n;
    let mut trans: Vec<usize> = Vec::with_capacity(n * k);
    for p in 0..d.n {
        for a in 0..k {
            trans.push(d.step(p, a).unwrap_or(sink));
        }
    }
    if sink_added {
        for _ in 0..k {
            trans.push(sink);
        }
    }
    let is_final = |q: usize| q < d.n && d.finals.contains(q);

    // Moore refinement: split classes by (class, successor classes) signature.
    let mut class: Vec<usize> = (0..n).map(|q| usize::from(is_final(q))).collect();
    let mut class_count = if class.contains(&1) && class.contains(&0) {
        2
    } else {
        1
    };
    if class_count == 1 {
        class.fill(0);
    }
    loop {
        let mut signature_ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next_class = vec![0usize; n];
        for q in 0..n {
            let mut sig = Vec::with_capacity(k + 1);
            sig.push(class[q]);
            for a in 0..k {
                sig.push(class[trans[q * k + a]]);
            }
            let next_id = signature_ids.len();
            let id = *signature_ids.entry(sig).or_insert(next_id);
            next_class[q] = id;
        }
        let new_count = signature_ids.len();
        class = next_class;
        if new_count == class_count {
            break;
        }
        class_count = new_count;
    }

    // quotient automaton, restricted to classes reachable from the initial one
    let mut repr_trans = vec![usize::MAX; class_count * k];
    let mut repr_final = vec![false; class_count];
    for q in 0..n {
        let c = class[q];
        repr_final[c] = is_final(q);
        for a in 0..k {
            repr_trans[c * k + a] = class[trans[q * k + a]];
        }
    }
    let start = class[d.initial];
    let mut order: Vec<usize> = Vec::new();
    let mut seen = vec![false; class_count];
    let mut queue = std::collections::VecDeque::from([start]);
    seen[start] = true;
    while let Some(c) = queue.pop_front() {
        order.push(c);
        for a in 0..k {
            let t = repr_trans[c * k + a];
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    let mut renumber = vec![usize::MAX; class_count];
    for (i, &c) in order.iter().enumerate() {
        renumber[c] = i;
    }
    let m = order.len();
    let mut out_trans = vec![None; m * k];
    let mut finals = StateSet::empty(m);
    for &c in &order {
        let i = renumber[c];
        if repr_final[c] {
            finals.insert(i);
        }
        for a in 0..k {
            out_trans[i * k + a] = Some(renumber[repr_trans[c * k + a]]);
        }
    }
    let dfa = Dfa {
        n: m,
        alphabet: d.alphabet,
        initial: renumber[start],
        finals,
        trans: out_trans,
    };

    // dead class: states from which no final state is reachable (at most one
    // in a minimal complete DFA)
    let dead = (0..m).filter(|&q| !can_reach_final(&dfa, q)).count();
    MinimizedDfa {
        reported_size: m,
        trim_size: m - dead,
        sink_added,
        dfa,
    }
}

fn can_reach_final(d: &Dfa, from: usize) -> bool {
    let mut seen = StateSet::empty(d.n);
    let mut stack = vec![from];
    seen.insert(from);
    while let Some(q) = stack.pop() {
        if d.finals.contains(q) {
            return true;
        }
        for a in d.alphabet.letters() {
            if let Some(t) = d.step(q, a) {
                if !seen.contains(t) {
                    seen.insert(t);
                    stack.push(t);
                }
            }
        }
    }
    false
}

/// Reported minimal-DFA size of an NFA's language, via subset construction
/// and minimization.
pub fn minimal_dfa_size(a: &Nfa) -> MinimizedDfa {
    minimize(&determinize(a))
}

/// Do `a` and `b` accept the same words up to length `max_len`? Breadth-first
/// word enumeration; the independent language oracle for the constructions
/// above.
pub fn bounded_language_equal(a: &Nfa, d: &Dfa, max_len: usize) -> bool {
    let k = a.alphabet().size();
    let mut word = Vec::new();
    bounded_eq_rec(a, d, &mut word, k, max_len)
}

fn bounded_eq_rec(a: &Nfa, d: &Dfa, word: &mut Vec<usize>, k: usize, budget: usize) -> bool {
    if a.accepts(word) != d.accepts(word) {
        return false;
    }
    if budget == 0 {
        return true;
    }
    for l in 0..k {
        word.push(l);
        let ok = bounded_eq_rec(a, d, word, k, budget - 1);
        word.pop();
        if !ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::are_isomorphic;
    use crate::testutil::{cycle4, random_nfa};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn deterministic_complete_trim_input_is_isomorphic_to_its_determinization() {
        // a complete deterministic trim automaton: subset construction only
        // renames its states
        let mut a = Nfa::new(3, k2()).unwrap();
        a.set_initial(0);
        a.set_final(2);
        a.add_transition(0, 0, 1);
        a.add_transition(0, 1, 0);
        a.add_transition(1, 0, 2);
        a.add_transition(1, 1, 0);
        a.add_transition(2, 0, 2);
        a.add_transition(2, 1, 1);
        assert!(a.is_trim());
        let d = determinize(&a);
        assert_eq!(d.n(), 3);
        assert!(are_isomorphic(&a, &d.to_nfa()).is_some());
    }

    #[test]
    fn empty_initial_yields_single_dead_state() {
        let a = Nfa::new(3, k2()).unwrap();
        let d = determinize(&a);
        assert_eq!(d.n(), 1);
        assert!(d.finals().is_empty());
        assert!(!d.accepts(&[]));
        assert!(!d.accepts(&[0, 1]));
    }

    #[test]
    fn determinization_preserves_bounded_language() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let a = random_nfa(5, 2, 0.25, &mut rng);
            let d = determinize(&a);
            assert!(bounded_language_equal(&a, &d, 10), "{a:?}");
        }
    }

    #[test]
    fn minimize_preserves_bounded_language() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..50 {
            let a = random_nfa(5, 2, 0.25, &mut rng);
            let min = minimal_dfa_size(&a);
            assert!(
                bounded_language_equal(&a, &min.dfa, 10),
                "{a:?} -> {:?}",
                min.dfa
            );
        }
    }

    #[test]
    fn minimal_input_keeps_its_size() {
        // the 3-state cyclic DFA above is already minimal and complete
        let mut a = Nfa::new(3, k2()).unwrap();
        a.set_initial(0);
        a.set_final(2);
        a.add_transition(0, 0, 1);
        a.add_transition(0, 1, 0);
        a.add_transition(1, 0, 2);
        a.add_transition(1, 1, 0);
        a.add_transition(2, 0, 2);
        a.add_transition(2, 1, 1);
        let min = minimize(&determinize(&a));
        assert_eq!(min.reported_size, 3);
        assert!(!min.sink_added);
        assert_eq!(min.trim_size, 3);
    }

    #[test]
    fn empty_language_minimizes_to_one_state() {
        let mut a = Nfa::new(2, k2()).unwrap();
        a.set_initial(0);
        // no finals: empty language
        let min = minimal_dfa_size(&a);
        assert_eq!(min.reported_size, 1);
        assert_eq!(min.trim_size, 0);
    }

    #[test]
    fn sink_counts_when_language_has_dead_prefixes() {
        // language {a}: minimal complete DFA needs start, accept and dead states
        let mut a = Nfa::new(2, k2()).unwrap();
        a.set_initial(0);
        a.set_final(1);
        a.add_transition(0, 0, 1);
        let min = minimal_dfa_size(&a);
        assert!(min.sink_added);
        assert_eq!(min.reported_size, 3);
        assert_eq!(min.trim_size, 2);
    }

    #[test]
    fn idempotent_minimization() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..30 {
            let a = random_nfa(4, 2, 0.3, &mut rng);
            let first = minimal_dfa_size(&a);
            let second = minimize(&first.dfa);
            assert_eq!(first.reported_size, second.reported_size);
        }
    }

    #[test]
    fn cycle4_language_sanity() {
        let a = cycle4();
        let d = determinize(&a);
        assert!(d.accepts(&[0, 1, 0]));
        assert!(!d.accepts(&[0, 1]));
        assert!(bounded_language_equal(&a, &d, 12));
    }

    /// Independent route to the minimal size: the minimal complete DFA has
    /// one state per distinct residual language among the reachable states
    /// of the sink-completed subset automaton, and residuals of an m-state
    /// complete DFA are separated by words of length < m.
    fn residual_count(d: &Dfa) -> usize {
        let k = d.alphabet().size();
        let total = d.n() + 1;
        let sink = d.n();
        let step = |q: usize, a: usize| -> usize {
            if q == sink {
                sink
            } else {
                d.step(q, a).unwrap_or(sink)
            }
        };
        let is_final = |q: usize| q < d.n() && d.finals().contains(q);
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut all_words = Vec::new();
        for _ in 0..=total {
            all_words.extend(words.iter().cloned());
            if all_words.len() > 1 << 15 {
                break;
            }
            words = words
                .iter()
                .flat_map(|w| {
                    (0..k).map(move |l| {
                        let mut w2 = w.clone();
                        w2.push(l);
                        w2
                    })
                })
                .collect();
        }
        let signature = |q0: usize| -> Vec<bool> {
            all_words
                .iter()
                .map(|w| is_final(w.iter().fold(q0, |q, &l| step(q, l))))
                .collect()
        };
        let mut reach = vec![false; total];
        reach[0] = true;
        let mut stack = vec![0usize];
        while let Some(q) = stack.pop() {
            for l in 0..k {
                let t = step(q, l);
                if !reach[t] {
                    reach[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut sigs: Vec<Vec<bool>> = Vec::new();
        for q in 0..total {
            if reach[q] {
                let s = signature(q);
                if !sigs.contains(&s) {
                    sigs.push(s);
                }
            }
        }
        sigs.len()
    }

    #[test]
    fn minimize_size_matches_residual_language_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for trial in 0..150 {
            let n = 3 + trial % 5;
            let a = random_nfa(n, 2, 0.2 + 0.05 * (trial % 4) as f64, &mut rng);
            let d = determinize(&a);
            let min = minimize(&d);
            assert_eq!(
                residual_count(&d),
                min.reported_size,
                "size mismatch for {a:?}"
            );
        }
    }
}

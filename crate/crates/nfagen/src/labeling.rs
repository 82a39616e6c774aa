//! Isomorphism-invariant state fingerprints and the induced partition.
//!
//! A labeling is a computable map from states to some ordered domain such
//! that any isomorphism preserves it. We combine seven of them into one
//! fingerprint per state:
//!
//! 1. whether the state is initial,
//! 2. whether it is final,
//! 3. whether it is both,
//! 4. per-letter outgoing transition counts,
//! 5. per-letter incoming transition counts,
//! 6. the shortlex-minimal word leading from the state to a final state,
//! 7. the shortlex-minimal word leading from an initial state to the state.
//!
//! "Minimal word" uses the shortlex order (shorter first, ties broken
//! lexicographically): plain lexicographic order over unbounded words is not
//! well founded, while shortlex is computable by breadth-first search and is
//! preserved by isomorphism, which is all the search needs. The word
//! components are `None` for states that reach no final state or are not
//! reachable, so non-trim automata are handled too.
//!
//! Grouping states by fingerprint partitions the state set; automorphisms
//! must preserve the cells, which is what makes the backtracking searches in
//! [`crate::iso`] fast in practice (the cells are mostly singletons).

use crate::automaton::Nfa;
use std::collections::BTreeMap;

/// Per-state fingerprint, ordered and hashable so it can key a cell map.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LabelVector {
    pub is_initial: bool,
    pub is_final: bool,
    pub is_initial_and_final: bool,
    pub out_degrees: Vec<u16>,
    pub in_degrees: Vec<u16>,
    pub min_word_to_final: Option<Vec<u8>>,
    pub min_word_from_initial: Option<Vec<u8>>,
}

/// Shortlex-minimal words from each state to a final state (`ε` for final
/// states). Words are letter ranks.
fn min_words_to_final(a: &Nfa) -> Vec<Option<Vec<u8>>> {
    let n = a.n();
    let k = a.alphabet().size();
    let mut words: Vec<Option<Vec<u8>>> = vec![None; n];
    for q in a.finals().iter() {
        words[q] = Some(Vec::new());
    }
    for level in 1..=n {
        let prev = level - 1;
        let mut added = false;
        for q in 0..n {
            if words[q].is_some() {
                continue;
            }
            // smallest letter with a successor labeled at the previous level,
            // then the smallest successor word; all candidates have equal
            // length so lexicographic comparison of suffixes decides.
            let mut best: Option<Vec<u8>> = None;
            'letters: for l in 0..k {
                for s in a.successors(q, l).iter() {
                    if let Some(w) = &words[s] {
                        if w.len() == prev {
                            match &best {
                                Some(b) if *b <= *w => {}
                                _ => best = Some(w.clone()),
                            }
                        }
                    }
                }
                if let Some(b) = best.take() {
                    let mut word = Vec::with_capacity(level);
                    word.push(l as u8);
                    word.extend_from_slice(&b);
                    words[q] = Some(word);
                    added = true;
                    break 'letters;
                }
            }
        }
        if !added {
            break;
        }
    }
    words
}

/// Shortlex-minimal words from an initial state to each state (`ε` for
/// initial states).
fn min_words_from_initial(a: &Nfa) -> Vec<Option<Vec<u8>>> {
    let n = a.n();
    let k = a.alphabet().size();
    let mut words: Vec<Option<Vec<u8>>> = vec![None; n];
    for q in a.initial().iter() {
        words[q] = Some(Vec::new());
    }
    for level in 1..=n {
        let prev = level - 1;
        let mut next: Vec<Option<Vec<u8>>> = vec![None; n];
        for p in 0..n {
            let w = match &words[p] {
                Some(w) if w.len() == prev => w,
                _ => continue,
            };
            for l in 0..k {
                for q in a.successors(p, l).iter() {
                    if words[q].is_some() {
                        continue;
                    }
                    // candidate word w·l; keep the shortlex-smallest
                    let better = match &next[q] {
                        None => true,
                        Some(cur) => {
                            let cand_last = l as u8;
                            let (cur_prefix, cur_last) = (&cur[..prev], cur[prev]);
                            (w.as_slice(), cand_last) < (cur_prefix, cur_last)
                        }
                    };
                    if better {
                        let mut word = Vec::with_capacity(level);
                        word.extend_from_slice(w);
                        word.push(l as u8);
                        next[q] = Some(word);
                    }
                }
            }
        }
        let mut added = false;
        for q in 0..n {
            if let Some(w) = next[q].take() {
                words[q] = Some(w);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    words
}

/// Fingerprints for every state of `a`.
pub fn label_all(a: &Nfa) -> Vec<LabelVector> {
    let n = a.n();
    let k = a.alphabet().size();
    let mut in_degrees = vec![vec![0u16; k]; n];
    for p in 0..n {
        for l in 0..k {
            for q in a.successors(p, l).iter() {
                in_degrees[q][l] += 1;
            }
        }
    }
    let to_final = min_words_to_final(a);
    let from_initial = min_words_from_initial(a);
    (0..n)
        .map(|q| {
            let is_initial = a.initial().contains(q);
            let is_final = a.finals().contains(q);
            LabelVector {
                is_initial,
                is_final,
                is_initial_and_final: is_initial && is_final,
                out_degrees: (0..k).map(|l| a.out_degree_letter(q, l) as u16).collect(),
                in_degrees: std::mem::take(&mut in_degrees[q]),
                min_word_to_final: to_final[q].clone(),
                min_word_from_initial: from_initial[q].clone(),
            }
        })
        .collect()
}

/// Fingerprint of a single state.
pub fn label_state(a: &Nfa, q: usize) -> LabelVector {
    label_all(a).swap_remove(q)
}

/// The partition of `0..n` induced by fingerprint equality. Cells are kept in
/// increasing fingerprint order, states sorted within each cell, so the
/// partition of two isomorphic automata lines up cell by cell.
#[derive(Clone, Debug)]
pub struct Partition {
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn from_labels(labels: &[LabelVector]) -> Partition {
        let mut groups: BTreeMap<&LabelVector, Vec<usize>> = BTreeMap::new();
        for (q, lab) in labels.iter().enumerate() {
            groups.entry(lab).or_default().push(q);
        }
        let cells: Vec<Vec<usize>> = groups.into_values().collect();
        let mut cell_of = vec![0; labels.len()];
        for (i, cell) in cells.iter().enumerate() {
            for &q in cell {
                cell_of[q] = i;
            }
        }
        Partition { cells, cell_of }
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_of(&self, q: usize) -> usize {
        self.cell_of[q]
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.iter().all(|c| c.len() == 1)
    }

    /// Number of cell-preserving bijections, saturating at `u128::MAX`.
    pub fn search_space(&self) -> u128 {
        let mut total: u128 = 1;
        for cell in &self.cells {
            for i in 2..=cell.len() as u128 {
                total = total.saturating_mul(i);
            }
        }
        total
    }
}

/// Convenience wrapper: fingerprints plus their partition.
pub fn partition_by_labels(a: &Nfa) -> (Vec<LabelVector>, Partition) {
    let labels = label_all(a);
    let partition = Partition::from_labels(&labels);
    (labels, partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{Alphabet, Nfa, Permutation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    use crate::testutil::{cycle4, random_nfa};

    #[test]
    fn final_state_has_empty_word() {
        let a = cycle4();
        let lab = label_state(&a, 3);
        assert_eq!(lab.min_word_to_final, Some(vec![]));
        assert!(lab.is_final);
    }

    #[test]
    fn cycle4_state3_fingerprint() {
        // state 3 (1-based): out-degrees a:1, b:1; minimal word to a final state is "a".
        let lab = label_state(&cycle4(), 2);
        assert_eq!(lab.out_degrees, vec![1, 1]);
        assert_eq!(lab.min_word_to_final, Some(vec![0]));
        assert_eq!(lab.min_word_from_initial, Some(vec![0, 1]));
    }

    #[test]
    fn unreachable_state_has_no_word() {
        let mut a = Nfa::new(2, k2()).unwrap();
        a.set_initial(0);
        a.set_final(0);
        let labs = label_all(&a);
        assert_eq!(labs[1].min_word_from_initial, None);
        assert_eq!(labs[1].min_word_to_final, None);
        assert_eq!(labs[0].min_word_from_initial, Some(vec![]));
    }

    #[test]
    fn shortlex_prefers_shorter_then_smaller() {
        // two routes to the final state: "b" (length 1) beats "aa"; and among
        // length-1 words "a" beats "b".
        let mut a = Nfa::new(4, k2()).unwrap();
        a.set_initial(0);
        a.set_final(3);
        a.add_transition(0, 1, 3); // b
        a.add_transition(0, 0, 1); // a
        a.add_transition(1, 0, 3); // a
        let labs = label_all(&a);
        assert_eq!(labs[0].min_word_to_final, Some(vec![1]));

        let mut b = Nfa::new(3, k2()).unwrap();
        b.set_initial(0);
        b.set_final(2);
        b.add_transition(0, 1, 2);
        b.add_transition(0, 0, 2);
        assert_eq!(label_all(&b)[0].min_word_to_final, Some(vec![0]));
    }

    #[test]
    fn labels_are_isomorphism_invariant() {
        // label(φ(A), φ(q)) = label(A, q): the defining property, on random
        // automata and permutations.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..1000 {
            let n = 1 + (trial % 6);
            let a = random_nfa(n, 2, 0.25, &mut rng);
            let phi = Permutation::random(n, &mut rng);
            let b = a.apply_permutation(&phi).unwrap();
            let la = label_all(&a);
            let lb = label_all(&b);
            for q in 0..n {
                assert_eq!(la[q], lb[phi.apply(q)], "state {q} of {a:?} under {phi:?}");
            }
        }
    }

    #[test]
    fn partition_cells_cover_and_are_disjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = random_nfa(5, 2, 0.3, &mut rng);
            let (_, part) = partition_by_labels(&a);
            let mut seen = vec![false; 5];
            for cell in part.cells() {
                for &q in cell {
                    assert!(!seen[q]);
                    seen[q] = true;
                    assert_eq!(
                        part.cell_of(q),
                        part.cells().iter().position(|c| c.contains(&q)).unwrap()
                    );
                }
            }
            assert!(seen.into_iter().all(|b| b));
        }
    }

    #[test]
    fn all_states_equivalent_in_symmetric_automaton() {
        let a = Nfa::all_initial_all_final(4, k2()).unwrap();
        let (_, part) = partition_by_labels(&a);
        assert_eq!(part.cells().len(), 1);
        assert_eq!(part.search_space(), 24);
    }
}

//! Property tests for the structural invariants: document round-trips,
//! toggle involutions, and permutation invariance of the isomorphism
//! machinery.

use nfagen::format::{parse_automaton, serialize_automaton};
use nfagen::iso::{are_isomorphic, canonical_form, count_automorphisms};
use nfagen::{Alphabet, Nfa, Permutation};
use proptest::prelude::*;

#[derive(Clone, Debug)]
struct ArbNfa {
    nfa: Nfa,
}

fn arb_nfa(max_n: usize) -> impl Strategy<Value = ArbNfa> {
    (1..=max_n, 2..=3usize).prop_flat_map(|(n, k)| {
        let bits = k * n * n;
        (
            Just(n),
            Just(k),
            0u32..(1 << n),
            0u32..(1 << n),
            proptest::collection::vec(any::<bool>(), bits),
        )
            .prop_map(|(n, k, i_mask, f_mask, delta)| {
                let mut nfa = Nfa::new(n, Alphabet::new(k).unwrap()).unwrap();
                for q in 0..n {
                    if i_mask & (1 << q) != 0 {
                        nfa.set_initial(q);
                    }
                    if f_mask & (1 << q) != 0 {
                        nfa.set_final(q);
                    }
                }
                let mut idx = 0;
                for p in 0..n {
                    for a in 0..k {
                        for q in 0..n {
                            if delta[idx] {
                                nfa.add_transition(p, a, q);
                            }
                            idx += 1;
                        }
                    }
                }
                ArbNfa { nfa }
            })
    })
}

fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just(()).prop_perturb(move |(), mut rng| {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            map.swap(i, j);
        }
        Permutation::from_mapping(map).unwrap()
    })
}

proptest! {
    #[test]
    fn document_roundtrip_is_identity(a in arb_nfa(5)) {
        let text = serialize_automaton(&a.nfa);
        let (parsed, warnings) = parse_automaton(&text).unwrap();
        prop_assert_eq!(&parsed, &a.nfa);
        prop_assert_eq!(warnings.duplicate_transitions, 0);
        // and the rendering is canonical
        prop_assert_eq!(serialize_automaton(&parsed), text);
    }

    #[test]
    fn toggles_are_involutions(a in arb_nfa(5), q in 0..5usize, l in 0..2usize, p in 0..5usize) {
        let n = a.nfa.n();
        let (q, p) = (q % n, p % n);
        let back = a.nfa
            .toggle_initial(q).unwrap()
            .toggle_initial(q).unwrap()
            .toggle_final(p).unwrap()
            .toggle_final(p).unwrap()
            .toggle_transition(p, l, q).unwrap()
            .toggle_transition(p, l, q).unwrap();
        prop_assert_eq!(back, a.nfa);
    }

    #[test]
    fn permuting_preserves_structure(a in arb_nfa(5).prop_flat_map(|a| {
        let n = a.nfa.n();
        (Just(a), arb_perm(n))
    })) {
        let (a, phi) = a;
        let b = a.nfa.apply_permutation(&phi).unwrap();
        prop_assert_eq!(a.nfa.is_trim(), b.is_trim());
        prop_assert_eq!(count_automorphisms(&a.nfa), count_automorphisms(&b));
        prop_assert_eq!(canonical_form(&a.nfa).unwrap(), canonical_form(&b).unwrap());
        let witness = are_isomorphic(&a.nfa, &b).expect("isomorphic by construction");
        prop_assert_eq!(a.nfa.apply_permutation(&witness).unwrap(), b);
    }
}

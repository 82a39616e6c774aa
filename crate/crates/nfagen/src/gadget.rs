//! Tailed automata that reduce automorphism counting to isomorphism testing.
//!
//! Given a trim automaton `A` on states `Q`, a pinned subset `Q'` and a
//! distinguished state `r ∉ Q'`, the gadget attaches to every state a fresh
//! dead-end chain of transitions on a fixed letter (a "tail"):
//!
//! * states in `Q'` get pairwise distinct tail lengths `|Q| + 1 + σ(p)`
//!   (σ ranks the pinned states),
//! * `r` gets the unique longest tail `ℓ = |Q| + |Q'| + 2`,
//! * every other state gets length `|Q| + 1`.
//!
//! Isomorphisms preserve trim states and tail lengths, so an isomorphism
//! between two gadgets restricts to an automorphism of `A` fixing `Q'`
//! pointwise and mapping one distinguished state to the other. That turns
//! "is there an automorphism fixing `Q'` with `φ(q) = q'`" into a plain
//! isomorphism test, and turns orbit sizes (hence `|Aut(A)|` as their
//! product) into polynomially many such tests.

use crate::automaton::Nfa;
use crate::error::{Error, Result};
use crate::iso::are_isomorphic;

/// Recipe for one tailed automaton.
#[derive(Clone, Debug)]
pub struct GadgetSpec<'a> {
    base: &'a Nfa,
    /// Pinned states, sorted ascending. σ is their 1-based rank in this
    /// order (any fixed bijection works; increasing order is the default).
    pinned: Vec<usize>,
    r: usize,
    /// Tail letter; any fixed letter works.
    tail_letter: usize,
}

impl<'a> GadgetSpec<'a> {
    pub fn new(base: &'a Nfa, mut pinned: Vec<usize>, r: usize) -> Result<Self> {
        pinned.sort_unstable();
        pinned.dedup();
        if pinned.contains(&r) {
            return Err(Error::InvalidGadget(format!(
                "distinguished state {r} is pinned"
            )));
        }
        if r >= base.n() || pinned.iter().any(|&p| p >= base.n()) {
            return Err(Error::InvalidGadget("state out of range".into()));
        }
        if !base.is_trim() {
            return Err(Error::NotTrim(
                "gadget reduction requires a trim base automaton".into(),
            ));
        }
        Ok(GadgetSpec {
            base,
            pinned,
            r,
            tail_letter: 0,
        })
    }

    /// Tail length (number of fresh states) hung off state `p`.
    pub fn tail_len(&self, p: usize) -> usize {
        let n = self.base.n();
        if p == self.r {
            self.ell()
        } else if let Ok(idx) = self.pinned.binary_search(&p) {
            n + 1 + (idx + 1) // σ(p) = rank, 1-based
        } else {
            n + 1
        }
    }

    /// `ℓ = |Q| + |Q'| + 2`, the longest tail.
    pub fn ell(&self) -> usize {
        self.base.n() + self.pinned.len() + 2
    }
}

/// Builds the tailed automaton. Base states keep their indices; tail states
/// follow, grouped by owner in state order.
pub fn build_gadget(spec: &GadgetSpec) -> Nfa {
    let base = spec.base;
    let n = base.n();
    let total: usize = n + (0..n).map(|p| spec.tail_len(p)).sum::<usize>();
    let mut out = Nfa::new(total, base.alphabet()).expect("positive size");
    for q in base.initial().iter() {
        out.set_initial(q);
    }
    for q in base.finals().iter() {
        out.set_final(q);
    }
    for (p, a, q) in base.transitions() {
        out.add_transition(p, a, q);
    }
    let mut next = n;
    for p in 0..n {
        let len = spec.tail_len(p);
        // p → (p,1) → (p,2) → … → (p,len), all on the tail letter
        let mut prev = p;
        for _ in 0..len {
            out.add_transition(prev, spec.tail_letter, next);
            prev = next;
            next += 1;
        }
    }
    debug_assert_eq!(next, total);
    out
}

/// `|Aut(A)|` computed purely through gadget isomorphism tests.
///
/// Unpinning states one at a time, the orbit size of state `i` under the
/// automorphisms fixing `{i+1, …, n-1}` is the number of candidates `j <= i`
/// whose gadget is isomorphic to the gadget of `i`; the group order is the
/// product of these orbit sizes.
pub fn count_automorphisms_via_iso(a: &Nfa) -> Result<u128> {
    if !a.is_trim() {
        return Err(Error::NotTrim(
            "gadget reduction requires a trim automaton".into(),
        ));
    }
    let n = a.n();
    let mut total: u128 = 1;
    for i in 0..n {
        let pinned: Vec<usize> = (i + 1..n).collect();
        let gadget_i = build_gadget(&GadgetSpec::new(a, pinned.clone(), i)?);
        let mut d: u128 = 0;
        for j in 0..=i {
            let gadget_j = if j == i {
                gadget_i.clone()
            } else {
                build_gadget(&GadgetSpec::new(a, pinned.clone(), j)?)
            };
            if are_isomorphic(&gadget_i, &gadget_j).is_some() {
                d += 1;
            }
        }
        debug_assert!(d >= 1);
        total = total.saturating_mul(d);
    }
    Ok(total)
}

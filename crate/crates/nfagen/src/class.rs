//! Automaton families and class membership predicates.
//!
//! Four families are supported, each optionally restricted to a single
//! pinned initial state (the "bullet" variant):
//!
//! * `All` — every automaton on `n` states;
//! * `Trim` — accessible and co-accessible automata;
//! * `DegTotal(m)` — trim automata with at most `m` outgoing transitions per
//!   state;
//! * `DegPerLetter(m)` — trim automata with at most `m` outgoing transitions
//!   per state *and letter*.
//!
//! `DegPerLetter(m)` is defined standalone (trim plus the per-letter bound),
//! not as a subclass of `DegTotal(m)`: a state may carry up to `m` successors
//! on each letter, so `DegTotal(m) ⊆ DegPerLetter(m) ⊆ Trim ⊆ All`.

use crate::automaton::Nfa;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The family of a class, with the degree bound baked in where it applies.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Family {
    All,
    Trim,
    /// Trim, at most `m` outgoing transitions per state.
    DegTotal(usize),
    /// Trim, at most `m` outgoing transitions per state and letter.
    DegPerLetter(usize),
}

/// A class of automata: a family plus the optional single-initial restriction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ClassSpec {
    family: Family,
    bullet: bool,
}

impl ClassSpec {
    /// Degree bounds must satisfy `m >= 2`; smaller bounds break the
    /// irreducibility argument for the chain moves.
    pub fn new(family: Family, bullet: bool) -> Result<Self> {
        match family {
            Family::DegTotal(m) | Family::DegPerLetter(m) if m < 2 => Err(Error::InvalidClassSpec(
                format!("degree bound must be >= 2, got {m}"),
            )),
            _ => Ok(ClassSpec { family, bullet }),
        }
    }

    pub fn all() -> Self {
        ClassSpec {
            family: Family::All,
            bullet: false,
        }
    }

    pub fn trim() -> Self {
        ClassSpec {
            family: Family::Trim,
            bullet: false,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn bullet(&self) -> bool {
        self.bullet
    }

    pub fn with_bullet(self, bullet: bool) -> Self {
        ClassSpec { bullet, ..self }
    }

    /// Class membership. The bullet restriction pins the initial set to
    /// exactly `{1}` (state 0 internally).
    pub fn contains(&self, a: &Nfa) -> bool {
        if self.bullet {
            let init = a.initial();
            if !(init.contains(0) && init.count() == 1) {
                return false;
            }
        }
        match self.family {
            Family::All => true,
            Family::Trim => a.is_trim(),
            Family::DegTotal(m) => (0..a.n()).all(|p| a.out_degree(p) <= m) && a.is_trim(),
            Family::DegPerLetter(m) => {
                (0..a.n()).all(|p| {
                    a.alphabet()
                        .letters()
                        .all(|l| a.out_degree_letter(p, l) <= m)
                }) && a.is_trim()
            }
        }
    }

    /// Short human-readable name, e.g. `trim•` or `deg2`.
    pub fn label(&self) -> String {
        let base = match self.family {
            Family::All => "all".to_string(),
            Family::Trim => "trim".to_string(),
            Family::DegTotal(m) => format!("deg{m}"),
            Family::DegPerLetter(m) => format!("deg-letter{m}"),
        };
        if self.bullet {
            format!("{base}\u{2022}")
        } else {
            base
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{Alphabet, Nfa};

    fn k2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    /// Single-initial 3-state automaton with a per-letter degree of at most 2
    /// but one state of total degree 4 (so in DegPerLetter(2) but not DegTotal(2..=3)).
    fn top3() -> Nfa {
        let mut a = Nfa::new(3, k2()).unwrap();
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

    /// I = {1,3}: in the plain trim classes but no bullet class.
    fn bottom3() -> Nfa {
        let mut a = Nfa::new(3, k2()).unwrap();
        a.set_initial(0);
        a.set_initial(2);
        a.set_final(2);
        a.add_transition(0, 0, 1);
        a.add_transition(0, 0, 0);
        a.add_transition(1, 1, 2);
        a.add_transition(1, 1, 0);
        a
    }

    #[test]
    fn m_guard() {
        assert!(ClassSpec::new(Family::DegTotal(1), false).is_err());
        assert!(ClassSpec::new(Family::DegTotal(2), false).is_ok());
        assert!(ClassSpec::new(Family::DegPerLetter(1), true).is_err());
    }

    #[test]
    fn single_initial_example_memberships() {
        let a = top3();
        let deg_letter2 = ClassSpec::new(Family::DegPerLetter(2), true).unwrap();
        let deg4 = ClassSpec::new(Family::DegTotal(4), true).unwrap();
        let trim_bullet = ClassSpec::new(Family::Trim, true).unwrap();
        assert!(deg_letter2.contains(&a));
        assert!(deg4.contains(&a));
        assert!(trim_bullet.contains(&a));
        // total degree 4 at one state
        assert!(!ClassSpec::new(Family::DegTotal(3), true)
            .unwrap()
            .contains(&a));
    }

    #[test]
    fn two_initials_fail_bullet_classes() {
        let a = bottom3();
        assert!(ClassSpec::trim().contains(&a));
        assert!(ClassSpec::new(Family::DegTotal(2), false)
            .unwrap()
            .contains(&a));
        assert!(ClassSpec::new(Family::DegPerLetter(2), false)
            .unwrap()
            .contains(&a));
        for family in [
            Family::All,
            Family::Trim,
            Family::DegTotal(2),
            Family::DegPerLetter(2),
        ] {
            assert!(!ClassSpec::new(family, true).unwrap().contains(&a));
        }
    }

    #[test]
    fn per_letter_bound_violation() {
        // one state with 3 outgoing a-transitions
        let mut a = Nfa::new(3, k2()).unwrap();
        a.set_initial(0);
        a.set_final(1);
        a.set_final(2);
        a.set_final(0);
        a.add_transition(0, 0, 0);
        a.add_transition(0, 0, 1);
        a.add_transition(0, 0, 2);
        assert!(a.is_trim());
        assert!(!ClassSpec::new(Family::DegPerLetter(2), false)
            .unwrap()
            .contains(&a));
        assert!(ClassSpec::new(Family::DegPerLetter(3), false)
            .unwrap()
            .contains(&a));
    }

    #[test]
    fn total_bound_implies_per_letter_bound_small_enumeration() {
        // DegTotal(m) ⊆ DegPerLetter(m), checked exhaustively for n <= 3, k = 2.
        let k = k2();
        for n in 1..=3usize {
            let deg = ClassSpec::new(Family::DegTotal(2), false).unwrap();
            let degl = ClassSpec::new(Family::DegPerLetter(2), false).unwrap();
            let bits = 2 * n * n;
            let mut scratch = Nfa::new(n, k).unwrap();
            for i_mask in 0..1u32 << n {
                for f_mask in 0..1u32 << n {
                    for d_mask in 0..1u64 << bits {
                        scratch.set_initial_mask(i_mask);
                        scratch.set_final_mask(f_mask);
                        let mut dm = d_mask;
                        for p in 0..n {
                            for a in 0..2 {
                                for q in 0..n {
                                    let bit = dm & 1 != 0;
                                    dm >>= 1;
                                    if scratch.has_transition(p, a, q) != bit {
                                        scratch.toggle_transition_in_place(p, a, q);
                                    }
                                }
                            }
                        }
                        if deg.contains(&scratch) {
                            assert!(degl.contains(&scratch));
                        }
                    }
                }
            }
        }
    }
}

//! Exhaustive enumeration of small classes and the resulting census of
//! isomorphism classes.
//!
//! Enumeration walks every `(I, F, Δ)` bitmask combination in lexicographic
//! order (`I` outermost, then `F`, then `Δ`; the transition bit for
//! `(p, a, q)` is `(p·k + a)·n + q`) and keeps the automata that belong to
//! the class. The census groups them by canonical form and cross-checks the
//! fundamental size identity: a labeled isomorphism class has exactly
//! `n! / |Aut|` members. A violation is a hard error, because it would
//! falsify the isomorphism machinery that everything else relies on.

use crate::automaton::{Alphabet, Nfa};
use crate::class::ClassSpec;
use crate::error::{Error, Result};
use crate::iso::{canonical_form, count_automorphisms, CanonicalForm};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Enumeration guard: at most `k·n² + 2n <= 26` free bits (~6.7·10⁷ raw
/// candidates).
pub fn enumeration_guard(n: usize, k: usize) -> Result<()> {
    let bits = k * n * n + 2 * n;
    if bits > 26 {
        return Err(Error::GuardExceeded(format!(
            "enumeration needs {bits} bits (k·n² + 2n), limit is 26"
        )));
    }
    Ok(())
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Visits every automaton of the class exactly once, in lexicographic bitmask
/// order. The visitor borrows a scratch automaton; clone to keep it.
pub fn for_each_in_class<F: FnMut(&Nfa)>(
    class: &ClassSpec,
    n: usize,
    alphabet: Alphabet,
    mut f: F,
) -> Result<()> {
    enumeration_guard(n, alphabet.size())?;
    let k = alphabet.size();
    let i_masks: Vec<u32> = if class.bullet() {
        vec![1]
    } else {
        (0..1u32 << n).collect()
    };
    let mut scratch = Nfa::new(n, alphabet)?;
    for &i_mask in &i_masks {
        for f_mask in 0..1u32 << n {
            for d_mask in 0..1u64 << (k * n * n) {
                scratch.set_initial_mask(i_mask);
                scratch.set_final_mask(f_mask);
                let mut bits = d_mask;
                for p in 0..n {
                    for a in 0..k {
                        for q in 0..n {
                            let want = bits & 1 != 0;
                            bits >>= 1;
                            if scratch.has_transition(p, a, q) != want {
                                scratch.toggle_transition_in_place(p, a, q);
                            }
                        }
                    }
                }
                if class.contains(&scratch) {
                    f(&scratch);
                }
            }
        }
    }
    Ok(())
}

/// Owned stream over a class.
pub fn enumerate_class(class: &ClassSpec, n: usize, alphabet: Alphabet) -> Result<Vec<Nfa>> {
    let mut out = Vec::new();
    for_each_in_class(class, n, alphabet, |a| out.push(a.clone()))?;
    Ok(out)
}

/// One isomorphism class of the census.
#[derive(Clone, Debug, Serialize)]
pub struct CensusClass {
    /// Canonical automaton document for the class.
    pub canonical: String,
    /// FNV-1a digest of the canonical form, handy as a short key.
    pub digest: String,
    /// Number of labeled automata in the class.
    pub size: u64,
    /// Automorphism group size of (any) representative.
    pub aut: u128,
}

/// Exhaustive census of a class: total labeled count, number of isomorphism
/// classes and per-class data.
#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub class: ClassSpec,
    pub n: usize,
    pub alphabet: usize,
    /// Total number of labeled automata.
    pub total: u64,
    /// Number of isomorphism classes.
    pub gamma: u64,
    pub classes: Vec<CensusClass>,
}

impl CensusClass {
    /// The class key as a [`CanonicalForm`] value (the stored document text
    /// is the canonical form, verbatim).
    pub fn key(&self) -> CanonicalForm {
        CanonicalForm::from_canonical_bytes(self.canonical.clone().into_bytes())
    }
}

impl CensusReport {
    pub fn find(&self, canon: &CanonicalForm) -> Option<&CensusClass> {
        self.classes
            .binary_search_by(|c| c.canonical.as_bytes().cmp(canon.as_bytes()))
            .ok()
            .map(|i| &self.classes[i])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("census serialization cannot fail")
    }
}

/// Builds the census, verifying `class size = n!/|Aut|` for every class.
///
/// The `(I, F)` outer grid is processed in parallel; partial class maps merge
/// into one deterministic, canonically ordered report.
pub fn census(class: &ClassSpec, n: usize, alphabet: Alphabet) -> Result<CensusReport> {
    enumeration_guard(n, alphabet.size())?;
    let k = alphabet.size();
    let i_masks: Vec<u32> = if class.bullet() {
        vec![1]
    } else {
        (0..1u32 << n).collect()
    };
    let pairs: Vec<(u32, u32)> = i_masks
        .iter()
        .flat_map(|&i| (0..1u32 << n).map(move |f| (i, f)))
        .collect();

    let partials: Result<Vec<BTreeMap<CanonicalForm, u64>>> = pairs
        .par_iter()
        .map(|&(i_mask, f_mask)| {
            let mut local: BTreeMap<CanonicalForm, u64> = BTreeMap::new();
            let mut scratch = Nfa::new(n, alphabet)?;
            scratch.set_initial_mask(i_mask);
            scratch.set_final_mask(f_mask);
            for d_mask in 0..1u64 << (k * n * n) {
                let mut bits = d_mask;
                for p in 0..n {
                    for a in 0..k {
                        for q in 0..n {
                            let want = bits & 1 != 0;
                            bits >>= 1;
                            if scratch.has_transition(p, a, q) != want {
                                scratch.toggle_transition_in_place(p, a, q);
                            }
                        }
                    }
                }
                if class.contains(&scratch) {
                    let canon = canonical_form(&scratch)?;
                    *local.entry(canon).or_insert(0) += 1;
                }
            }
            Ok(local)
        })
        .collect();

    let mut merged: BTreeMap<CanonicalForm, u64> = BTreeMap::new();
    for partial in partials? {
        for (canon, count) in partial {
            *merged.entry(canon).or_insert(0) += count;
        }
    }

    let fact = factorial(n);
    let mut classes = Vec::with_capacity(merged.len());
    let mut total = 0u64;
    for (canon, size) in merged {
        let (rep, _) = crate::format::parse_automaton(canon.as_str())?;
        let aut = count_automorphisms(&rep);
        let expect = fact / aut;
        if u128::from(size) != expect {
            return Err(Error::Internal(format!(
                "class {} has {size} labeled members, expected n!/|Aut| = {expect}",
                canon.as_str()
            )));
        }
        total += size;
        classes.push(CensusClass {
            digest: format!("{:016x}", canon.digest()),
            canonical: canon.as_str().to_string(),
            size,
            aut,
        });
    }
    Ok(CensusReport {
        class: *class,
        n,
        alphabet: alphabet.size(),
        total,
        gamma: classes.len() as u64,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::Family;

    fn k2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn all_class_n1_counts() {
        // |All(1)| with k = 2: 2 initial choices × 2 final × 2² transitions.
        let all = enumerate_class(&ClassSpec::all(), 1, k2()).unwrap();
        assert_eq!(all.len(), 16);
        // one state: every automaton is alone in its class
        let report = census(&ClassSpec::all(), 1, k2()).unwrap();
        assert_eq!(report.gamma, 16);
        assert_eq!(report.total, 16);
    }

    #[test]
    fn trim_n1_forces_initial_and_final() {
        // Trimness forces I = F = {1}; only the two loop transitions are free.
        let trim = enumerate_class(&ClassSpec::trim(), 1, k2()).unwrap();
        assert_eq!(trim.len(), 4);
        for a in &trim {
            assert_eq!(a.initial().to_sorted_vec(), vec![0]);
            assert_eq!(a.finals().to_sorted_vec(), vec![0]);
        }
    }

    #[test]
    fn trim_n2_census_is_consistent() {
        // Frozen by this very enumeration: 1696 labeled trim automata on two
        // states over two letters, 856 isomorphism classes.
        let report = census(&ClassSpec::trim(), 2, k2()).unwrap();
        assert_eq!(report.total, 1696);
        assert_eq!(report.gamma, 856);
        let labeled: u64 = report.classes.iter().map(|c| c.size).sum();
        assert_eq!(labeled, report.total);
        for c in &report.classes {
            assert_eq!(u128::from(c.size), factorial(2) / c.aut);
        }
    }

    #[test]
    fn gamma_monotone_under_class_inclusion() {
        let n = 2;
        let g_total = census(
            &ClassSpec::new(Family::DegTotal(2), false).unwrap(),
            n,
            k2(),
        )
        .unwrap()
        .gamma;
        let g_letter = census(
            &ClassSpec::new(Family::DegPerLetter(2), false).unwrap(),
            n,
            k2(),
        )
        .unwrap()
        .gamma;
        let g_trim = census(&ClassSpec::trim(), n, k2()).unwrap().gamma;
        assert!(g_total <= g_letter);
        assert!(g_letter <= g_trim);
    }

    #[test]
    fn guard_rejects_large_spaces() {
        assert!(enumeration_guard(3, 2).is_ok());
        assert!(enumeration_guard(4, 2).is_err());
        assert!(enumeration_guard(3, 3).is_err());
        assert!(enumerate_class(&ClassSpec::trim(), 4, k2()).is_err());
    }

    #[test]
    fn bullet_enumeration_pins_initial() {
        let class = ClassSpec::new(Family::Trim, true).unwrap();
        let members = enumerate_class(&class, 2, k2()).unwrap();
        assert!(!members.is_empty());
        for a in &members {
            assert_eq!(a.initial().to_sorted_vec(), vec![0]);
        }
    }
}

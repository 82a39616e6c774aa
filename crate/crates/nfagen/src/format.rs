//! Automaton documents: a small JSON format plus DOT export.
//!
//! A document looks like
//!
//! ```json
//! {"n":2,"alphabet":2,"initial":[1],"final":[2],"transitions":[[1,"a",2]]}
//! ```
//!
//! with states 1-based and letters `"a".."z"` in alphabet order.
//! `serialize_automaton` always emits the canonical rendering: sorted state
//! lists, transitions sorted lexicographically, no whitespace. Parsing
//! accepts any ordering and deduplicates repeated transitions (the transition
//! set is a set by definition), reporting how many duplicates were dropped.

use crate::automaton::{Alphabet, Nfa};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct AutomatonDoc {
    n: usize,
    alphabet: usize,
    initial: Vec<usize>,
    #[serde(rename = "final")]
    finals: Vec<usize>,
    transitions: Vec<(usize, String, usize)>,
}

/// Anything worth flagging about an otherwise valid document.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseWarnings {
    /// Duplicate transition triples dropped during parsing.
    pub duplicate_transitions: usize,
}

pub fn parse_automaton(text: &str) -> Result<(Nfa, ParseWarnings)> {
    let doc: AutomatonDoc = serde_json::from_str(text)?;
    if doc.n == 0 {
        return Err(Error::Parse("n must be positive".into()));
    }
    let alphabet = Alphabet::new(doc.alphabet)?;
    let mut nfa = Nfa::new(doc.n, alphabet)?;
    let check = |state: usize| -> Result<usize> {
        if state == 0 || state > doc.n {
            Err(Error::StateOutOfRange { state, n: doc.n })
        } else {
            Ok(state - 1)
        }
    };
    for s in doc.initial {
        nfa.set_initial(check(s)?);
    }
    for s in doc.finals {
        nfa.set_final(check(s)?);
    }
    let mut warnings = ParseWarnings::default();
    for (p, letter, q) in doc.transitions {
        let p = check(p)?;
        let q = check(q)?;
        let a = alphabet.letter_from_str(&letter)?;
        if nfa.has_transition(p, a, q) {
            warnings.duplicate_transitions += 1;
        } else {
            nfa.add_transition(p, a, q);
        }
    }
    Ok((nfa, warnings))
}

/// Canonical single-line JSON rendering of an automaton.
pub fn serialize_automaton(a: &Nfa) -> String {
    let doc = AutomatonDoc {
        n: a.n(),
        alphabet: a.alphabet().size(),
        initial: a.initial().iter().map(|q| q + 1).collect(),
        finals: a.finals().iter().map(|q| q + 1).collect(),
        transitions: a
            .transitions()
            .into_iter()
            .map(|(p, l, q)| (p + 1, a.alphabet().letter_char(l).to_string(), q + 1))
            .collect(),
    };
    serde_json::to_string(&doc).expect("document serialization cannot fail")
}

/// GraphViz rendering: final states as double circles, initial states marked
/// by an incoming arrowless edge from an invisible point.
pub fn nfa_to_dot(a: &Nfa) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "digraph nfa {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=circle];");
    for q in a.finals().iter() {
        let _ = writeln!(out, "  s{} [shape=doublecircle];", q + 1);
    }
    for q in a.initial().iter() {
        let _ = writeln!(out, "  i{} [shape=point, style=invis];", q + 1);
        let _ = writeln!(out, "  i{0} -> s{0} [arrowhead=none];", q + 1);
    }
    // merge parallel edges into one label
    let mut edges: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
        std::collections::BTreeMap::new();
    for (p, l, q) in a.transitions() {
        edges.entry((p, q)).or_default().push(l);
    }
    for ((p, q), letters) in edges {
        let label: Vec<String> = letters
            .iter()
            .map(|&l| a.alphabet().letter_char(l).to_string())
            .collect();
        let _ = writeln!(
            out,
            "  s{} -> s{} [label=\"{}\"];",
            p + 1,
            q + 1,
            label.join(",")
        );
    }
    let _ = writeln!(out, "}}");
    out
}

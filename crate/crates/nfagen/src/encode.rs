//! Encoding of an automaton as a plain directed graph that preserves and
//! reflects isomorphism.
//!
//! Every transition `(p, a, q)` becomes a fresh vertex with an edge from `p`
//! and an edge to `q`, plus an attached complete digraph (with self-loops)
//! whose size is the rank of the letter `a`, so the letter survives as a
//! clique size. Initial-only, final-only and initial-and-final states get
//! cliques of sizes `k+1`, `k+2` and `k+3` hanging off them. Two automata
//! are then isomorphic exactly when their encodings are isomorphic as bare
//! digraphs, and if the automaton has out-degree at most `m` the encoding has
//! out-degree at most `max(m+1, k+3)`.

use crate::automaton::{Alphabet, Nfa, StateSet};

/// What a vertex of the encoding stands for.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VertexKind {
    /// An original state.
    State(usize),
    /// Member `i` of the clique attached to a state.
    StateClique(usize, usize),
    /// The middle vertex of a split transition (index into the sorted
    /// transition list).
    Transition(usize),
    /// Member `i` of the clique attached to a transition.
    TransitionClique(usize, usize),
}

/// A directed graph (self-loops allowed) produced by [`encode_graph`].
#[derive(Clone, Debug)]
pub struct EncodedGraph {
    adjacency: Vec<StateSet>,
    kinds: Vec<VertexKind>,
    alphabet: Alphabet,
    edge_count: usize,
}

impl EncodedGraph {
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.adjacency[v].count()
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.out_degree(v))
            .max()
            .unwrap_or(0)
    }

    /// `d(s)`: the size of the largest vertex set `H` containing `s` with
    /// `H × H ⊆ E`. Since `H × H` includes the diagonal, a vertex without a
    /// self-loop has `d(s) = 0`. Computed honestly by branch and bound over
    /// the mutual-neighbor candidates, not from construction knowledge.
    pub fn clique_stat(&self, s: usize) -> usize {
        if !self.has_edge(s, s) {
            return 0;
        }
        let cand: Vec<usize> = (0..self.vertex_count())
            .filter(|&v| {
                v != s && self.has_edge(v, v) && self.has_edge(s, v) && self.has_edge(v, s)
            })
            .collect();
        1 + self.max_clique(&cand)
    }

    fn max_clique(&self, cand: &[usize]) -> usize {
        if cand.is_empty() {
            return 0;
        }
        let v = cand[0];
        let with_v: Vec<usize> = cand[1..]
            .iter()
            .copied()
            .filter(|&u| self.has_edge(u, v) && self.has_edge(v, u))
            .collect();
        let take = 1 + self.max_clique(&with_v);
        let skip = self.max_clique(&cand[1..]);
        take.max(skip)
    }

    /// View as a one-letter automaton with empty initial and final sets, so
    /// digraph isomorphism can reuse the automaton isomorphism machinery.
    /// (The alphabet keeps its minimum size of two; the second letter is
    /// simply unused.)
    pub fn as_digraph_nfa(&self) -> Nfa {
        let n = self.vertex_count();
        let mut out = Nfa::new(n, Alphabet::new(2).unwrap()).expect("positive size");
        for u in 0..n {
            for v in self.adjacency[u].iter() {
                out.add_transition(u, 0, v);
            }
        }
        out
    }

    /// Edge list with a `p <vertices> <edges>` header, vertices 1-based.
    pub fn to_edge_list(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "p {} {}", self.vertex_count(), self.edge_count);
        for u in 0..self.vertex_count() {
            for v in self.adjacency[u].iter() {
                let _ = writeln!(out, "{} {}", u + 1, v + 1);
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "digraph encoded {{");
        for (v, kind) in self.kinds.iter().enumerate() {
            let shape = match kind {
                VertexKind::State(_) => "circle",
                VertexKind::Transition(_) => "box",
                _ => "point",
            };
            let _ = writeln!(out, "  v{v} [shape={shape}];");
        }
        for u in 0..self.vertex_count() {
            for v in self.adjacency[u].iter() {
                let _ = writeln!(out, "  v{u} -> v{v};");
            }
        }
        let _ = writeln!(out, "}}");
        out
    }
}

/// Builds the digraph encoding of `a`. The letter rank is `h(a) = a + 1`.
pub fn encode_graph(a: &Nfa) -> EncodedGraph {
    let n = a.n();
    let k = a.alphabet().size();
    let transitions = a.transitions();

    let mut kinds: Vec<VertexKind> = (0..n).map(VertexKind::State).collect();
    // clique block per marked state
    let mut state_clique_start = vec![usize::MAX; n];
    for q in 0..n {
        let is_i = a.initial().contains(q);
        let is_f = a.finals().contains(q);
        let size = match (is_i, is_f) {
            (true, false) => k + 1,
            (false, true) => k + 2,
            (true, true) => k + 3,
            (false, false) => continue,
        };
        state_clique_start[q] = kinds.len();
        for i in 0..size {
            kinds.push(VertexKind::StateClique(q, i));
        }
    }
    let trans_vertex_start = kinds.len();
    for t in 0..transitions.len() {
        kinds.push(VertexKind::Transition(t));
    }
    let mut trans_clique_start = vec![usize::MAX; transitions.len()];
    for (t, &(_, letter, _)) in transitions.iter().enumerate() {
        trans_clique_start[t] = kinds.len();
        for i in 0..letter + 1 {
            kinds.push(VertexKind::TransitionClique(t, i));
        }
    }

    let total = kinds.len();
    let mut adjacency = vec![StateSet::empty(total); total];
    let mut edge_count = 0;
    let add = |adj: &mut Vec<StateSet>, u: usize, v: usize, count: &mut usize| {
        if !adj[u].contains(v) {
            adj[u].insert(v);
            *count += 1;
        }
    };

    for (t, &(p, letter, q)) in transitions.iter().enumerate() {
        let tv = trans_vertex_start + t;
        add(&mut adjacency, p, tv, &mut edge_count);
        add(&mut adjacency, tv, q, &mut edge_count);
        let c = trans_clique_start[t];
        add(&mut adjacency, tv, c, &mut edge_count);
        let h = letter + 1;
        for i in 0..h {
            for j in 0..h {
                add(&mut adjacency, c + i, c + j, &mut edge_count);
            }
        }
    }
    for q in 0..n {
        let start = state_clique_start[q];
        if start == usize::MAX {
            continue;
        }
        let is_i = a.initial().contains(q);
        let is_f = a.finals().contains(q);
        let size = match (is_i, is_f) {
            (true, false) => k + 1,
            (false, true) => k + 2,
            _ => k + 3,
        };
        add(&mut adjacency, q, start, &mut edge_count);
        for i in 0..size {
            for j in 0..size {
                add(&mut adjacency, start + i, start + j, &mut edge_count);
            }
        }
    }

    EncodedGraph {
        adjacency,
        kinds,
        alphabet: a.alphabet(),
        edge_count,
    }
}

impl EncodedGraph {
    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }
}

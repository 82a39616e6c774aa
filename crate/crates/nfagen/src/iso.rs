//! Isomorphism testing, automorphism counting and canonical forms, all driven
//! by the label partition of [`crate::labeling`].
//!
//! Only bijections that preserve the per-state fingerprints are ever explored:
//! the backtracking assigns states cell by cell (smallest cells first) with
//! forward checking against transition consistency, so a wrong partial
//! assignment dies as soon as it disagrees with an already-placed state.
//!
//! Three independent routes to `|Aut(A)|` exist in this crate and are tested
//! against each other: [`count_automorphisms`] (cell-respecting enumeration),
//! [`count_automorphisms_bruteforce`] (all `n!` permutations, the oracle) and
//! [`crate::gadget::count_automorphisms_via_iso`] (orbit products through
//! isomorphism tests on tailed automata). [`automorphism_group_size`] is the
//! entry point the samplers use: it enumerates when the cell structure is
//! tight and switches to an orbit-stabilizer product when the group is too
//! large to enumerate element by element.

use crate::automaton::{for_each_permutation, Nfa, Permutation};
use crate::error::{Error, Result};
use crate::format::serialize_automaton;
use crate::labeling::{label_all, partition_by_labels, LabelVector, Partition};
use std::collections::BTreeMap;

/// Candidate budget for [`canonical_form`]: `8!`, the worst case of a fully
/// symmetric 8-state automaton.
pub const DEFAULT_CANON_BUDGET: u128 = 40_320;

/// Above this many cell-respecting bijections, [`automorphism_group_size`]
/// stops enumerating group elements and computes orbit products instead.
const ENUM_COUNT_LIMIT: u128 = 2_000;

/// State-count guard for the brute-force oracle.
pub const BRUTE_FORCE_MAX_STATES: usize = 8;

/// A serialization minimal over all cell-respecting renamings; two automata
/// have equal canonical forms exactly when they are isomorphic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    /// Wraps bytes already produced by [`canonical_form`]; used when reading
    /// canonical documents back from a census report.
    pub(crate) fn from_canonical_bytes(bytes: Vec<u8>) -> Self {
        CanonicalForm(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// The canonical form is itself an automaton document.
    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("canonical forms are JSON text")
    }

    /// Stable 64-bit FNV-1a digest, for compact report keys.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &b in &self.0 {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

/// Backtracking matcher between two automata over paired label cells.
struct Matcher<'x> {
    a: &'x Nfa,
    b: &'x Nfa,
    k: usize,
    /// a-states in assignment order.
    order: Vec<usize>,
    /// Candidate b-states for each position of `order`.
    cand: Vec<Vec<usize>>,
    phi: Vec<usize>,
    assigned: Vec<usize>,
    used: Vec<bool>,
}

const UNASSIGNED: usize = usize::MAX;

impl<'x> Matcher<'x> {
    fn new(a: &'x Nfa, b: &'x Nfa, order: Vec<usize>, cand: Vec<Vec<usize>>) -> Self {
        let n = a.n();
        Matcher {
            a,
            b,
            k: a.alphabet().size(),
            order,
            cand,
            phi: vec![UNASSIGNED; n],
            assigned: Vec::with_capacity(n),
            used: vec![false; n],
        }
    }

    /// Would `phi(u) = v` stay consistent with every assigned state?
    fn consistent(&self, u: usize, v: usize) -> bool {
        for l in 0..self.k {
            if self.a.has_transition(u, l, u) != self.b.has_transition(v, l, v) {
                return false;
            }
            for &u2 in &self.assigned {
                let v2 = self.phi[u2];
                if self.a.has_transition(u, l, u2) != self.b.has_transition(v, l, v2) {
                    return false;
                }
                if self.a.has_transition(u2, l, u) != self.b.has_transition(v2, l, v) {
                    return false;
                }
            }
        }
        true
    }

    fn assign(&mut self, u: usize, v: usize) {
        self.phi[u] = v;
        self.used[v] = true;
        self.assigned.push(u);
    }

    fn unassign(&mut self, u: usize, v: usize) {
        self.assigned.pop();
        self.used[v] = false;
        self.phi[u] = UNASSIGNED;
    }

    /// Depth-first search for one completion; `phi` holds it on success.
    fn find_first(&mut self, pos: usize) -> bool {
        if pos == self.order.len() {
            return true;
        }
        let u = self.order[pos];
        for ci in 0..self.cand[pos].len() {
            let v = self.cand[pos][ci];
            if self.used[v] || !self.consistent(u, v) {
                continue;
            }
            self.assign(u, v);
            if self.find_first(pos + 1) {
                return true;
            }
            self.unassign(u, v);
        }
        false
    }

    /// Number of completions.
    fn count_all(&mut self, pos: usize) -> u128 {
        if pos == self.order.len() {
            return 1;
        }
        let u = self.order[pos];
        let mut total = 0u128;
        for ci in 0..self.cand[pos].len() {
            let v = self.cand[pos][ci];
            if self.used[v] || !self.consistent(u, v) {
                continue;
            }
            self.assign(u, v);
            total += self.count_all(pos + 1);
            self.unassign(u, v);
        }
        total
    }
}

/// Paired cells of two automata with identical fingerprint statistics, or
/// `None` when the label multisets already rule isomorphism out.
fn paired_cells(a: &Nfa, b: &Nfa) -> Option<Vec<(Vec<usize>, Vec<usize>)>> {
    let la = label_all(a);
    let lb = label_all(b);
    let mut ga: BTreeMap<&LabelVector, Vec<usize>> = BTreeMap::new();
    for (q, l) in la.iter().enumerate() {
        ga.entry(l).or_default().push(q);
    }
    let mut gb: BTreeMap<&LabelVector, Vec<usize>> = BTreeMap::new();
    for (q, l) in lb.iter().enumerate() {
        gb.entry(l).or_default().push(q);
    }
    if ga.len() != gb.len() {
        return None;
    }
    let mut pairs = Vec::with_capacity(ga.len());
    for ((ka, va), (kb, vb)) in ga.into_iter().zip(gb) {
        if ka != kb || va.len() != vb.len() {
            return None;
        }
        pairs.push((va, vb));
    }
    // smallest cells first: they fail fastest
    pairs.sort_by_key(|(va, _)| va.len());
    Some(pairs)
}

fn flatten(pairs: Vec<(Vec<usize>, Vec<usize>)>) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut order = Vec::new();
    let mut cand = Vec::new();
    for (va, vb) in pairs {
        for &u in &va {
            order.push(u);
            cand.push(vb.clone());
        }
    }
    (order, cand)
}

/// Exact isomorphism test. Returns a witness permutation `phi` with
/// `phi(a) = b` when one exists.
pub fn are_isomorphic(a: &Nfa, b: &Nfa) -> Option<Permutation> {
    if a.n() != b.n() || a.alphabet() != b.alphabet() {
        return None;
    }
    let pairs = paired_cells(a, b)?;
    let (order, cand) = flatten(pairs);
    let mut m = Matcher::new(a, b, order, cand);
    if m.find_first(0) {
        let phi = Permutation::from_mapping(m.phi).expect("search yields a bijection");
        debug_assert_eq!(&a.apply_permutation(&phi).unwrap(), b);
        Some(phi)
    } else {
        None
    }
}

/// `|Aut(a)|` by enumeration of cell-preserving permutations: the states are
/// partitioned by fingerprint and only bijections preserving every cell are
/// explored, counting those that fix the automaton.
pub fn count_automorphisms(a: &Nfa) -> u128 {
    let (_, part) = partition_by_labels(a);
    if part.is_discrete() {
        return 1; // the identity is the only cell-respecting map
    }
    let mut cells: Vec<Vec<usize>> = part.cells().to_vec();
    cells.sort_by_key(Vec::len);
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = cells.into_iter().map(|c| (c.clone(), c)).collect();
    let (order, cand) = flatten(pairs);
    Matcher::new(a, a, order, cand).count_all(0)
}

/// Is there an automorphism fixing `0..prefix` pointwise and mapping
/// `prefix` to `image`?
fn has_automorphism_with_prefix(a: &Nfa, part: &Partition, prefix: usize, image: usize) -> bool {
    let n = a.n();
    let mut order = Vec::with_capacity(n);
    let mut cand = Vec::with_capacity(n);
    for q in 0..prefix {
        order.push(q);
        cand.push(vec![q]);
    }
    order.push(prefix);
    cand.push(vec![image]);
    // remaining states, small cells first
    let mut rest: Vec<usize> = (prefix + 1..n).collect();
    rest.sort_by_key(|&q| part.cells()[part.cell_of(q)].len());
    for q in rest {
        order.push(q);
        cand.push(part.cells()[part.cell_of(q)].clone());
    }
    Matcher::new(a, a, order, cand).find_first(0)
}

/// `|Aut(a)|` as a product of orbit sizes along the pointwise stabilizer
/// chain: `|Aut| = d_0 ⋯ d_{n-1}` where `d_i` counts the images of state `i`
/// under automorphisms fixing `0..i`. Each membership question is a single
/// witness search, so groups far too large to enumerate are counted quickly.
fn stabilizer_orbit_count(a: &Nfa, labels: &[LabelVector], part: &Partition) -> u128 {
    let n = a.n();
    let mut total: u128 = 1;
    for i in 0..n {
        let mut d: u128 = 1; // the identity maps i to i
        for j in i + 1..n {
            if labels[j] == labels[i] && has_automorphism_with_prefix(a, part, i, j) {
                d += 1;
            }
        }
        total = total.saturating_mul(d);
    }
    total
}

/// Does renaming states by `perm` leave `a` unchanged? Allocation-free.
fn permutation_fixes(a: &Nfa, perm: &[usize]) -> bool {
    let n = a.n();
    for q in 0..n {
        if a.initial().contains(q) != a.initial().contains(perm[q]) {
            return false;
        }
        if a.finals().contains(q) != a.finals().contains(perm[q]) {
            return false;
        }
    }
    for l in 0..a.alphabet().size() {
        for p in 0..n {
            for q in 0..n {
                if a.has_transition(p, l, q) != a.has_transition(perm[p], l, perm[q]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Below this many states, checking all `n!` permutations directly beats
/// computing the label partition.
const DIRECT_COUNT_MAX_STATES: usize = 4;

/// Cheap sound discreteness test: hashes the (initial, final, out-degrees,
/// in-degrees) profile of every state; pairwise distinct hashes mean pairwise
/// distinct profiles, which already splits every state into its own cell of
/// the full partition. Hash collisions only cause a fall-through to the full
/// machinery, never a wrong answer.
pub(crate) fn degree_profile_discrete(a: &Nfa) -> bool {
    let n = a.n();
    if n > 64 {
        return false;
    }
    let k = a.alphabet().size();
    let mut keys = [0u64; 64];
    for p in 0..n {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        };
        mix(u64::from(a.initial().contains(p)));
        mix(u64::from(a.finals().contains(p)));
        for l in 0..k {
            mix(a.successors(p, l).count() as u64);
        }
        keys[p] = h;
    }
    // in-degrees folded in per letter; xor keeps the key a pure function of
    // the profile
    let mut counts = [0u16; 64];
    for l in 0..k {
        counts[..n].fill(0);
        for p in 0..n {
            for q in a.successors(p, l).iter() {
                counts[q] += 1;
            }
        }
        for (q, key) in keys.iter_mut().enumerate().take(n) {
            let v = ((l as u64) << 32 | u64::from(counts[q])).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            *key ^= v;
        }
    }
    let keys = &mut keys[..n];
    keys.sort_unstable();
    keys.windows(2).all(|w| w[0] != w[1])
}

/// `|Aut(a)|` with an adaptive strategy: direct enumeration of all
/// permutations for very small automata, cell-respecting enumeration while
/// the cell structure keeps the search space small, orbit products otherwise.
/// This is what the Metropolis sampler calls on every proposal.
pub fn automorphism_group_size(a: &Nfa) -> u128 {
    if a.n() <= DIRECT_COUNT_MAX_STATES {
        let mut count: u128 = 0;
        for_each_permutation(a.n(), |perm| {
            if permutation_fixes(a, perm) {
                count += 1;
            }
            true
        });
        return count;
    }
    if degree_profile_discrete(a) {
        return 1;
    }
    let (labels, part) = partition_by_labels(a);
    group_size_with_partition(a, &labels, &part)
}

/// Group size when the caller already holds the partition.
pub(crate) fn group_size_with_partition(a: &Nfa, labels: &[LabelVector], part: &Partition) -> u128 {
    if part.is_discrete() {
        return 1;
    }
    if part.search_space() <= ENUM_COUNT_LIMIT {
        let mut cells: Vec<Vec<usize>> = part.cells().to_vec();
        cells.sort_by_key(Vec::len);
        let pairs: Vec<(Vec<usize>, Vec<usize>)> =
            cells.into_iter().map(|c| (c.clone(), c)).collect();
        let (order, cand) = flatten(pairs);
        Matcher::new(a, a, order, cand).count_all(0)
    } else {
        stabilizer_orbit_count(a, labels, part)
    }
}

/// Ground-truth oracle: counts `phi(a) = a` over all `n!` permutations using
/// [`Nfa::apply_permutation`] and value equality only. Deliberately shares no
/// machinery with the labeling-based searches.
pub fn count_automorphisms_bruteforce(a: &Nfa) -> Result<u128> {
    if a.n() > BRUTE_FORCE_MAX_STATES {
        return Err(Error::GuardExceeded(format!(
            "brute-force automorphism count limited to n <= {BRUTE_FORCE_MAX_STATES}, got {}",
            a.n()
        )));
    }
    let mut count: u128 = 0;
    for_each_permutation(a.n(), |p| {
        let phi = Permutation::from_mapping(p.to_vec()).expect("permutation");
        if a.apply_permutation(&phi).expect("sizes match") == *a {
            count += 1;
        }
        true
    });
    Ok(count)
}

/// Canonical form with the default candidate budget.
pub fn canonical_form(a: &Nfa) -> Result<CanonicalForm> {
    canonical_form_with_budget(a, DEFAULT_CANON_BUDGET)
}

/// Minimum of `serialize_automaton(phi(a))` over all cell-respecting
/// renamings: the cells are laid out in fingerprint order and each cell maps
/// onto its block of positions in every possible way. Isomorphic automata
/// share cells and blocks, so they share the minimum; non-isomorphic automata
/// can never produce equal serializations.
pub fn canonical_form_with_budget(a: &Nfa, budget: u128) -> Result<CanonicalForm> {
    let (_, part) = partition_by_labels(a);
    let space = part.search_space();
    if space > budget {
        return Err(Error::GuardExceeded(format!(
            "canonical form search space {space} exceeds budget {budget}"
        )));
    }
    let n = a.n();
    // state -> position assignment, built cell by cell
    let mut order = Vec::with_capacity(n);
    let mut cand = Vec::with_capacity(n);
    let mut start = 0;
    for cell in part.cells() {
        let block: Vec<usize> = (start..start + cell.len()).collect();
        for &q in cell {
            order.push(q);
            cand.push(block.clone());
        }
        start += cell.len();
    }
    let mut used = vec![false; n];
    let mut phi = vec![UNASSIGNED; n];
    let mut best: Option<Vec<u8>> = None;
    canonical_dfs(a, &order, &cand, 0, &mut phi, &mut used, &mut best);
    Ok(CanonicalForm(best.expect("at least one candidate")))
}

fn canonical_dfs(
    a: &Nfa,
    order: &[usize],
    cand: &[Vec<usize>],
    pos: usize,
    phi: &mut Vec<usize>,
    used: &mut Vec<bool>,
    best: &mut Option<Vec<u8>>,
) {
    if pos == order.len() {
        let perm = Permutation::from_mapping(phi.clone()).expect("bijection");
        let bytes =
            serialize_automaton(&a.apply_permutation(&perm).expect("sizes match")).into_bytes();
        match best {
            Some(b) if *b <= bytes => {}
            _ => *best = Some(bytes),
        }
        return;
    }
    let u = order[pos];
    for &v in &cand[pos] {
        if used[v] {
            continue;
        }
        phi[u] = v;
        used[v] = true;
        canonical_dfs(a, order, cand, pos + 1, phi, used, best);
        used[v] = false;
        phi[u] = UNASSIGNED;
    }
}

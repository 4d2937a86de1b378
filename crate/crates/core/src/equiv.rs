//! Trace-projection comparison of transition systems.
//!
//! Every state is accepting, so languages are prefix-closed. Projection hides
//! non-shared events; the hidden steps are eliminated by closure and the result
//! is determinized before a synchronized product search.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use petgraph::algo::is_cyclic_directed;
use petgraph::graph::DiGraph;
use serde::Serialize;
use thiserror::Error;

use crate::event::Event;
use crate::statespace::Lts;

pub type Trace = Vec<Event>;

pub fn project_trace(t: &[Event], shared: &BTreeSet<Event>) -> Trace {
    t.iter().filter(|e| shared.contains(*e)).cloned().collect()
}

/// All non-helper labels occurring in either system.
pub fn default_shared(a: &Lts, b: &Lts, helpers: &BTreeSet<Event>) -> BTreeSet<Event> {
    a.labels().into_iter().chain(b.labels()).filter(|e| !helpers.contains(e)).collect()
}

#[derive(Clone, Debug)]
pub struct DfaState {
    pub next: BTreeMap<Event, usize>,
    /// Underlying transition-system states.
    pub members: Vec<usize>,
    /// Some member is a deadlock.
    pub deadlock: bool,
}

/// Deterministic automaton of a projected language; state 0 is initial.
#[derive(Clone, Debug)]
pub struct Dfa {
    pub states: Vec<DfaState>,
    /// A cycle of hidden steps is reachable.
    pub divergent: bool,
}

impl Dfa {
    pub fn run(&self, word: &[Event]) -> Option<Vec<usize>> {
        let mut q = 0;
        let mut seq = vec![0];
        for e in word {
            q = *self.states[q].next.get(e)?;
            seq.push(q);
        }
        Some(seq)
    }

    pub fn accepts(&self, word: &[Event]) -> bool {
        self.run(word).is_some()
    }
}

fn closure(succ: &[Vec<(Event, usize)>], shared: &BTreeSet<Event>, seed: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = seed.into_iter().collect();
    while let Some(s) = stack.pop() {
        if !seen.insert(s) {
            continue;
        }
        for (e, t) in &succ[s] {
            if !shared.contains(e) && !seen.contains(t) {
                stack.push(*t);
            }
        }
    }
    seen.into_iter().collect()
}

pub fn project_lts(lts: &Lts, shared: &BTreeSet<Event>) -> Dfa {
    let succ = lts.successors();
    let start = closure(&succ, shared, [lts.initial]);
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut states: Vec<DfaState> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(start.clone(), 0);
    states.push(DfaState { next: BTreeMap::new(), members: start, deadlock: false });
    queue.push_back(0);
    while let Some(q) = queue.pop_front() {
        let mut moves: BTreeMap<Event, BTreeSet<usize>> = BTreeMap::new();
        for &s in &states[q].members {
            for (e, t) in &succ[s] {
                if shared.contains(e) {
                    moves.entry(e.clone()).or_default().insert(*t);
                }
            }
        }
        for (e, targets) in moves {
            let set = closure(&succ, shared, targets);
            let r = match index.get(&set) {
                Some(&r) => r,
                None => {
                    let r = states.len();
                    index.insert(set.clone(), r);
                    states.push(DfaState { next: BTreeMap::new(), members: set, deadlock: false });
                    queue.push_back(r);
                    r
                }
            };
            states[q].next.insert(e, r);
        }
    }
    for st in &mut states {
        st.deadlock = st.members.iter().any(|&s| lts.meta[s].deadlock);
    }
    Dfa { states, divergent: hidden_cycle(lts, shared) }
}

fn hidden_cycle(lts: &Lts, shared: &BTreeSet<Event>) -> bool {
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<_> = (0..lts.num_states()).map(|_| g.add_node(())).collect();
    for (s, e, t) in &lts.edges {
        if !shared.contains(e) {
            if s == t {
                return true;
            }
            g.add_edge(nodes[*s], nodes[*t], ());
        }
    }
    is_cyclic_directed(&g)
}

/// Direct check on the transition system: some path projects onto `word`.
pub fn replays(lts: &Lts, shared: &BTreeSet<Event>, word: &[Event]) -> bool {
    let succ = lts.successors();
    let mut cur = closure(&succ, shared, [lts.initial]);
    for w in word {
        let next: Vec<usize> = cur
            .iter()
            .flat_map(|&s| succ[s].iter().filter(|(e, _)| e == w).map(|(_, t)| *t))
            .collect();
        if next.is_empty() {
            return false;
        }
        cur = closure(&succ, shared, next);
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Equal,
    LeftStrictSubset,
    RightStrictSubset,
    Incomparable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equal => "EQUAL",
            Verdict::LeftStrictSubset => "LEFT_STRICT_SUBSET",
            Verdict::RightStrictSubset => "RIGHT_STRICT_SUBSET",
            Verdict::Incomparable => "INCOMPARABLE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `prefix · cycle^ω`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Trace,
    pub cycle: Trace,
}

/// A behavior of `side` that the other side cannot produce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub side: Side,
    /// Shortest distinguishing finite trace.
    pub trace: Trace,
    /// Infinite extension staying inside `side`, when one exists.
    pub lasso: Option<Lasso>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonResult {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub divergence_warnings: Vec<Side>,
}

impl ComparisonResult {
    pub fn witness(&self, side: Side) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.side == side)
    }

    pub fn to_json(&self) -> String {
        fn words(t: &[Event]) -> Vec<String> {
            t.iter().map(|e| e.to_string()).collect()
        }
        let witnesses: Vec<serde_json::Value> = self
            .witnesses
            .iter()
            .map(|w| {
                serde_json::json!({
                    "side": w.side,
                    "trace": words(&w.trace),
                    "lasso": w.lasso.as_ref().map(|l| serde_json::json!({
                        "prefix": words(&l.prefix),
                        "cycle": words(&l.cycle),
                    })),
                })
            })
            .collect();
        let doc = serde_json::json!({
            "verdict": self.verdict,
            "witnesses": witnesses,
            "divergence_warnings": self.divergence_warnings,
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

/// Compares the projected prefix-closed languages of `a` and `b`.
pub fn compare(a: &Lts, b: &Lts, shared: &BTreeSet<Event>) -> ComparisonResult {
    let da = project_lts(a, shared);
    let db = project_lts(b, shared);
    let (only_a, only_b) = distinguishing_words(&da, &db);
    let mut witnesses = Vec::new();
    if let Some(w) = only_a {
        assert!(replays(a, shared, &w) && !db.accepts(&w) && !replays(b, shared, &w), "left witness failed replay");
        let lasso = close_lasso(&da, &w);
        witnesses.push(Witness { side: Side::Left, trace: w, lasso });
    }
    if let Some(w) = only_b {
        assert!(replays(b, shared, &w) && !da.accepts(&w) && !replays(a, shared, &w), "right witness failed replay");
        let lasso = close_lasso(&db, &w);
        witnesses.push(Witness { side: Side::Right, trace: w, lasso });
    }
    let verdict = match (witnesses.iter().any(|w| w.side == Side::Left), witnesses.iter().any(|w| w.side == Side::Right)) {
        (false, false) => Verdict::Equal,
        (false, true) => Verdict::LeftStrictSubset,
        (true, false) => Verdict::RightStrictSubset,
        (true, true) => Verdict::Incomparable,
    };
    let mut divergence_warnings = Vec::new();
    if da.divergent {
        divergence_warnings.push(Side::Left);
    }
    if db.divergent {
        divergence_warnings.push(Side::Right);
    }
    ComparisonResult { verdict, witnesses, divergence_warnings }
}

/// Shortest words accepted by exactly one automaton, one per direction.
fn distinguishing_words(da: &Dfa, db: &Dfa) -> (Option<Trace>, Option<Trace>) {
    type Pair = (Option<usize>, Option<usize>);
    let mut prev: HashMap<Pair, (Pair, Event)> = HashMap::new();
    let mut seen: HashSet<Pair> = HashSet::new();
    let start = (Some(0), Some(0));
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    let (mut only_a, mut only_b) = (None, None);
    let word = |mut p: Pair, prev: &HashMap<Pair, (Pair, Event)>| {
        let mut w = Vec::new();
        while let Some((q, e)) = prev.get(&p) {
            w.push(e.clone());
            p = *q;
        }
        w.reverse();
        w
    };
    while let Some(p) = queue.pop_front() {
        let (Some(qa), Some(qb)) = p else { continue };
        let labels: BTreeSet<&Event> = da.states[qa].next.keys().chain(db.states[qb].next.keys()).collect();
        for e in labels {
            let np = (da.states[qa].next.get(e).copied(), db.states[qb].next.get(e).copied());
            if !seen.insert(np) {
                continue;
            }
            prev.insert(np, (p, e.clone()));
            match np {
                (Some(_), None) if only_a.is_none() => only_a = Some(word(np, &prev)),
                (None, Some(_)) if only_b.is_none() => only_b = Some(word(np, &prev)),
                _ => {}
            }
            queue.push_back(np);
        }
        if only_a.is_some() && only_b.is_some() {
            break;
        }
    }
    (only_a, only_b)
}

/// Extends `w` inside `d` until its run revisits a state, giving a lasso.
fn close_lasso(d: &Dfa, w: &[Event]) -> Option<Lasso> {
    let run = d.run(w)?;
    let last = *run.last().unwrap();
    if let Some(i) = run[..run.len() - 1].iter().position(|&q| q == last) {
        if i < w.len() {
            return Some(Lasso { prefix: w[..i].to_vec(), cycle: w[i..].to_vec() });
        }
    }
    // Shortest continuation from `last` back into the run.
    let on_run: HashMap<usize, usize> = run.iter().enumerate().rev().map(|(i, q)| (*q, i)).collect();
    let mut prev: HashMap<usize, (usize, Event)> = HashMap::new();
    let mut queue = VecDeque::from([last]);
    let mut seen = HashSet::from([last]);
    while let Some(q) = queue.pop_front() {
        for (e, &r) in &d.states[q].next {
            let hit = on_run.get(&r).copied();
            if hit.is_none() && !seen.insert(r) {
                continue;
            }
            prev.entry(r).or_insert((q, e.clone()));
            if let Some(i) = hit {
                let mut tail = vec![e.clone()];
                let mut cur = q;
                while cur != last {
                    let (p, e) = prev[&cur].clone();
                    tail.push(e);
                    cur = p;
                }
                tail.reverse();
                let mut cycle = w[i..].to_vec();
                cycle.extend(tail);
                return Some(Lasso { prefix: w[..i].to_vec(), cycle });
            }
            queue.push_back(r);
        }
    }
    None
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundedError {
    #[error("bounded trace set exceeds the cap of {0} traces")]
    MemoryGuard(usize),
}

pub const DEFAULT_TRACE_CAP: usize = 20_000_000;

/// Prefix tree of projected traces; node 0 is the empty trace.
#[derive(Clone, Debug)]
pub struct TraceSet {
    children: Vec<BTreeMap<Event, usize>>,
}

impl TraceSet {
    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: &[Event]) -> bool {
        let mut n = 0;
        for e in t {
            match self.children[n].get(e) {
                Some(&c) => n = c,
                None => return false,
            }
        }
        true
    }

    /// Every trace, in canonical (depth-first, event-ordered) order.
    pub fn traces(&self) -> Vec<Trace> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((n, t)) = stack.pop() {
            for (e, &c) in self.children[n].iter().rev() {
                let mut t2: Trace = t.clone();
                t2.push(e.clone());
                stack.push((c, t2));
            }
            out.push(t);
        }
        out
    }

    fn subtree_sizes(&self) -> Vec<usize> {
        // Children always have larger ids than their parent.
        let mut size = vec![1usize; self.children.len()];
        for n in (0..self.children.len()).rev() {
            let s: usize = self.children[n].values().map(|&c| size[c]).sum();
            size[n] += s;
        }
        size
    }
}

/// Projections of all paths of at most `max_len` raw steps.
pub fn bounded_traces(lts: &Lts, shared: &BTreeSet<Event>, max_len: usize, cap: usize) -> Result<TraceSet, BoundedError> {
    let succ = lts.successors();
    let mut children: Vec<BTreeMap<Event, usize>> = vec![BTreeMap::new()];
    let mut frontier = vec![(lts.initial, 0usize)];
    let mut visited: HashSet<(usize, usize)> = HashSet::from([(lts.initial, 0)]);
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (s, node) in frontier {
            for (e, t) in &succ[s] {
                let nd = if shared.contains(e) {
                    match children[node].get(e) {
                        Some(&c) => c,
                        None => {
                            if children.len() >= cap {
                                return Err(BoundedError::MemoryGuard(cap));
                            }
                            let c = children.len();
                            children.push(BTreeMap::new());
                            children[node].insert(e.clone(), c);
                            c
                        }
                    }
                } else {
                    node
                };
                if visited.insert((*t, nd)) {
                    next.push((*t, nd));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(TraceSet { children })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundedCounts {
    pub only_a: usize,
    pub only_b: usize,
    pub both: usize,
}

impl BoundedCounts {
    /// `L,only_a,only_b,both`
    pub fn csv(&self, max_len: usize) -> String {
        format!("{max_len},{},{},{}", self.only_a, self.only_b, self.both)
    }
}

pub fn compare_trace_sets(a: &TraceSet, b: &TraceSet) -> BoundedCounts {
    let (sa, sb) = (a.subtree_sizes(), b.subtree_sizes());
    let mut counts = BoundedCounts { only_a: 0, only_b: 0, both: 0 };
    let mut stack = vec![(0usize, 0usize)];
    while let Some((na, nb)) = stack.pop() {
        counts.both += 1;
        for (e, &ca) in &a.children[na] {
            match b.children[nb].get(e) {
                Some(&cb) => stack.push((ca, cb)),
                None => counts.only_a += sa[ca],
            }
        }
        for (e, &cb) in &b.children[nb] {
            if !a.children[na].contains_key(e) {
                counts.only_b += sb[cb];
            }
        }
    }
    counts
}

pub fn bounded_compare(
    a: &Lts,
    b: &Lts,
    shared: &BTreeSet<Event>,
    max_len: usize,
    cap: usize,
) -> Result<BoundedCounts, BoundedError> {
    let ta = bounded_traces(a, shared, max_len, cap)?;
    let tb = bounded_traces(b, shared, max_len, cap)?;
    Ok(compare_trace_sets(&ta, &tb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::StateMeta;

    fn ev(s: &str) -> Event {
        s.parse().unwrap()
    }

    fn lts(n: usize, edges: &[(usize, &str, usize)]) -> Lts {
        Lts::new(0, vec![StateMeta::default(); n], edges.iter().map(|(s, e, t)| (*s, ev(e), *t)).collect())
    }

    fn set(xs: &[&str]) -> BTreeSet<Event> {
        xs.iter().map(|x| ev(x)).collect()
    }

    fn word(s: &str) -> Trace {
        s.split_whitespace().map(ev).collect()
    }

    #[test]
    fn projection_drops_helpers() {
        let t = word("Approaching ClosingRequest Lower Entering Leaving OpeningRequest Raise");
        let shared = set(&["Approaching", "Lower", "Entering", "Leaving", "Raise"]);
        assert_eq!(project_trace(&t, &shared), word("Approaching Lower Entering Leaving Raise"));
        assert!(project_trace(&[], &shared).is_empty());
    }

    #[test]
    fn hidden_step_is_closed_over() {
        let l = lts(4, &[(0, "A", 1), (1, "h", 2), (2, "B", 3)]);
        let d = project_lts(&l, &set(&["A", "B"]));
        assert!(d.accepts(&word("A B")));
        assert!(!d.accepts(&word("B")));
        assert!(!d.divergent);
    }

    #[test]
    fn reflexive() {
        let l = lts(2, &[(0, "A", 1), (1, "B", 0)]);
        let r = compare(&l, &l, &set(&["A", "B"]));
        assert_eq!(r.verdict, Verdict::Equal);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn strict_subset_with_lasso() {
        let a = lts(2, &[(0, "A", 1), (1, "B", 0)]);
        let b = lts(2, &[(0, "A", 1), (1, "B", 0), (1, "C", 1)]);
        let r = compare(&a, &b, &set(&["A", "B", "C"]));
        assert_eq!(r.verdict, Verdict::LeftStrictSubset);
        let w = r.witness(Side::Right).unwrap();
        assert_eq!(w.trace, word("A C"));
        let l = w.lasso.as_ref().unwrap();
        assert_eq!((l.prefix.clone(), l.cycle.clone()), (word("A"), word("C")));
        let swapped = compare(&b, &a, &set(&["A", "B", "C"]));
        assert_eq!(swapped.verdict, Verdict::RightStrictSubset);
    }

    #[test]
    fn divergence_is_reported() {
        let a = lts(2, &[(0, "A", 1), (1, "h", 1)]);
        let r = compare(&a, &a, &set(&["A"]));
        assert_eq!(r.divergence_warnings, vec![Side::Left, Side::Right]);
    }

    #[test]
    fn bounded_basics() {
        let a = lts(1, &[(0, "A", 0)]);
        let t = bounded_traces(&a, &set(&["A"]), 3, 100).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(bounded_traces(&a, &set(&["A"]), 0, 100).unwrap().len(), 1);
        let b = lts(1, &[(0, "B", 0)]);
        let c = bounded_compare(&a, &b, &set(&["A", "B"]), 1, 100).unwrap();
        assert_eq!(c, BoundedCounts { only_a: 1, only_b: 1, both: 1 });
        assert!(matches!(bounded_traces(&a, &set(&["A"]), 10, 5), Err(BoundedError::MemoryGuard(5))));
    }

    #[test]
    fn bounded_counts_raw_length() {
        // A hidden step consumes length budget.
        let l = lts(3, &[(0, "h", 1), (1, "A", 2)]);
        assert_eq!(bounded_traces(&l, &set(&["A"]), 1, 100).unwrap().len(), 1);
        assert_eq!(bounded_traces(&l, &set(&["A"]), 2, 100).unwrap().len(), 2);
    }
}

//! Finite labeled transition systems built from either formalism.

mod analysis;
mod export;
mod reduce;

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use thiserror::Error;

use crate::bp::{BProgram, BProgramState, Status};
use crate::event::Event;
use crate::pn::{Marking, PetriNet};

pub use analysis::{find_deadlocks, find_hot_cycles, shortest_path, HotViolation};
pub use export::{stats_csv, Format};
pub use reduce::reduce_helper;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateSpaceError {
    #[error("guard {guard} exceeded: {count} > {limit}")]
    GuardExceeded { guard: &'static str, count: u64, limit: u64 },
    #[error("helper events form a cycle through state {0}")]
    HelperCycle(usize),
    #[error("transition system carries no hot-thread data")]
    NotBpLts,
    #[error("invalid net: {0}")]
    InvalidNet(String),
    #[error("malformed transition system: {0}")]
    Import(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guards {
    pub max_states: u64,
    pub max_tokens: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards { max_states: 1_000_000, max_tokens: 1_000 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateMeta {
    pub deadlock: bool,
    pub terminated: bool,
    /// `None` for transition systems not built from a b-program.
    pub hot_threads: Option<Vec<String>>,
    /// Canonical rendering of the underlying state.
    pub key: String,
}

/// States are `0..meta.len()`; every state is accepting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    pub initial: usize,
    pub meta: Vec<StateMeta>,
    /// Sorted and duplicate-free.
    pub edges: Vec<(usize, Event, usize)>,
}

impl Lts {
    pub fn new(initial: usize, meta: Vec<StateMeta>, mut edges: Vec<(usize, Event, usize)>) -> Lts {
        edges.sort();
        edges.dedup();
        Lts { initial, meta, edges }
    }

    pub fn num_states(&self) -> usize {
        self.meta.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Outgoing `(event, target)` lists per state.
    pub fn successors(&self) -> Vec<Vec<(Event, usize)>> {
        let mut out = vec![Vec::new(); self.meta.len()];
        for (s, e, t) in &self.edges {
            out[*s].push((e.clone(), *t));
        }
        out
    }

    /// Distinct edge labels, in canonical order.
    pub fn labels(&self) -> Vec<Event> {
        let mut l: Vec<Event> = self.edges.iter().map(|(_, e, _)| e.clone()).collect();
        l.sort();
        l.dedup();
        l
    }

    pub fn has_hot_data(&self) -> bool {
        self.meta.iter().all(|m| m.hot_threads.is_some())
    }

    /// Structural check used after import: ids in range, reachability, deadlock flags.
    pub fn check(&self) -> Result<(), String> {
        let n = self.meta.len();
        if self.initial >= n {
            return Err(format!("initial state {} out of range", self.initial));
        }
        for (s, e, t) in &self.edges {
            if *s >= n || *t >= n {
                return Err(format!("edge {s} -{e}-> {t} out of range"));
            }
        }
        let succ = self.successors();
        for (i, m) in self.meta.iter().enumerate() {
            if m.deadlock && !succ[i].is_empty() {
                return Err(format!("state {i} is flagged deadlock but has successors"));
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            for (_, t) in &succ[s] {
                if !seen[*t] {
                    seen[*t] = true;
                    stack.push(*t);
                }
            }
        }
        match seen.iter().position(|x| !x) {
            Some(i) => Err(format!("state {i} is unreachable")),
            None => Ok(()),
        }
    }
}

/// Uniform successor interface over b-programs and nets.
pub trait Stepper {
    type State: Clone + Eq + Hash;

    fn initial(&self) -> Self::State;
    fn successors(&self, s: &Self::State) -> Vec<(Event, Self::State)>;
    fn status(&self, s: &Self::State) -> Status;
    fn hot_threads(&self, s: &Self::State) -> Option<Vec<String>>;
    fn key(&self, s: &Self::State) -> String;
    /// Largest token count held in `s`; zero where the notion does not apply.
    fn max_tokens(&self, _s: &Self::State) -> u64 {
        0
    }
}

impl Stepper for BProgram {
    type State = BProgramState;

    fn initial(&self) -> BProgramState {
        BProgram::initial(self)
    }

    fn successors(&self, s: &BProgramState) -> Vec<(Event, BProgramState)> {
        BProgram::successors(self, s)
    }

    fn status(&self, s: &BProgramState) -> Status {
        self.classify(s)
    }

    fn hot_threads(&self, s: &BProgramState) -> Option<Vec<String>> {
        Some(BProgram::hot_threads(self, s))
    }

    fn key(&self, s: &BProgramState) -> String {
        s.to_string()
    }
}

impl Stepper for PetriNet {
    type State = Marking;

    fn initial(&self) -> Marking {
        self.initial_marking()
    }

    fn successors(&self, m: &Marking) -> Vec<(Event, Marking)> {
        (0..self.transitions().len())
            .filter_map(|t| self.fire_at(m, t).map(|next| (self.transitions()[t].label.clone(), next)))
            .collect()
    }

    fn status(&self, m: &Marking) -> Status {
        if (0..self.transitions().len()).any(|t| self.enabled_at(m, t)) {
            Status::Running
        } else {
            Status::Deadlock
        }
    }

    fn hot_threads(&self, _m: &Marking) -> Option<Vec<String>> {
        None
    }

    fn key(&self, m: &Marking) -> String {
        m.to_string()
    }

    fn max_tokens(&self, m: &Marking) -> u64 {
        m.0.iter().copied().max().unwrap_or(0)
    }
}

/// An explored state space together with the underlying states, indexed by id.
pub struct Explored<S> {
    pub lts: Lts,
    pub states: Vec<S>,
}

/// Depth-first exploration of the reachable fragment.
pub fn explore<T: Stepper + ?Sized>(stepper: &T, guards: Guards) -> Result<Explored<T::State>, StateSpaceError> {
    let init = stepper.initial();
    check_tokens(stepper, &init, guards)?;
    let mut index: HashMap<T::State, usize> = HashMap::new();
    let mut states = vec![init.clone()];
    index.insert(init, 0);
    let mut edges = Vec::new();
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        let s = states[i].clone();
        let mut seen = HashSet::new();
        for (e, next) in stepper.successors(&s) {
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    check_tokens(stepper, &next, guards)?;
                    let j = states.len();
                    if j as u64 >= guards.max_states {
                        return Err(StateSpaceError::GuardExceeded {
                            guard: "max_states",
                            count: j as u64 + 1,
                            limit: guards.max_states,
                        });
                    }
                    states.push(next.clone());
                    index.insert(next, j);
                    stack.push(j);
                    j
                }
            };
            if seen.insert((e.clone(), j)) {
                edges.push((i, e, j));
            }
        }
    }
    let meta = states
        .iter()
        .map(|s| {
            let status = stepper.status(s);
            StateMeta {
                deadlock: status == Status::Deadlock,
                terminated: status == Status::Terminated,
                hot_threads: stepper.hot_threads(s),
                key: stepper.key(s),
            }
        })
        .collect();
    Ok(Explored { lts: Lts::new(0, meta, edges), states })
}

fn check_tokens<T: Stepper + ?Sized>(stepper: &T, s: &T::State, guards: Guards) -> Result<(), StateSpaceError> {
    let k = stepper.max_tokens(s);
    if k > guards.max_tokens {
        return Err(StateSpaceError::GuardExceeded { guard: "max_tokens", count: k, limit: guards.max_tokens });
    }
    Ok(())
}

pub fn build_lts<T: Stepper + ?Sized>(stepper: &T, guards: Guards) -> Result<Lts, StateSpaceError> {
    explore(stepper, guards).map(|x| x.lts)
}

/// Reachability graph of a validated net.
pub fn build_pn_lts(net: &PetriNet, guards: Guards) -> Result<Lts, StateSpaceError> {
    let diags = net.validate();
    if !diags.is_empty() {
        return Err(StateSpaceError::InvalidNet(diags.join("; ")));
    }
    build_lts(net, guards)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bp::{BThread, Script, SyncStatement};
    use crate::event::Alphabet;
    use crate::pn::NetBuilder;

    #[test]
    fn forever_requesting_thread() {
        let a = Event::new("A");
        let t: Arc<dyn BThread> = Arc::new(Script::cycle("loop", vec![SyncStatement::new().request([a.clone()])]));
        let p = BProgram::new(Alphabet::new([a]), vec![t]).unwrap();
        let lts = build_lts(&p, Guards::default()).unwrap();
        assert_eq!((lts.num_states(), lts.num_edges()), (1, 1));
        assert!(lts.check().is_ok());
    }

    #[test]
    fn guards_trip() {
        let net = NetBuilder::new()
            .place("p", 0)
            .transition("t", Event::new("T"))
            .arc("t", "p", 1)
            .build();
        let err = build_pn_lts(&net, Guards { max_states: 1_000_000, max_tokens: 5 }).unwrap_err();
        assert!(matches!(err, StateSpaceError::GuardExceeded { guard: "max_tokens", .. }));
        let err = build_pn_lts(&net, Guards { max_states: 3, max_tokens: 100 }).unwrap_err();
        assert!(matches!(err, StateSpaceError::GuardExceeded { guard: "max_states", .. }));
    }

    #[test]
    fn invalid_net_refused() {
        let net = NetBuilder::new().place("a", 0).place("b", 0).arc("a", "b", 1).build();
        assert!(matches!(build_pn_lts(&net, Guards::default()), Err(StateSpaceError::InvalidNet(_))));
    }
}

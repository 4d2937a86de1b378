//! Net-to-b-program and transition-system-to-net translations.
//!
//! Each place becomes a b-thread whose local state is its token count. It
//! waits for the labels of adjacent transitions and blocks those it cannot
//! supply. One auxiliary b-thread requests every label forever.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::bp::{BProgram, BProgramState, BThread, BpError, Local, Script, SyncStatement};
use crate::event::{Alphabet, Event, EventSet};
use crate::pn::{Marking, NetBuilder, PetriNet};
use crate::statespace::{explore, Guards, Lts, StateSpaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("place `{place}` has several `{label}` transitions with different arc weights")]
    AmbiguousLabel { place: String, label: String },
    #[error("invalid net: {0}")]
    InvalidNet(String),
    #[error(transparent)]
    Program(#[from] BpError),
    #[error(transparent)]
    StateSpace(#[from] StateSpaceError),
}

/// Token bookkeeping of one place.
#[derive(Debug)]
pub struct PlaceThread {
    name: String,
    init: u64,
    /// label -> (consumed, produced)
    effects: BTreeMap<Event, (u64, u64)>,
    /// Labels that every transition carrying them consumes from this place.
    exclusive: BTreeSet<Event>,
    /// Statement at count `k`, saturating at the last entry.
    stmts: Vec<SyncStatement>,
}

impl PlaceThread {
    fn new(net: &PetriNet, p: usize, owners: &HashMap<Event, Vec<usize>>) -> Result<PlaceThread, TranslateError> {
        let place = &net.places()[p];
        let mut effects: BTreeMap<Event, (u64, u64)> = BTreeMap::new();
        let mut adjacent: BTreeMap<Event, Vec<usize>> = BTreeMap::new();
        for (t, tr) in net.transitions().iter().enumerate() {
            let (pre, post) = (net.pre_weight(p, t), net.post_weight(t, p));
            if pre == 0 && post == 0 {
                continue;
            }
            adjacent.entry(tr.label.clone()).or_default().push(t);
            match effects.get(&tr.label) {
                Some(&w) if w != (pre, post) => {
                    return Err(TranslateError::AmbiguousLabel {
                        place: place.id.clone(),
                        label: tr.label.to_string(),
                    })
                }
                _ => {
                    effects.insert(tr.label.clone(), (pre, post));
                }
            }
        }
        let exclusive = adjacent
            .iter()
            .filter(|(l, ts)| owners[*l].len() == ts.len())
            .map(|(l, _)| l.clone())
            .collect();
        let mut th = PlaceThread { name: place.id.clone(), init: place.tokens, effects, exclusive, stmts: Vec::new() };
        let top = th.effects.values().map(|(pre, _)| *pre).max().unwrap_or(0);
        th.stmts = (0..=top).map(|k| th.statement_at(k)).collect();
        Ok(th)
    }

    fn statement_at(&self, k: u64) -> SyncStatement {
        let blocked: BTreeSet<Event> = self
            .effects
            .iter()
            .filter(|(l, (pre, _))| *pre > k && self.exclusive.contains(*l))
            .map(|(l, _)| l.clone())
            .collect();
        let waits = self.effects.keys().filter(|l| !blocked.contains(*l)).cloned();
        let mut st = SyncStatement::new().wait_for(EventSet::of(waits));
        if !blocked.is_empty() {
            st = st.block(EventSet::Explicit(blocked));
        }
        st
    }

    /// Distinct statements with the smallest count at which each applies.
    pub fn statements(&self) -> Vec<(u64, &SyncStatement)> {
        self.stmts.iter().enumerate().map(|(k, s)| (k as u64, s)).collect()
    }
}

impl BThread for PlaceThread {
    fn name(&self) -> &str {
        &self.name
    }

    fn init(&self) -> Local {
        self.init
    }

    fn view(&self, k: Local) -> Option<Cow<'_, SyncStatement>> {
        let i = (k as usize).min(self.stmts.len() - 1);
        Some(Cow::Borrowed(&self.stmts[i]))
    }

    fn advance(&self, k: Local, e: &Event) -> Local {
        match self.effects.get(e) {
            Some((pre, post)) => k.saturating_sub(*pre) + post,
            None => k,
        }
    }
}

/// A translated net: the program plus typed access to its place threads.
pub struct Translation {
    pub program: BProgram,
    pub places: Vec<Arc<PlaceThread>>,
}

impl Translation {
    /// Readable listing of every generated b-thread.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in &self.places {
            let _ = writeln!(out, "bthread {} (tokens = {})", p.name, p.init);
            let last = p.stmts.len() - 1;
            for (k, st) in p.statements() {
                let cond = if k as usize == last { format!("tokens >= {k}") } else { format!("tokens == {k}") };
                let _ = writeln!(out, "  {cond}: {st}");
            }
            for (l, (pre, post)) in &p.effects {
                let _ = writeln!(out, "  on {l}: tokens += {post} - {pre}");
            }
        }
        let labels: Vec<String> = self.program.alphabet().iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "bthread auxiliary\n  always: request [{}]", labels.join(", "));
        out
    }
}

pub fn translate(net: &PetriNet) -> Result<Translation, TranslateError> {
    let diags = net.validate();
    if !diags.is_empty() {
        return Err(TranslateError::InvalidNet(diags.join("; ")));
    }
    let mut owners: HashMap<Event, Vec<usize>> = HashMap::new();
    for (t, tr) in net.transitions().iter().enumerate() {
        owners.entry(tr.label.clone()).or_default().push(t);
    }
    let alphabet: Alphabet = net.transitions().iter().map(|t| t.label.clone()).collect();
    let mut places = Vec::new();
    for p in 0..net.places().len() {
        places.push(Arc::new(PlaceThread::new(net, p, &owners)?));
    }
    let mut threads: Vec<Arc<dyn BThread>> = places.iter().map(|p| p.clone() as Arc<dyn BThread>).collect();
    let aux = SyncStatement::new().request(alphabet.iter().cloned());
    threads.push(Arc::new(Script::cycle("auxiliary", vec![aux])));
    let program = BProgram::new(alphabet, threads)?;
    Ok(Translation { program, places })
}

pub fn pn_to_bp(net: &PetriNet) -> Result<BProgram, TranslateError> {
    translate(net).map(|t| t.program)
}

/// Outcome of checking the marking / counter-tuple correspondence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimReport {
    pub states: usize,
    pub edges: usize,
}

/// Explores both the net and its translation and checks that mapping a marking
/// to the tuple of place counters (plus the auxiliary thread) is a bisimulation.
pub fn verify_bisimulation(net: &PetriNet, guards: Guards) -> Result<BisimReport, String> {
    let tr = translate(net).map_err(|e| e.to_string())?;
    let pn = explore(net, guards).map_err(|e| e.to_string())?;
    let bp = explore(&tr.program, guards).map_err(|e| e.to_string())?;
    let to_bp = |m: &Marking| BProgramState { locals: m.0.iter().copied().chain([0]).collect() };
    let bp_index: HashMap<&BProgramState, usize> = bp.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    if pn.states.len() != bp.states.len() {
        return Err(format!("net has {} states, translation has {}", pn.states.len(), bp.states.len()));
    }
    let pn_succ = pn.lts.successors();
    let bp_succ = bp.lts.successors();
    for (i, m) in pn.states.iter().enumerate() {
        let s = to_bp(m);
        let Some(&j) = bp_index.get(&s) else {
            return Err(format!("marking {m} has no counterpart in the translation"));
        };
        let lhs: BTreeSet<(Event, BProgramState)> =
            pn_succ[i].iter().map(|(e, t)| (e.clone(), to_bp(&pn.states[*t]))).collect();
        let rhs: BTreeSet<(Event, BProgramState)> =
            bp_succ[j].iter().map(|(e, t)| (e.clone(), bp.states[*t].clone())).collect();
        if lhs != rhs {
            return Err(format!("moves differ at marking {m}"));
        }
    }
    Ok(BisimReport { states: pn.lts.num_states(), edges: pn.lts.num_edges() })
}

/// One place per state holding a single token; one transition per edge.
pub fn lts_to_pn(lts: &Lts) -> PetriNet {
    let mut b = NetBuilder::new();
    for s in 0..lts.num_states() {
        b.place(&format!("s{s}"), u64::from(s == lts.initial));
    }
    for (i, (s, e, t)) in lts.edges.iter().enumerate() {
        let id = format!("t{i}");
        b.transition(&id, e.clone());
        b.arc(&format!("s{s}"), &id, 1);
        b.arc(&id, &format!("s{t}"), 1);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::{build_lts, build_pn_lts, StateMeta};

    fn ev(s: &str) -> Event {
        s.parse().unwrap()
    }

    fn controller(n: u64) -> PetriNet {
        NetBuilder::new()
            .place("p_2", n)
            .place("p_3", 0)
            .helper("cr", ev("ClosingRequest"))
            .helper("or", ev("OpeningRequest"))
            .flow("cr", &["p_2"], &["p_3"])
            .flow("or", &["p_3"], &["p_2"])
            .build()
    }

    #[test]
    fn p2_statements() {
        let tr = translate(&controller(1)).unwrap();
        let p2 = &tr.places[0];
        let st0 = p2.view(0).unwrap();
        assert_eq!(st0.wait_for, EventSet::one(ev("OpeningRequest")));
        assert_eq!(st0.block, EventSet::one(ev("ClosingRequest")));
        let st1 = p2.view(3).unwrap();
        assert_eq!(st1.wait_for, EventSet::of([ev("ClosingRequest"), ev("OpeningRequest")]));
        assert_eq!(st1.block, EventSet::None);
        assert_eq!(p2.advance(1, &ev("ClosingRequest")), 0);
        assert_eq!(p2.advance(0, &ev("OpeningRequest")), 1);
        assert!(tr.dump().contains("tokens == 0: waitFor {OpeningRequest}; block {ClosingRequest}"));
    }

    #[test]
    fn bisimulation_on_controller() {
        for n in 0..3 {
            verify_bisimulation(&controller(n), Guards::default()).unwrap();
        }
    }

    #[test]
    fn inert_place() {
        let net = NetBuilder::new().place("p", 2).build();
        let p = pn_to_bp(&net).unwrap();
        assert_eq!(p.classify(&p.initial()), crate::bp::Status::Terminated);
    }

    #[test]
    fn ambiguous_label_rejected() {
        let net = NetBuilder::new()
            .place("p", 2)
            .transition("a", ev("X"))
            .transition("b", ev("X"))
            .arc("p", "a", 1)
            .arc("p", "b", 2)
            .build();
        assert!(matches!(pn_to_bp(&net), Err(TranslateError::AmbiguousLabel { .. })));
    }

    #[test]
    fn lts_round_trip_small() {
        let l = Lts::new(0, vec![StateMeta::default()], vec![(0, ev("A"), 0)]);
        let net = lts_to_pn(&l);
        assert_eq!((net.places().len(), net.transitions().len(), net.arcs().len()), (1, 1, 2));
        let back = build_pn_lts(&net, Guards::default()).unwrap();
        assert_eq!((back.num_states(), back.num_edges()), (1, 1));
        let empty = Lts::new(0, vec![StateMeta::default()], vec![]);
        let net = lts_to_pn(&empty);
        assert_eq!((net.places().len(), net.transitions().len()), (1, 0));
        let _ = build_lts(&net, Guards::default()).unwrap();
    }
}

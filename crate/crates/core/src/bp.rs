//! Behavioral-programming execution semantics.
//!
//! A b-thread is a pair of pure functions over a comparable local state: `view`
//! yields the statement submitted at a synchronization point (or `None` once the
//! thread is done) and `advance` moves it past a selected event.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::event::{Alphabet, Event, EventSet};

/// Local state of a single b-thread.
pub type Local = u64;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SyncStatement {
    pub request: Vec<Event>,
    pub wait_for: EventSet,
    pub block: EventSet,
    pub priority: i64,
    pub hot: bool,
}

impl SyncStatement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn request<I: IntoIterator<Item = Event>>(mut self, events: I) -> Self {
        for e in events {
            if !self.request.contains(&e) {
                self.request.push(e);
            }
        }
        self
    }

    pub fn wait_for(mut self, set: EventSet) -> Self {
        self.wait_for = set;
        self
    }

    pub fn block(mut self, set: EventSet) -> Self {
        self.block = set;
        self
    }

    pub fn priority(mut self, p: i64) -> Self {
        self.priority = p;
        self
    }

    pub fn hot(mut self, hot: bool) -> Self {
        self.hot = hot;
        self
    }

    /// Whether the owning thread is advanced by `e`.
    pub fn triggers(&self, e: &Event) -> bool {
        self.request.contains(e) || self.wait_for.contains(e)
    }
}

impl fmt::Display for SyncStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.request.is_empty() {
            let r: Vec<String> = self.request.iter().map(|e| e.to_string()).collect();
            parts.push(format!("request [{}]", r.join(", ")));
        }
        if !self.wait_for.is_empty_syntactically() {
            parts.push(format!("waitFor {}", self.wait_for));
        }
        if !self.block.is_empty_syntactically() {
            parts.push(format!("block {}", self.block));
        }
        if self.priority != 0 {
            parts.push(format!("priority {}", self.priority));
        }
        if self.hot {
            parts.push("hot".to_string());
        }
        if parts.is_empty() {
            f.write_str("idle")
        } else {
            f.write_str(&parts.join("; "))
        }
    }
}

pub trait BThread: Send + Sync {
    fn name(&self) -> &str;
    fn init(&self) -> Local;
    /// `None` means the thread has terminated.
    fn view(&self, state: Local) -> Option<Cow<'_, SyncStatement>>;
    /// Only called with events the current statement requests or waits for.
    fn advance(&self, state: Local, e: &Event) -> Local;
}

/// One node of a [`Script`].
#[derive(Clone, Debug)]
pub struct Node {
    /// `None` marks a terminal node.
    pub stmt: Option<SyncStatement>,
    /// First matching branch wins; otherwise `default`.
    pub branches: Vec<(EventSet, Local)>,
    pub default: Local,
}

/// A b-thread given as an explicit finite-state script.
#[derive(Clone, Debug)]
pub struct Script {
    name: String,
    init: Local,
    nodes: Vec<Node>,
}

impl Script {
    pub fn new(name: impl Into<String>, init: Local, nodes: Vec<Node>) -> Script {
        Script { name: name.into(), init, nodes }
    }

    /// `while(true) { sync(s0); sync(s1); ... }`
    pub fn cycle(name: impl Into<String>, stmts: Vec<SyncStatement>) -> Script {
        let n = stmts.len() as Local;
        let nodes = stmts
            .into_iter()
            .enumerate()
            .map(|(i, s)| Node { stmt: Some(s), branches: Vec::new(), default: (i as Local + 1) % n })
            .collect();
        Script::new(name, 0, nodes)
    }

    /// Statements executed once each, then the thread is done.
    pub fn sequence(name: impl Into<String>, stmts: Vec<SyncStatement>) -> Script {
        let n = stmts.len();
        let mut nodes: Vec<Node> = stmts
            .into_iter()
            .enumerate()
            .map(|(i, s)| Node { stmt: Some(s), branches: Vec::new(), default: i as Local + 1 })
            .collect();
        nodes.push(Node { stmt: None, branches: Vec::new(), default: n as Local });
        Script::new(name, 0, nodes)
    }

    /// Statements executed once each; the last one is then held forever.
    pub fn then_hold(name: impl Into<String>, stmts: Vec<SyncStatement>) -> Script {
        let last = stmts.len() as Local - 1;
        let nodes = stmts
            .into_iter()
            .enumerate()
            .map(|(i, s)| Node {
                stmt: Some(s),
                branches: Vec::new(),
                default: (i as Local + 1).min(last),
            })
            .collect();
        Script::new(name, 0, nodes)
    }
}

impl BThread for Script {
    fn name(&self) -> &str {
        &self.name
    }

    fn init(&self) -> Local {
        self.init
    }

    fn view(&self, state: Local) -> Option<Cow<'_, SyncStatement>> {
        self.nodes[state as usize].stmt.as_ref().map(Cow::Borrowed)
    }

    fn advance(&self, state: Local, e: &Event) -> Local {
        let node = &self.nodes[state as usize];
        node.branches
            .iter()
            .find(|(set, _)| set.contains(e))
            .map(|(_, next)| *next)
            .unwrap_or(node.default)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BpError {
    #[error("duplicate b-thread name `{0}`")]
    DuplicateThread(String),
    #[error("b-thread `{thread}` requests `{event}` which is outside the alphabet")]
    OutsideAlphabet { thread: String, event: String },
    #[error("event `{0}` is not selectable in this state")]
    NotSelectable(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BProgramState {
    pub locals: Box<[Local]>,
}

impl fmt::Display for BProgramState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l: Vec<String> = self.locals.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", l.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Running,
    Deadlock,
    Terminated,
}

pub type Statements<'a> = Vec<Option<Cow<'a, SyncStatement>>>;

#[derive(Clone)]
pub struct BProgram {
    alphabet: Alphabet,
    threads: Vec<Arc<dyn BThread>>,
}

impl fmt::Debug for BProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.threads.iter().map(|t| t.name()).collect();
        f.debug_struct("BProgram")
            .field("alphabet", &self.alphabet.len())
            .field("threads", &names)
            .finish()
    }
}

impl BProgram {
    pub fn new(alphabet: Alphabet, threads: Vec<Arc<dyn BThread>>) -> Result<BProgram, BpError> {
        let mut seen = HashSet::new();
        for t in &threads {
            if !seen.insert(t.name().to_string()) {
                return Err(BpError::DuplicateThread(t.name().to_string()));
            }
        }
        Ok(BProgram { alphabet, threads })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn threads(&self) -> &[Arc<dyn BThread>] {
        &self.threads
    }

    pub fn with_thread(mut self, t: Arc<dyn BThread>) -> Result<BProgram, BpError> {
        self.threads.push(t);
        BProgram::new(self.alphabet, self.threads)
    }

    pub fn initial(&self) -> BProgramState {
        BProgramState { locals: self.threads.iter().map(|t| t.init()).collect() }
    }

    pub fn statements<'a>(&'a self, s: &BProgramState) -> Statements<'a> {
        self.threads.iter().zip(s.locals.iter()).map(|(t, &l)| t.view(l)).collect()
    }

    /// Named statements in declaration order; `None` for terminated threads.
    pub fn named_statements<'a>(
        &'a self,
        s: &BProgramState,
    ) -> Vec<(&'a str, Option<Cow<'a, SyncStatement>>)> {
        self.threads.iter().map(|t| t.name()).zip(self.statements(s)).collect()
    }

    fn enabled_from(&self, stmts: &Statements<'_>) -> BTreeMap<Event, i64> {
        let mut req: BTreeMap<Event, i64> = BTreeMap::new();
        for st in stmts.iter().flatten() {
            for e in &st.request {
                let p = req.entry(e.clone()).or_insert(st.priority);
                *p = (*p).max(st.priority);
            }
        }
        req.retain(|e, _| !stmts.iter().flatten().any(|st| st.block.contains(e)));
        req
    }

    fn selectable_from(&self, stmts: &Statements<'_>) -> Vec<Event> {
        let enabled = self.enabled_from(stmts);
        let Some(top) = enabled.values().copied().max() else {
            return Vec::new();
        };
        enabled.into_iter().filter(|(_, p)| *p == top).map(|(e, _)| e).collect()
    }

    pub fn enabled_events(&self, s: &BProgramState) -> BTreeSet<Event> {
        self.enabled_from(&self.statements(s)).into_keys().collect()
    }

    /// Enabled events surviving the priority filter, in canonical order.
    pub fn selectable_events(&self, s: &BProgramState) -> Vec<Event> {
        self.selectable_from(&self.statements(s))
    }

    pub(crate) fn advance_with(&self, s: &BProgramState, stmts: &Statements<'_>, e: &Event) -> BProgramState {
        let locals = self
            .threads
            .iter()
            .zip(s.locals.iter())
            .zip(stmts.iter())
            .map(|((t, &l), st)| match st {
                Some(st) if st.triggers(e) => t.advance(l, e),
                _ => l,
            })
            .collect();
        BProgramState { locals }
    }

    pub fn advance(&self, s: &BProgramState, e: &Event) -> Result<BProgramState, BpError> {
        let stmts = self.statements(s);
        if !self.selectable_from(&stmts).contains(e) {
            return Err(BpError::NotSelectable(e.to_string()));
        }
        Ok(self.advance_with(s, &stmts, e))
    }

    /// Selectable events paired with their successor states.
    pub fn successors(&self, s: &BProgramState) -> Vec<(Event, BProgramState)> {
        let stmts = self.statements(s);
        self.selectable_from(&stmts)
            .into_iter()
            .map(|e| {
                let next = self.advance_with(s, &stmts, &e);
                (e, next)
            })
            .collect()
    }

    pub fn classify(&self, s: &BProgramState) -> Status {
        let stmts = self.statements(s);
        if !self.selectable_from(&stmts).is_empty() {
            Status::Running
        } else if stmts.iter().flatten().any(|st| !st.request.is_empty()) {
            Status::Deadlock
        } else {
            Status::Terminated
        }
    }

    /// Names of threads whose current statement is hot.
    pub fn hot_threads(&self, s: &BProgramState) -> Vec<String> {
        self.named_statements(s)
            .into_iter()
            .filter(|(_, st)| st.as_ref().is_some_and(|st| st.hot))
            .map(|(n, _)| n.to_string())
            .collect()
    }

    /// Requested events that lie outside the alphabet in state `s`.
    pub fn check_requests(&self, s: &BProgramState) -> Result<(), BpError> {
        for (name, st) in self.named_statements(s) {
            for e in st.iter().flat_map(|st| st.request.iter()) {
                if !self.alphabet.contains(e) {
                    return Err(BpError::OutsideAlphabet { thread: name.to_string(), event: e.to_string() });
                }
            }
        }
        Ok(())
    }

    /// Seeded random run. Stops at `max_steps`, deadlock or termination.
    pub fn simulate(&self, seed: u64, max_steps: usize) -> Vec<Event> {
        self.simulate_with_end(seed, max_steps).0
    }

    /// Like [`BProgram::simulate`], also reporting the status of the last state.
    pub fn simulate_with_end(&self, seed: u64, max_steps: usize) -> (Vec<Event>, Status) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = self.initial();
        let mut log = Vec::new();
        while log.len() < max_steps {
            let stmts = self.statements(&s);
            let sel = self.selectable_from(&stmts);
            if sel.is_empty() {
                break;
            }
            let e = sel[rng.gen_range(0..sel.len())].clone();
            assert!(
                stmts.iter().flatten().any(|st| st.request.contains(&e))
                    && !stmts.iter().flatten().any(|st| st.block.contains(&e)),
                "selected event {e} is not requested-and-unblocked"
            );
            s = self.advance_with(&s, &stmts, &e);
            log.push(e);
        }
        (log, self.classify(&s))
    }
}

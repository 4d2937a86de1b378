//! Random model generators and the engine invariants checked over them.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use bpnet::equiv::{compare, project_trace, replays, Side, Verdict};
use bpnet::statespace::{build_pn_lts, StateMeta};
use bpnet::translate::verify_bisimulation;
use bpnet::{Alphabet, BProgram, BThread, Event, EventSet, Guards, Lts, NetBuilder, PetriNet, Script, SyncStatement};
use proptest::prelude::*;

pub const LABELS: [&str; 4] = ["A", "B", "C", "D"];

fn ev(i: usize) -> Event {
    Event::new(LABELS[i])
}

fn mask(m: u8) -> Vec<Event> {
    (0..LABELS.len()).filter(|i| m >> i & 1 == 1).map(ev).collect()
}

#[derive(Clone, Debug)]
pub struct StmtSpec {
    pub request: u8,
    pub wait: u8,
    pub block: u8,
    pub priority: i64,
    pub hot: bool,
}

pub type ProgramSpec = Vec<Vec<StmtSpec>>;

pub fn arb_program() -> impl Strategy<Value = ProgramSpec> {
    let stmt = (0u8..16, 0u8..16, 0u8..16, 0i64..3, any::<bool>())
        .prop_map(|(request, wait, block, priority, hot)| StmtSpec { request, wait, block, priority, hot });
    prop::collection::vec(prop::collection::vec(stmt, 1..4), 1..4)
}

pub fn build_program(spec: &ProgramSpec) -> BProgram {
    let threads: Vec<Arc<dyn BThread>> = spec
        .iter()
        .enumerate()
        .map(|(i, stmts)| {
            let stmts = stmts
                .iter()
                .map(|s| {
                    SyncStatement::new()
                        .request(mask(s.request))
                        .wait_for(EventSet::of(mask(s.wait)))
                        .block(EventSet::of(mask(s.block)))
                        .priority(s.priority)
                        .hot(s.hot)
                })
                .collect();
            Arc::new(Script::cycle(format!("t{i}"), stmts)) as Arc<dyn BThread>
        })
        .collect();
    BProgram::new(Alphabet::new((0..LABELS.len()).map(ev)), threads).unwrap()
}

/// At every state of a random walk: each selectable event is requested by some
/// statement, blocked by none, and carries the highest priority among enabled events.
pub fn selection_safety(spec: &ProgramSpec, walk: &[usize]) -> Result<(), String> {
    let p = build_program(spec);
    let mut s = p.initial();
    for &k in walk {
        let stmts = p.statements(&s);
        let live: Vec<&SyncStatement> = stmts.iter().flatten().map(|c| c.as_ref()).collect();
        let prio = |e: &Event| live.iter().filter(|st| st.request.contains(e)).map(|st| st.priority).max();
        let enabled = p.enabled_events(&s);
        let top = enabled.iter().filter_map(prio).max();
        let sel = p.selectable_events(&s);
        for e in &sel {
            if !live.iter().any(|st| st.request.contains(e)) {
                return Err(format!("{e} selectable but not requested"));
            }
            if live.iter().any(|st| st.block.contains(e)) {
                return Err(format!("{e} selectable but blocked"));
            }
            if prio(e) != top {
                return Err(format!("{e} selectable below the top priority"));
            }
        }
        if sel.is_empty() {
            break;
        }
        s = p.advance(&s, &sel[k % sel.len()]).map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Threads whose statement neither requests nor waits for the selected event keep their state.
pub fn frame_property(spec: &ProgramSpec, walk: &[usize]) -> Result<(), String> {
    let p = build_program(spec);
    let mut s = p.initial();
    for &k in walk {
        let succ = p.successors(&s);
        if succ.is_empty() {
            break;
        }
        let stmts = p.statements(&s);
        for (e, next) in &succ {
            for (i, st) in stmts.iter().enumerate() {
                let moves = st.as_ref().is_some_and(|st| st.triggers(e));
                if !moves && next.locals[i] != s.locals[i] {
                    return Err(format!("thread {i} moved on {e} without requesting or waiting"));
                }
            }
        }
        s = succ[k % succ.len()].1.clone();
    }
    Ok(())
}

pub fn simulate_determinism(spec: &ProgramSpec, seed: u64) -> Result<(), String> {
    let p = build_program(spec);
    let a = p.simulate_with_end(seed, 30);
    let b = p.simulate_with_end(seed, 30);
    if a != b {
        return Err("same seed, different runs".into());
    }
    let mut s = p.initial();
    for e in &a.0 {
        s = p.advance(&s, e).map_err(|x| format!("simulated run is not a legal run: {x}"))?;
    }
    Ok(())
}

pub fn arb_trace() -> impl Strategy<Value = (Vec<usize>, u8)> {
    (prop::collection::vec(0usize..4, 0..12), 0u8..16)
}

pub fn projection_idempotent(trace: &[usize], shared: u8) -> Result<(), String> {
    let t: Vec<Event> = trace.iter().map(|&i| ev(i)).collect();
    let sh: BTreeSet<Event> = mask(shared).into_iter().collect();
    let once = project_trace(&t, &sh);
    if project_trace(&once, &sh) != once {
        return Err("projection is not idempotent".into());
    }
    if once.iter().any(|e| !sh.contains(e)) {
        return Err("projection kept a hidden event".into());
    }
    Ok(())
}

/// Small transition systems over `a`, `b` and the hidden `h`.
pub fn arb_lts() -> impl Strategy<Value = Lts> {
    (1usize..6).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0usize..3, 0..n), 0..10).prop_map(move |edges| {
            let names = ["a", "b", "h"];
            let edges = edges.into_iter().map(|(s, l, t)| (s, Event::new(names[l]), t)).collect();
            Lts::new(0, vec![StateMeta::default(); n], edges)
        })
    })
}

pub fn shared_ab() -> BTreeSet<Event> {
    [Event::new("a"), Event::new("b")].into_iter().collect()
}

pub fn compare_reflexive(a: &Lts) -> Result<(), String> {
    let r = compare(a, a, &shared_ab());
    if r.verdict != Verdict::Equal || !r.witnesses.is_empty() {
        return Err(format!("compare(a, a) = {}", r.verdict));
    }
    Ok(())
}

pub fn compare_antisymmetric(a: &Lts, b: &Lts) -> Result<(), String> {
    let sh = shared_ab();
    let (ab, ba) = (compare(a, b, &sh).verdict, compare(b, a, &sh).verdict);
    let mirrored = match ab {
        Verdict::Equal => Verdict::Equal,
        Verdict::LeftStrictSubset => Verdict::RightStrictSubset,
        Verdict::RightStrictSubset => Verdict::LeftStrictSubset,
        Verdict::Incomparable => Verdict::Incomparable,
    };
    if ba != mirrored {
        return Err(format!("compare(a, b) = {ab} but compare(b, a) = {ba}"));
    }
    Ok(())
}

/// Every witness trace runs on its own side only; lasso unrollings stay on it.
pub fn witness_replay(a: &Lts, b: &Lts) -> Result<(), String> {
    let sh = shared_ab();
    let r = compare(a, b, &sh);
    for w in &r.witnesses {
        let (own, other) = match w.side {
            Side::Left => (a, b),
            Side::Right => (b, a),
        };
        if !replays(own, &sh, &w.trace) || replays(other, &sh, &w.trace) {
            return Err(format!("witness {:?} does not separate the systems", w.trace));
        }
        if let Some(l) = &w.lasso {
            let mut word = l.prefix.clone();
            for _ in 0..3 {
                word.extend(l.cycle.iter().cloned());
                if !replays(own, &sh, &word) {
                    return Err("lasso unrolling leaves its side".into());
                }
            }
            if !word.starts_with(&w.trace) && !w.trace.starts_with(&word) {
                return Err("lasso does not extend the witness".into());
            }
        }
    }
    Ok(())
}

/// (place, weight) pairs.
pub type Arcs = Vec<(usize, u64)>;

#[derive(Clone, Debug)]
pub struct NetSpec {
    pub tokens: Vec<u64>,
    /// (inputs, outputs) as (place, weight)
    pub transitions: Vec<(Arcs, Arcs)>,
}

pub fn arb_net() -> impl Strategy<Value = NetSpec> {
    (1usize..=6).prop_flat_map(|np| {
        let side = prop::collection::vec((0..np, 1u64..=2), 0..3);
        (
            prop::collection::vec(0u64..=3, np),
            prop::collection::vec((side.clone(), side), 0..=6),
        )
            .prop_map(|(tokens, transitions)| NetSpec { tokens, transitions })
    })
}

/// Distinct labels per transition; duplicate arcs between the same pair are merged.
pub fn build_net(spec: &NetSpec) -> PetriNet {
    let mut b = NetBuilder::new();
    for (i, &k) in spec.tokens.iter().enumerate() {
        b.place(&format!("p{i}"), k);
    }
    for (j, (ins, outs)) in spec.transitions.iter().enumerate() {
        let t = format!("t{j}");
        b.transition(&t, Event::with("T", [j]));
        let mut seen = BTreeSet::new();
        for &(p, w) in ins {
            if seen.insert(p) {
                b.arc(&format!("p{p}"), &t, w);
            }
        }
        seen.clear();
        for &(p, w) in outs {
            if seen.insert(p) {
                b.arc(&t, &format!("p{p}"), w);
            }
        }
    }
    b.build()
}

pub const BISIM_GUARDS: Guards = Guards { max_states: 2_000, max_tokens: 12 };

/// Ok(false) when the net is too large to explore under the test guards.
pub fn translation_bisimilar(spec: &NetSpec) -> Result<bool, String> {
    let net = build_net(spec);
    if build_pn_lts(&net, BISIM_GUARDS).is_err() {
        return Ok(false);
    }
    verify_bisimulation(&net, BISIM_GUARDS).map(|_| true)
}

/// With nothing hidden, EQUAL means the bounded counts have no one-sided traces.
pub fn equal_implies_bounded_agreement(a: &Lts, b: &Lts, max_len: usize) -> Result<(), String> {
    let all: BTreeSet<Event> = ["a", "b", "h"].into_iter().map(Event::new).collect();
    if compare(a, b, &all).verdict != Verdict::Equal {
        return Ok(());
    }
    let c = bpnet::equiv::bounded_compare(a, b, &all, max_len, 1 << 20).map_err(|e| e.to_string())?;
    if c.only_a != 0 || c.only_b != 0 {
        return Err(format!("EQUAL but bounded counts {}", c.csv(max_len)));
    }
    Ok(())
}

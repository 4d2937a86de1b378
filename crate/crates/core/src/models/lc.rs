//! Level crossing: railway sensors, barriers and their controller.
//!
//! Tracks are numbered from 1. With faults enabled, `Entering` and `Raise`
//! carry a trailing fault flag so that faulty and regular occurrences are
//! distinct events.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::bp::{BProgram, BThread, Node, Script, SyncStatement};
use crate::event::{Alphabet, Event, EventSet};
use crate::pn::{NetBuilder, PetriNet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcBpVariant {
    /// R1 to R4.
    Original,
    /// R1, R2* and R3.
    ModifiedR2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcPnVariant {
    Single1987,
    Multi2016,
}

pub fn approaching(i: usize) -> Event {
    Event::with("Approaching", [i])
}

pub fn leaving(i: usize) -> Event {
    Event::with("Leaving", [i])
}

pub fn lower() -> Event {
    Event::new("Lower")
}

/// `Entering(i)` without faults, `Entering(i, fault)` with.
pub fn entering(i: usize, faults: bool, fault: bool) -> Event {
    if faults {
        Event::with("Entering", [crate::Value::from(i), fault.into()])
    } else {
        Event::with("Entering", [i])
    }
}

pub fn raise(faults: bool, fault: bool) -> Event {
    if faults {
        Event::with("Raise", [fault])
    } else {
        Event::new("Raise")
    }
}

pub fn helper_events() -> BTreeSet<Event> {
    ["ClosingRequest", "OpeningRequest", "KeepDown"].into_iter().map(Event::new).collect()
}

pub fn alphabet(n: usize, faults: bool) -> Alphabet {
    let mut a = Alphabet::default();
    for i in 1..=n {
        a.insert(approaching(i));
        a.insert(entering(i, faults, false));
        a.insert(leaving(i));
        if faults {
            a.insert(entering(i, true, true));
        }
    }
    a.insert(lower());
    a.insert(raise(faults, false));
    if faults {
        a.insert(raise(true, true));
    }
    a
}

fn req(e: Event) -> SyncStatement {
    SyncStatement::new().request([e])
}

fn wait(set: EventSet) -> SyncStatement {
    SyncStatement::new().wait_for(set)
}

/// R2: lower on approach, then raise.
fn r2(faults: bool) -> Script {
    let mut raise_st = req(raise(faults, false));
    if faults {
        raise_st = raise_st.wait_for(EventSet::one(raise(true, true)));
    }
    Script::cycle(
        "R2: Barriers Dynamics",
        vec![wait(EventSet::label("Approaching")), req(lower()), raise_st],
    )
}

/// R2*: keeps the barriers down when a train approaches right after another left.
fn r2_modified(faults: bool) -> Script {
    let any_app = EventSet::label("Approaching");
    let up = raise(faults, false);
    let raise_set = if faults { EventSet::of([up.clone(), raise(true, true)]) } else { EventSet::one(up.clone()) };
    let node = |stmt: SyncStatement, default: u64| Node { stmt: Some(stmt), branches: Vec::new(), default };
    let nodes = vec![
        node(wait(any_app.clone()), 1),
        node(req(lower()), 2),
        node(wait(EventSet::label("Leaving")), 3),
        Node {
            stmt: Some(req(up.clone()).wait_for(EventSet::union([any_app.clone(), raise_set.clone()]))),
            branches: vec![(raise_set.clone(), 4)],
            default: 6,
        },
        node(wait(any_app), 5),
        node(req(lower()), 2),
        node(req(up).wait_for(raise_set).block(EventSet::label("Entering")), 7),
        node(req(lower()), 2),
    ];
    Script::new("R2*: Modified Barriers Dynamics", 0, nodes)
}

pub fn lc_bp(n: usize, faults: bool, variant: LcBpVariant) -> BProgram {
    assert!(n >= 1, "at least one track");
    let mut threads: Vec<Arc<dyn BThread>> = Vec::new();
    for i in 1..=n {
        let mut enter = req(entering(i, faults, false));
        if faults {
            enter = enter.wait_for(EventSet::one(entering(i, true, true)));
        }
        threads.push(Arc::new(Script::cycle(
            format!("R1: Railway Sensors {i}"),
            vec![req(approaching(i)), enter, req(leaving(i))],
        )));
    }
    match variant {
        LcBpVariant::Original => threads.push(Arc::new(r2(faults))),
        LcBpVariant::ModifiedR2 => threads.push(Arc::new(r2_modified(faults))),
    }
    for i in 1..=n {
        threads.push(Arc::new(Script::cycle(
            format!("R3: no entering while barriers are up {i}"),
            vec![
                wait(EventSet::one(lower())).block(EventSet::one(entering(i, faults, false))),
                wait(EventSet::one(raise(faults, false))),
            ],
        )));
    }
    if variant == LcBpVariant::Original {
        for i in 1..=n {
            threads.push(Arc::new(Script::cycle(
                format!("R4: no raising while a train is inside {i}"),
                vec![
                    wait(EventSet::one(approaching(i))),
                    wait(EventSet::one(leaving(i))).block(EventSet::one(raise(faults, false))),
                ],
            )));
        }
    }
    if faults {
        for i in 1..=n {
            threads.push(Arc::new(Script::cycle(
                format!("UnobservableEntering_{i}"),
                vec![
                    wait(EventSet::one(approaching(i))),
                    req(entering(i, true, true)).wait_for(EventSet::one(entering(i, true, false))),
                ],
            )));
        }
        threads.push(Arc::new(Script::cycle(
            "Premature Raise",
            vec![
                wait(EventSet::one(lower())),
                req(raise(true, true)).wait_for(EventSet::one(raise(true, false))),
            ],
        )));
    }
    BProgram::new(alphabet(n, faults), threads).expect("thread names are unique")
}

/// The unified single-track net: railway, barriers, controller and the
/// interlock `p9` between lowering and entering.
fn single_1987() -> PetriNet {
    let mut b = NetBuilder::new();
    b.place("r0", 1).place("r1", 0).place("r2", 0);
    for p in ["p1", "p3", "p4", "p5", "p6", "p8", "p9"] {
        b.place(p, 0);
    }
    b.place("p2", 1).place("p7", 1);
    b.transition("approaching", approaching(1))
        .transition("entering", entering(1, false, false))
        .transition("leaving", leaving(1))
        .helper("closing_request", Event::new("ClosingRequest"))
        .helper("opening_request", Event::new("OpeningRequest"))
        .transition("lower", lower())
        .transition("raise", raise(false, false));
    b.flow("approaching", &["r0"], &["r1", "p1"])
        .flow("entering", &["r1", "p9"], &["r2"])
        .flow("leaving", &["r2"], &["r0", "p5"])
        .flow("closing_request", &["p1", "p2"], &["p3", "p4"])
        .flow("opening_request", &["p3", "p5"], &["p2", "p6"])
        .flow("lower", &["p4", "p7"], &["p8", "p9"])
        .flow("raise", &["p6", "p8"], &["p7"]);
    b.build()
}

pub fn lc_pn(n: usize, faults: bool, variant: LcPnVariant) -> PetriNet {
    match variant {
        LcPnVariant::Single1987 => {
            assert!(n == 1 && !faults, "the 1987 net covers one track without faults");
            single_1987()
        }
        LcPnVariant::Multi2016 => multi_2016(n, faults),
    }
}

/// Multi-track net: the railway subsystem is replicated per track, the
/// controller counts trains through `p2`/`p3` and `p6` holds one token per
/// track that is not inside the zone. `KeepDown` grants entry when the
/// barriers are already down.
fn multi_2016(n: usize, faults: bool) -> PetriNet {
    assert!(n >= 1, "at least one track");
    let n64 = n as u64;
    let mut b = NetBuilder::new();
    for i in 1..=n {
        b.place(&format!("r0_{i}"), 1).place(&format!("r1_{i}"), 0).place(&format!("r2_{i}"), 0);
    }
    for p in ["p1", "p3", "p4", "p5", "p8", "p9"] {
        b.place(p, 0);
    }
    b.place("p2", n64).place("p6", n64).place("p7", 1);
    for i in 1..=n {
        let names = ["r0", "r1", "r2", "approaching", "entering", "leaving"].map(|x| format!("{x}_{i}"));
        let [r0, r1, r2, app, ent, lea] = names.each_ref().map(String::as_str);
        b.transition(app, approaching(i)).transition(ent, entering(i, faults, false)).transition(lea, leaving(i));
        b.flow(app, &[r0], &[r1, "p1"]).flow(ent, &[r1, "p9"], &[r2]).flow(lea, &[r2], &[r0, "p5"]);
        if faults {
            let fe = format!("fault_entering_{i}");
            b.fault(&fe, entering(i, true, true)).flow(&fe, &[r1, "p9"], &[r2]);
        }
    }
    b.helper("closing_request", Event::new("ClosingRequest"))
        .helper("opening_request", Event::new("OpeningRequest"))
        .helper("keep_down", Event::new("KeepDown"))
        .transition("lower", lower())
        .transition("raise", raise(faults, false));
    b.flow("closing_request", &["p1", "p2", "p6"], &["p3", "p4"])
        .flow("opening_request", &["p5", "p3"], &["p2", "p6"])
        .flow("lower", &["p4", "p7"], &["p8", "p9"])
        .flow("keep_down", &["p4", "p8"], &["p8", "p9"])
        .flow("raise", &["p8"], &["p7"])
        .arc("p6", "raise", n64)
        .arc("raise", "p6", n64);
    if faults {
        b.fault("fault_raise", raise(true, true)).flow("fault_raise", &["p8", "p9"], &["p7"]);
    }
    b.build()
}

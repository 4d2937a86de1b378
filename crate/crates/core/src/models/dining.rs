//! Dining philosophers. Philosopher `i` sits between fork `i` (its right)
//! and fork `i - 1` (its left, cyclically).

use std::sync::Arc;

use crate::bp::{BProgram, BThread, Script, SyncStatement};
use crate::event::{Alphabet, Event, EventSet};
use crate::pn::{NetBuilder, PetriNet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiningVariant {
    Base,
    WithLiveness,
    Arbitrator,
    PriorityOrder,
}

pub fn take(i: usize, side: &str) -> Event {
    Event::with("Take", [crate::Value::from(i), side.into()])
}

pub fn put(i: usize, side: &str) -> Event {
    Event::with("Put", [crate::Value::from(i), side.into()])
}

fn next(i: usize, n: usize) -> usize {
    i % n + 1
}

/// Both events that pick up fork `i`.
pub fn fork_taken(i: usize, n: usize) -> EventSet {
    EventSet::of([take(i, "R"), take(next(i, n), "L")])
}

pub fn fork_put(i: usize, n: usize) -> EventSet {
    EventSet::of([put(i, "R"), put(next(i, n), "L")])
}

fn takes(i: usize) -> [Event; 2] {
    [take(i, "R"), take(i, "L")]
}

fn puts(i: usize) -> [Event; 2] {
    [put(i, "R"), put(i, "L")]
}

pub fn dining_bp(n: usize, variant: DiningVariant) -> BProgram {
    assert!(n >= 2, "at least two philosophers");
    let mut sigma = Alphabet::default();
    let mut threads: Vec<Arc<dyn BThread>> = Vec::new();
    for i in 1..=n {
        for e in takes(i).into_iter().chain(puts(i)) {
            sigma.insert(e);
        }
        threads.push(Arc::new(Script::cycle(
            format!("Fork {i} behavior"),
            vec![
                SyncStatement::new().wait_for(fork_taken(i, n)).block(fork_put(i, n)),
                SyncStatement::new().wait_for(fork_put(i, n)).block(fork_taken(i, n)),
            ],
        )));
        let prio = if variant == DiningVariant::PriorityOrder { (n - i) as i64 } else { 0 };
        let t = SyncStatement::new().request(takes(i)).priority(prio);
        let p = SyncStatement::new().request(puts(i)).priority(prio);
        threads.push(Arc::new(Script::cycle(
            format!("Philosopher {i} behavior"),
            vec![t.clone(), t, p.clone(), p],
        )));
    }
    match variant {
        DiningVariant::WithLiveness => {
            for i in 1..=n {
                threads.push(Arc::new(Script::cycle(
                    format!("[](take -> <>put) {i}"),
                    vec![
                        SyncStatement::new().wait_for(fork_taken(i, n)),
                        SyncStatement::new().wait_for(fork_put(i, n)).hot(true),
                    ],
                )));
                let hungry = SyncStatement::new().wait_for(EventSet::of(takes(i))).hot(true);
                let full = SyncStatement::new().wait_for(EventSet::of(puts(i)));
                threads.push(Arc::new(Script::cycle(
                    format!("NoStarvation {i}"),
                    vec![hungry.clone(), hungry, full.clone(), full],
                )));
            }
        }
        DiningVariant::Arbitrator => {
            let any_take = EventSet::label("TakeSemaphore");
            threads.push(Arc::new(Script::cycle(
                "Semaphore",
                vec![
                    SyncStatement::new().wait_for(any_take.clone()),
                    SyncStatement::new().wait_for(EventSet::label("ReleaseSemaphore")).block(any_take),
                ],
            )));
            for i in 1..=n {
                let (acq, rel) = (Event::with("TakeSemaphore", [i]), Event::with("ReleaseSemaphore", [i]));
                sigma.insert(acq.clone());
                sigma.insert(rel.clone());
                let eat = SyncStatement::new().wait_for(EventSet::of(puts(i)));
                threads.push(Arc::new(Script::cycle(
                    format!("Take semaphore {i}"),
                    vec![
                        SyncStatement::new().request([acq]).block(EventSet::of(takes(i))),
                        eat.clone(),
                        eat,
                        SyncStatement::new().request([rel]).block(EventSet::of(takes(i))),
                    ],
                )));
            }
        }
        DiningVariant::Base | DiningVariant::PriorityOrder => {}
    }
    BProgram::new(sigma, threads).expect("thread names are unique")
}

/// Place/transition rendering: every philosopher may start with either fork,
/// picks up the other one, eats, then puts the forks back one at a time.
pub fn dining_pn(n: usize) -> PetriNet {
    assert!(n >= 2, "at least two philosophers");
    let mut b = NetBuilder::new();
    for i in 1..=n {
        b.place(&format!("fork_{i}"), 1);
    }
    for i in 1..=n {
        for (p, tokens) in [("idle", 1), ("has_r", 0), ("has_l", 0), ("eating", 0), ("put_r", 0), ("put_l", 0)] {
            b.place(&format!("{p}_{i}"), tokens);
        }
        let fr = format!("fork_{i}");
        let fl = format!("fork_{}", if i == 1 { n } else { i - 1 });
        let pl = |p: &str| format!("{p}_{i}");
        let ids = ["take_r1", "take_l1", "take_l2", "take_r2", "put_r1", "put_l1", "put_l2", "put_r2"].map(&pl);
        let [tr1, tl1, tl2, tr2, pr1, pl1, pl2, pr2] = ids.each_ref().map(String::as_str);
        b.transition(tr1, take(i, "R"))
            .transition(tl1, take(i, "L"))
            .transition(tl2, take(i, "L"))
            .transition(tr2, take(i, "R"))
            .transition(pr1, put(i, "R"))
            .transition(pl1, put(i, "L"))
            .transition(pl2, put(i, "L"))
            .transition(pr2, put(i, "R"));
        let (idle, has_r, has_l, eating, put_r, put_l) =
            (pl("idle"), pl("has_r"), pl("has_l"), pl("eating"), pl("put_r"), pl("put_l"));
        b.flow(tr1, &[&idle, &fr], &[&has_r])
            .flow(tl1, &[&idle, &fl], &[&has_l])
            .flow(tl2, &[&has_r, &fl], &[&eating])
            .flow(tr2, &[&has_l, &fr], &[&eating])
            .flow(pr1, &[&eating], &[&fr, &put_r])
            .flow(pl1, &[&eating], &[&fl, &put_l])
            .flow(pl2, &[&put_r], &[&fl, &idle])
            .flow(pr2, &[&put_l], &[&fr, &idle]);
    }
    b.build()
}

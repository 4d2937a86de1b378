//! Tic-tac-toe on cells 0..9, row-major.

use std::sync::Arc;

use crate::bp::{BProgram, BThread, Script, SyncStatement};
use crate::event::{Alphabet, Event, EventSet};
use crate::pn::{NetBuilder, PetriNet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TttPnVariant {
    TurnsOnly,
    XWinRow0,
}

pub const LINES: [[usize; 3]; 8] =
    [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];

pub fn x(c: usize) -> Event {
    Event::with("X", [c])
}

pub fn o(c: usize) -> Event {
    Event::with("O", [c])
}

pub fn moves() -> Vec<Event> {
    (0..9).map(x).chain((0..9).map(o)).collect()
}

pub fn ttt_bp() -> BProgram {
    let mut sigma: Alphabet = moves().into_iter().collect();
    for e in ["XWin", "OWin", "Tie"] {
        sigma.insert(Event::new(e));
    }
    let mut threads: Vec<Arc<dyn BThread>> = Vec::new();
    for c in 0..9 {
        let cell = EventSet::of([o(c), x(c)]);
        threads.push(Arc::new(Script::then_hold(
            format!("Cells cannot be marked twice {c}"),
            vec![SyncStatement::new().wait_for(cell.clone()), SyncStatement::new().block(cell)],
        )));
    }
    let (any_x, any_o) = (EventSet::label("X"), EventSet::label("O"));
    threads.push(Arc::new(Script::cycle(
        "Enforce turns",
        vec![
            SyncStatement::new().wait_for(any_x.clone()).block(any_o.clone()),
            SyncStatement::new().wait_for(any_o).block(any_x),
        ],
    )));
    threads.push(Arc::new(Script::cycle("Play randomly", vec![SyncStatement::new().request(moves())])));
    for (k, l) in LINES.iter().enumerate() {
        for (who, mark) in [("X", x as fn(usize) -> Event), ("O", o)] {
            let cells = EventSet::of(l.iter().map(|&c| mark(c)));
            let mut stmts = vec![SyncStatement::new().wait_for(cells); 3];
            stmts.push(SyncStatement::new().request([Event::new(&format!("{who}Win"))]).priority(100));
            stmts.push(SyncStatement::new().block(EventSet::All));
            threads.push(Arc::new(Script::then_hold(format!("Detect {who} win {k}"), stmts)));
        }
    }
    let mut tie = vec![SyncStatement::new().wait_for(EventSet::of(moves())); 9];
    tie.push(SyncStatement::new().request([Event::new("Tie")]).priority(90));
    tie.push(SyncStatement::new().block(EventSet::All));
    threads.push(Arc::new(Script::then_hold("Detect a tie", tie)));
    BProgram::new(sigma, threads).expect("thread names are unique")
}

pub fn ttt_pn(variant: TttPnVariant) -> PetriNet {
    let mut b = NetBuilder::new();
    for c in 0..9 {
        b.place(&format!("free_{c}"), 1);
    }
    b.place("turn_x", 1).place("turn_o", 0);
    for c in 0..9 {
        let (tx, to, free) = (format!("x_{c}"), format!("o_{c}"), format!("free_{c}"));
        b.transition(&tx, x(c)).transition(&to, o(c));
        b.flow(&tx, &[&free, "turn_x"], &["turn_o"]).flow(&to, &[&free, "turn_o"], &["turn_x"]);
    }
    if variant == TttPnVariant::XWinRow0 {
        b.place("game", 1).place("row0_x_counter", 0).transition("row0_x_win", Event::new("XWin"));
        for c in 0..9 {
            for t in [format!("x_{c}"), format!("o_{c}")] {
                b.arc("game", &t, 1).arc(&t, "game", 1);
            }
        }
        for c in 0..3 {
            b.arc(&format!("x_{c}"), "row0_x_counter", 1);
        }
        b.arc("row0_x_counter", "row0_x_win", 3).arc("game", "row0_x_win", 1);
    }
    b.build()
}

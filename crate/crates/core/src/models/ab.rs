//! Three `A`s and three `B`s, optionally forced to alternate.

use std::sync::Arc;

use crate::bp::{BProgram, BThread, Script, SyncStatement};
use crate::event::{Alphabet, Event, EventSet};

pub fn ab_demo(with_interleave: bool) -> BProgram {
    let (a, b) = (Event::new("A"), Event::new("B"));
    let three = |e: &Event| vec![SyncStatement::new().request([e.clone()]); 3];
    let mut threads: Vec<Arc<dyn BThread>> = vec![
        Arc::new(Script::sequence("Do-A", three(&a))),
        Arc::new(Script::sequence("Do-B", three(&b))),
    ];
    if with_interleave {
        threads.push(Arc::new(Script::cycle(
            "Interleave",
            vec![
                SyncStatement::new().wait_for(EventSet::one(b.clone())).block(EventSet::one(a.clone())),
                SyncStatement::new().wait_for(EventSet::one(a.clone())).block(EventSet::one(b.clone())),
            ],
        )));
    }
    BProgram::new(Alphabet::new([a, b]), threads).expect("thread names are unique")
}

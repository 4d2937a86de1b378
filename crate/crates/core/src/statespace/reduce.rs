//! Helper-edge elimination.
//!
//! For a state `s` with outgoing helper edges `s -h-> t`, each incoming edge
//! `u -a-> s` is rewired to `u -a-> t` and `s` is removed together with all of
//! its edges. States are processed smallest id first until no helper edge is
//! left; states that become unreachable are dropped. The procedure is not
//! language-preserving in general: non-helper edges leaving `s` are lost.

use std::collections::BTreeSet;

use petgraph::algo::is_cyclic_directed;
use petgraph::graph::DiGraph;

use super::{Lts, StateSpaceError};
use crate::event::Event;

pub fn reduce_helper(lts: &Lts, helpers: &BTreeSet<Event>) -> Result<Lts, StateSpaceError> {
    let n = lts.num_states();
    if let Some(s) = helper_cycle(lts, helpers) {
        return Err(StateSpaceError::HelperCycle(s));
    }

    let mut out: Vec<BTreeSet<(Event, usize)>> = vec![BTreeSet::new(); n];
    let mut inc: Vec<BTreeSet<(usize, Event)>> = vec![BTreeSet::new(); n];
    for (s, e, t) in &lts.edges {
        out[*s].insert((e.clone(), *t));
        inc[*t].insert((*s, e.clone()));
    }
    let has_helper = |out: &BTreeSet<(Event, usize)>| out.iter().any(|(e, _)| helpers.contains(e));
    let mut pending: BTreeSet<usize> = (0..n).filter(|&s| has_helper(&out[s])).collect();
    let mut alive = vec![true; n];

    while let Some(s) = pending.pop_first() {
        if !alive[s] {
            continue;
        }
        let hs: Vec<(Event, usize)> = out[s].iter().filter(|(e, _)| helpers.contains(e)).cloned().collect();
        if hs.is_empty() {
            continue;
        }
        if s == lts.initial {
            // No incoming edges to rewire into the entry point: drop its helper edges.
            for (h, t) in hs {
                out[s].remove(&(h.clone(), t));
                inc[t].remove(&(s, h));
            }
            continue;
        }
        let incoming: Vec<(usize, Event)> = inc[s].iter().filter(|(u, _)| *u != s).cloned().collect();
        for (u, a) in &incoming {
            for (_, t) in &hs {
                out[*u].insert((a.clone(), *t));
                inc[*t].insert((*u, a.clone()));
                if helpers.contains(a) {
                    pending.insert(*u);
                }
            }
        }
        for (e, t) in std::mem::take(&mut out[s]) {
            inc[t].remove(&(s, e));
        }
        for (u, e) in std::mem::take(&mut inc[s]) {
            out[u].remove(&(e, s));
        }
        alive[s] = false;
    }

    // Keep what is still reachable, renumbered in original order.
    let mut reach = vec![false; n];
    reach[lts.initial] = true;
    let mut stack = vec![lts.initial];
    while let Some(s) = stack.pop() {
        for (_, t) in &out[s] {
            if !reach[*t] {
                reach[*t] = true;
                stack.push(*t);
            }
        }
    }
    let mut new_id = vec![usize::MAX; n];
    let mut meta = Vec::new();
    for s in 0..n {
        if reach[s] {
            new_id[s] = meta.len();
            meta.push(lts.meta[s].clone());
        }
    }
    let mut edges = Vec::new();
    for s in (0..n).filter(|&s| reach[s]) {
        for (e, t) in &out[s] {
            edges.push((new_id[s], e.clone(), new_id[*t]));
        }
    }
    Ok(Lts::new(new_id[lts.initial], meta, edges))
}

fn helper_cycle(lts: &Lts, helpers: &BTreeSet<Event>) -> Option<usize> {
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<_> = (0..lts.num_states()).map(|_| g.add_node(())).collect();
    for (s, e, t) in &lts.edges {
        if helpers.contains(e) {
            if s == t {
                return Some(*s);
            }
            g.add_edge(nodes[*s], nodes[*t], ());
        }
    }
    if is_cyclic_directed(&g) {
        let scc = petgraph::algo::tarjan_scc(&g);
        return scc.into_iter().find(|c| c.len() > 1).map(|c| c.iter().map(|n| n.index()).min().unwrap());
    }
    None
}

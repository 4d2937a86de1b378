use std::collections::{BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{Lts, StateSpaceError};
use crate::event::Event;

pub fn find_deadlocks(lts: &Lts) -> Vec<usize> {
    (0..lts.num_states()).filter(|&s| lts.meta[s].deadlock).collect()
}

/// Shortest event path from the initial state to `target`, if reachable.
pub fn shortest_path(lts: &Lts, target: usize) -> Option<Vec<(Event, usize)>> {
    let succ = lts.successors();
    bfs_path(&succ, lts.initial, |s| s == target, |_| true)
}

fn bfs_path(
    succ: &[Vec<(Event, usize)>],
    from: usize,
    goal: impl Fn(usize) -> bool,
    allowed: impl Fn(usize) -> bool,
) -> Option<Vec<(Event, usize)>> {
    if goal(from) {
        return Some(Vec::new());
    }
    let mut prev: Vec<Option<(usize, Event)>> = vec![None; succ.len()];
    let mut seen = vec![false; succ.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(s) = queue.pop_front() {
        for (e, t) in &succ[s] {
            if seen[*t] || !allowed(*t) {
                continue;
            }
            seen[*t] = true;
            prev[*t] = Some((s, e.clone()));
            if goal(*t) {
                let mut path = Vec::new();
                let mut cur = *t;
                loop {
                    let (p, e) = prev[cur].clone().unwrap();
                    path.push((e, cur));
                    if p == from {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(*t);
        }
    }
    None
}

/// A reachable cycle on which `thread` is hot at every state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HotViolation {
    pub thread: String,
    /// Path from the initial state to `entry`.
    pub prefix: Vec<(Event, usize)>,
    pub entry: usize,
    /// Steps from `entry` back to `entry`.
    pub cycle: Vec<(Event, usize)>,
}

/// One lasso per (thread, strongly connected component of its hot states).
///
/// A cycle counts when the thread is hot at every state on it, whether or not
/// the thread advances along the cycle.
pub fn find_hot_cycles(lts: &Lts) -> Result<Vec<HotViolation>, StateSpaceError> {
    if !lts.has_hot_data() {
        return Err(StateSpaceError::NotBpLts);
    }
    let succ = lts.successors();
    let threads: BTreeSet<&str> = lts
        .meta
        .iter()
        .flat_map(|m| m.hot_threads.iter().flatten().map(String::as_str))
        .collect();
    let mut out = Vec::new();
    for thread in threads {
        let hot: Vec<bool> = lts
            .meta
            .iter()
            .map(|m| m.hot_threads.as_ref().is_some_and(|h| h.iter().any(|x| x == thread)))
            .collect();
        let mut g: DiGraph<usize, ()> = DiGraph::new();
        let nodes: Vec<_> = (0..lts.num_states()).map(|s| g.add_node(s)).collect();
        for (s, _, t) in &lts.edges {
            if hot[*s] && hot[*t] {
                g.add_edge(nodes[*s], nodes[*t], ());
            }
        }
        let mut sccs = tarjan_scc(&g);
        for c in &mut sccs {
            c.sort();
        }
        sccs.sort();
        for comp in sccs {
            let members: BTreeSet<usize> = comp.iter().map(|n| g[*n]).collect();
            let entry = *members.iter().next().unwrap();
            let cyclic = members.len() > 1 || succ[entry].iter().any(|(_, t)| *t == entry);
            if !cyclic || !hot[entry] {
                continue;
            }
            let Some(prefix) = bfs_path(&succ, lts.initial, |s| members.contains(&s), |_| true) else {
                continue;
            };
            let entry = prefix.last().map(|(_, s)| *s).unwrap_or(lts.initial);
            let cycle = match succ[entry].iter().find(|(_, t)| *t == entry) {
                Some((e, _)) => vec![(e.clone(), entry)],
                None => {
                    // Leave `entry` inside the component, then walk back to it.
                    let mut found = None;
                    for (e, t) in &succ[entry] {
                        if !members.contains(t) {
                            continue;
                        }
                        if let Some(rest) = bfs_path(&succ, *t, |s| s == entry, |s| members.contains(&s)) {
                            let mut c = vec![(e.clone(), *t)];
                            c.extend(rest);
                            if found.as_ref().is_none_or(|f: &Vec<(Event, usize)>| c.len() < f.len()) {
                                found = Some(c);
                            }
                        }
                    }
                    match found {
                        Some(c) => c,
                        None => continue,
                    }
                }
            };
            out.push(HotViolation { thread: thread.to_string(), prefix, entry, cycle });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::StateMeta;

    fn meta(hot: &[&str]) -> StateMeta {
        StateMeta { hot_threads: Some(hot.iter().map(|s| s.to_string()).collect()), ..Default::default() }
    }

    #[test]
    fn self_loop_hot_is_violation() {
        let l = Lts::new(0, vec![meta(&["t"])], vec![(0, Event::new("A"), 0)]);
        let v = find_hot_cycles(&l).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].thread, "t");
        assert_eq!(v[0].cycle.len(), 1);
    }

    #[test]
    fn cold_state_breaks_cycle() {
        let l = Lts::new(
            0,
            vec![meta(&["t"]), meta(&[])],
            vec![(0, Event::new("A"), 1), (1, Event::new("B"), 0)],
        );
        assert!(find_hot_cycles(&l).unwrap().is_empty());
    }

    #[test]
    fn net_lts_has_no_hot_data() {
        let l = Lts::new(0, vec![StateMeta::default()], vec![]);
        assert_eq!(find_hot_cycles(&l), Err(StateSpaceError::NotBpLts));
    }

    #[test]
    fn path_to_state() {
        let l = Lts::new(
            0,
            vec![StateMeta::default(); 3],
            vec![(0, Event::new("A"), 1), (1, Event::new("B"), 2), (0, Event::new("C"), 2)],
        );
        let p = shortest_path(&l, 2).unwrap();
        assert_eq!(p, vec![(Event::new("C"), 2)]);
        assert_eq!(shortest_path(&l, 0).unwrap(), vec![]);
    }
}

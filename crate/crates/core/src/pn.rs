//! Place/transition nets with weighted arcs.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::Event;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub id: String,
    pub name: String,
    pub tokens: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    pub label: Event,
    pub helper: bool,
    pub fault: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetArc {
    pub from: String,
    pub to: String,
    pub weight: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PnError {
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("invalid net: {0}")]
    Invalid(String),
    #[error("malformed net file: {0}")]
    Format(String),
}

/// Token counts, aligned with the net's place order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub Box<[u64]>);

impl Marking {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", l.join(","))
    }
}

/// Arc weights of one transition, by place index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flow {
    pub pre: Vec<(usize, u64)>,
    pub post: Vec<(usize, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<Place>,
    transitions: Vec<Transition>,
    arcs: Vec<NetArc>,
    place_ix: HashMap<String, usize>,
    trans_ix: HashMap<String, usize>,
    flows: Vec<Flow>,
}

impl PetriNet {
    /// Builds a net. Arcs with unresolvable endpoints are kept for
    /// [`PetriNet::validate`] but ignored by the firing rule.
    pub fn new(places: Vec<Place>, transitions: Vec<Transition>, arcs: Vec<NetArc>) -> PetriNet {
        let place_ix: HashMap<String, usize> =
            places.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect();
        let trans_ix: HashMap<String, usize> =
            transitions.iter().enumerate().map(|(i, t)| (t.id.clone(), i)).collect();
        let mut flows = vec![Flow::default(); transitions.len()];
        for a in &arcs {
            match (place_ix.get(&a.from), trans_ix.get(&a.to), trans_ix.get(&a.from), place_ix.get(&a.to)) {
                (Some(&p), Some(&t), _, _) => flows[t].pre.push((p, a.weight)),
                (_, _, Some(&t), Some(&p)) => flows[t].post.push((p, a.weight)),
                _ => {}
            }
        }
        PetriNet { places, transitions, arcs, place_ix, trans_ix, flows }
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn arcs(&self) -> &[NetArc] {
        &self.arcs
    }

    pub fn flow(&self, t: usize) -> &Flow {
        &self.flows[t]
    }

    pub fn place_index(&self, id: &str) -> Option<usize> {
        self.place_ix.get(id).copied()
    }

    pub fn transition_index(&self, id: &str) -> Result<usize, PnError> {
        self.trans_ix.get(id).copied().ok_or_else(|| PnError::UnknownTransition(id.to_string()))
    }

    pub fn initial_marking(&self) -> Marking {
        Marking(self.places.iter().map(|p| p.tokens).collect())
    }

    /// Input weight W⁻(p, t), zero when there is no arc.
    pub fn pre_weight(&self, p: usize, t: usize) -> u64 {
        self.flows[t].pre.iter().filter(|(q, _)| *q == p).map(|(_, w)| *w).sum()
    }

    /// Output weight W⁺(t, p), zero when there is no arc.
    pub fn post_weight(&self, t: usize, p: usize) -> u64 {
        self.flows[t].post.iter().filter(|(q, _)| *q == p).map(|(_, w)| *w).sum()
    }

    pub fn enabled_at(&self, m: &Marking, t: usize) -> bool {
        self.flows[t].pre.iter().all(|&(p, w)| m.0[p] >= w)
    }

    pub fn fire_at(&self, m: &Marking, t: usize) -> Option<Marking> {
        if !self.enabled_at(m, t) {
            return None;
        }
        let mut next = m.0.clone();
        for &(p, w) in &self.flows[t].pre {
            next[p] = next[p].checked_sub(w).expect("enabled transition drove a place negative");
        }
        for &(p, w) in &self.flows[t].post {
            next[p] += w;
        }
        Some(Marking(next))
    }

    pub fn is_enabled(&self, m: &Marking, t: &str) -> Result<bool, PnError> {
        Ok(self.enabled_at(m, self.transition_index(t)?))
    }

    pub fn fire(&self, m: &Marking, t: &str) -> Result<Marking, PnError> {
        let ti = self.transition_index(t)?;
        self.fire_at(m, ti).ok_or_else(|| PnError::NotEnabled(t.to_string()))
    }

    /// Enabled transitions, in declaration order.
    pub fn enabled_set(&self, m: &Marking) -> Vec<String> {
        (0..self.transitions.len())
            .filter(|&t| self.enabled_at(m, t))
            .map(|t| self.transitions[t].id.clone())
            .collect()
    }

    /// Human-readable problems; empty for a well-formed net.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut ids = HashSet::new();
        for p in &self.places {
            if !ids.insert(p.id.as_str()) {
                out.push(format!("duplicate id `{}`", p.id));
            }
        }
        for t in &self.transitions {
            if !ids.insert(t.id.as_str()) {
                out.push(format!("duplicate id `{}`", t.id));
            }
        }
        let is_place = |s: &str| self.places.iter().any(|p| p.id == s);
        let is_trans = |s: &str| self.transitions.iter().any(|t| t.id == s);
        let mut pairs = HashSet::new();
        for a in &self.arcs {
            let name = format!("{} -> {}", a.from, a.to);
            let known = |s: &str| is_place(s) || is_trans(s);
            if !known(&a.from) {
                out.push(format!("arc {name}: unknown source `{}`", a.from));
            }
            if !known(&a.to) {
                out.push(format!("arc {name}: unknown target `{}`", a.to));
            }
            if known(&a.from) && known(&a.to) {
                let ok = (is_place(&a.from) && is_trans(&a.to)) || (is_trans(&a.from) && is_place(&a.to));
                if !ok {
                    out.push(format!("arc {name}: must connect a place and a transition"));
                }
            }
            if a.weight == 0 {
                out.push(format!("arc {name}: weight must be positive"));
            }
            if !pairs.insert((a.from.as_str(), a.to.as_str())) {
                out.push(format!("arc {name}: duplicate arc"));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&NetFile::from(self)).expect("net serializes")
    }

    pub fn from_json(text: &str) -> Result<PetriNet, PnError> {
        let file: NetFile = serde_json::from_str(text).map_err(|e| PnError::Format(e.to_string()))?;
        file.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaceFile {
    id: String,
    name: String,
    tokens: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionFile {
    id: String,
    label: String,
    helper: bool,
    fault: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcFile {
    from: String,
    to: String,
    weight: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetFile {
    places: Vec<PlaceFile>,
    transitions: Vec<TransitionFile>,
    arcs: Vec<ArcFile>,
}

impl From<&PetriNet> for NetFile {
    fn from(n: &PetriNet) -> Self {
        NetFile {
            places: n
                .places
                .iter()
                .map(|p| PlaceFile { id: p.id.clone(), name: p.name.clone(), tokens: p.tokens })
                .collect(),
            transitions: n
                .transitions
                .iter()
                .map(|t| TransitionFile {
                    id: t.id.clone(),
                    label: t.label.to_string(),
                    helper: t.helper,
                    fault: t.fault,
                })
                .collect(),
            arcs: n
                .arcs
                .iter()
                .map(|a| ArcFile { from: a.from.clone(), to: a.to.clone(), weight: a.weight as i64 })
                .collect(),
        }
    }
}

impl TryFrom<NetFile> for PetriNet {
    type Error = PnError;

    fn try_from(f: NetFile) -> Result<PetriNet, PnError> {
        let places = f
            .places
            .into_iter()
            .map(|p| Place { id: p.id, name: p.name, tokens: p.tokens })
            .collect();
        let mut transitions = Vec::new();
        for t in f.transitions {
            let label = t.label.parse().map_err(|e| PnError::Format(format!("{e}")))?;
            transitions.push(Transition { id: t.id, label, helper: t.helper, fault: t.fault });
        }
        let mut arcs = Vec::new();
        for a in f.arcs {
            if a.weight <= 0 {
                return Err(PnError::Format(format!("arc {} -> {}: weight must be positive", a.from, a.to)));
            }
            arcs.push(NetArc { from: a.from, to: a.to, weight: a.weight as u64 });
        }
        Ok(PetriNet::new(places, transitions, arcs))
    }
}

/// Incremental construction helper used by the built-in models.
#[derive(Default)]
pub struct NetBuilder {
    places: Vec<Place>,
    transitions: Vec<Transition>,
    arcs: Vec<NetArc>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, id: &str, tokens: u64) -> &mut Self {
        self.places.push(Place { id: id.to_string(), name: id.to_string(), tokens });
        self
    }

    pub fn named_place(&mut self, id: &str, name: &str, tokens: u64) -> &mut Self {
        self.places.push(Place { id: id.to_string(), name: name.to_string(), tokens });
        self
    }

    pub fn transition(&mut self, id: &str, label: Event) -> &mut Self {
        self.transitions.push(Transition { id: id.to_string(), label, helper: false, fault: false });
        self
    }

    pub fn helper(&mut self, id: &str, label: Event) -> &mut Self {
        self.transitions.push(Transition { id: id.to_string(), label, helper: true, fault: false });
        self
    }

    pub fn fault(&mut self, id: &str, label: Event) -> &mut Self {
        self.transitions.push(Transition { id: id.to_string(), label, helper: false, fault: true });
        self
    }

    pub fn arc(&mut self, from: &str, to: &str, weight: u64) -> &mut Self {
        self.arcs.push(NetArc { from: from.to_string(), to: to.to_string(), weight });
        self
    }

    /// Weight-1 arcs `p -> t` for every input and `t -> p` for every output.
    pub fn flow(&mut self, t: &str, inputs: &[&str], outputs: &[&str]) -> &mut Self {
        for p in inputs {
            self.arc(p, t, 1);
        }
        for p in outputs {
            self.arc(t, p, 1);
        }
        self
    }

    pub fn build(&self) -> PetriNet {
        PetriNet::new(self.places.clone(), self.transitions.clone(), self.arcs.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple(tokens: u64, weight: u64) -> PetriNet {
        NetBuilder::new()
            .place("a", tokens)
            .place("b", 0)
            .transition("t", Event::new("T"))
            .arc("a", "t", weight)
            .arc("t", "b", 1)
            .build()
    }

    #[test]
    fn enabledness() {
        assert!(simple(1, 1).is_enabled(&simple(1, 1).initial_marking(), "t").unwrap());
        assert!(!simple(0, 1).is_enabled(&simple(0, 1).initial_marking(), "t").unwrap());
        let n = simple(1, 2);
        assert!(!n.is_enabled(&n.initial_marking(), "t").unwrap());
        assert_eq!(n.is_enabled(&n.initial_marking(), "zz"), Err(PnError::UnknownTransition("zz".into())));
    }

    #[test]
    fn source_transition_always_enabled() {
        let n = NetBuilder::new().place("a", 0).transition("t", Event::new("T")).build();
        assert!(n.is_enabled(&n.initial_marking(), "t").unwrap());
        assert_eq!(n.fire(&n.initial_marking(), "t").unwrap(), n.initial_marking());
    }

    #[test]
    fn fire_moves_token() {
        let n = simple(1, 1);
        let m = n.fire(&n.initial_marking(), "t").unwrap();
        assert_eq!(&*m.0, &[0, 1]);
        assert_eq!(n.fire(&m, "t"), Err(PnError::NotEnabled("t".into())));
    }

    #[test]
    fn dead_net_enables_nothing() {
        let n = simple(0, 1);
        assert!(n.enabled_set(&n.initial_marking()).is_empty());
    }

    #[test]
    fn validate_reports() {
        assert!(simple(1, 1).validate().is_empty());
        let n = NetBuilder::new().place("a", 0).place("b", 0).arc("a", "b", 1).build();
        let d = n.validate();
        assert_eq!(d.len(), 1);
        assert!(d[0].contains("a -> b"));
        let n = NetBuilder::new()
            .place("a", 0)
            .transition("t", Event::new("T"))
            .transition("t", Event::new("U"))
            .build();
        assert_eq!(n.validate().len(), 1);
    }

    #[test]
    fn json_round_trip_and_strict_keys() {
        let n = simple(2, 1);
        let back = PetriNet::from_json(&n.to_json()).unwrap();
        assert_eq!(back, n);
        let bad = r#"{"places":[],"transitions":[],"arcs":[],"extra":1}"#;
        assert!(PetriNet::from_json(bad).is_err());
        let bad = r#"{"places":[{"id":"a","name":"a","tokens":0,"cap":1}],"transitions":[],"arcs":[]}"#;
        assert!(PetriNet::from_json(bad).is_err());
    }
}

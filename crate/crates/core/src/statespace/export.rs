use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Lts, StateMeta, StateSpaceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Dot,
    Json,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    from: usize,
    event: String,
    to: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaDoc {
    deadlock: bool,
    terminated: bool,
    hot_threads: Option<Vec<String>>,
    #[serde(default)]
    key: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LtsDoc {
    states: Vec<usize>,
    initial: usize,
    edges: Vec<EdgeDoc>,
    meta: Vec<MetaDoc>,
}

impl Lts {
    pub fn export(&self, format: Format) -> String {
        match format {
            Format::Dot => self.to_dot(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lts {\n  rankdir=LR;\n  __start [shape=point];\n");
        for (i, m) in self.meta.iter().enumerate() {
            let shape = if m.deadlock { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  s{i} [label=\"{i}\", shape={shape}];");
        }
        let _ = writeln!(out, "  __start -> s{};", self.initial);
        for (s, e, t) in &self.edges {
            let _ = writeln!(out, "  s{s} -> s{t} [label=\"{}\"];", e.to_string().replace('"', "\\\""));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let doc = LtsDoc {
            states: (0..self.num_states()).collect(),
            initial: self.initial,
            edges: self
                .edges
                .iter()
                .map(|(s, e, t)| EdgeDoc { from: *s, event: e.to_string(), to: *t })
                .collect(),
            meta: self
                .meta
                .iter()
                .map(|m| MetaDoc {
                    deadlock: m.deadlock,
                    terminated: m.terminated,
                    hot_threads: m.hot_threads.clone(),
                    key: m.key.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("lts serializes")
    }

    pub fn from_json(text: &str) -> Result<Lts, StateSpaceError> {
        let doc: LtsDoc = serde_json::from_str(text).map_err(|e| StateSpaceError::Import(e.to_string()))?;
        if doc.states != (0..doc.states.len()).collect::<Vec<_>>() {
            return Err(StateSpaceError::Import("state ids must be 0..n in order".into()));
        }
        if doc.meta.len() != doc.states.len() {
            return Err(StateSpaceError::Import("one meta record per state expected".into()));
        }
        let mut edges = Vec::new();
        for e in doc.edges {
            let ev = e.event.parse().map_err(|x| StateSpaceError::Import(format!("{x}")))?;
            edges.push((e.from, ev, e.to));
        }
        let meta = doc
            .meta
            .into_iter()
            .map(|m| StateMeta { deadlock: m.deadlock, terminated: m.terminated, hot_threads: m.hot_threads, key: m.key })
            .collect();
        let lts = Lts::new(doc.initial, meta, edges);
        lts.check().map_err(StateSpaceError::Import)?;
        Ok(lts)
    }
}

/// `model,formalism,n,faults,states,transitions`
pub fn stats_csv(model: &str, formalism: &str, n: usize, faults: bool, lts: &Lts) -> String {
    format!("{model},{formalism},{n},{faults},{},{}", lts.num_states(), lts.num_edges())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Event;

    fn loop1() -> Lts {
        Lts::new(0, vec![StateMeta::default()], vec![(0, Event::new("A"), 0)])
    }

    #[test]
    fn dot_self_loop() {
        let d = loop1().to_dot();
        assert_eq!(d.matches("[label=\"0\"").count(), 1);
        assert!(d.contains("s0 -> s0 [label=\"A\"]"));
    }

    #[test]
    fn json_round_trip() {
        let l = loop1();
        assert_eq!(Lts::from_json(&l.to_json()).unwrap(), l);
        assert!(Lts::from_json("{\"states\":[0],\"initial\":3,\"edges\":[],\"meta\":[]}").is_err());
    }
}

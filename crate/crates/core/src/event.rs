//! Events, alphabets and event-set matchers.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// A scalar event parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<i32> for Value {
    fn from(v: i32) -> Self {
        Value::Int(v as i64)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.into())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

impl Value {
    fn parse(s: &str) -> Value {
        match s {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => match s.parse::<i64>() {
                Ok(i) => Value::Int(i),
                Err(_) => Value::Str(s.into()),
            },
        }
    }
}

/// A labeled event with positional parameters.
///
/// Ordering is by label, then parameters, which gives the canonical event order
/// used for iteration and seeded tie-breaking.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    label: Arc<str>,
    params: Arc<[Value]>,
}

impl Event {
    pub fn new(label: &str) -> Event {
        Event { label: label.into(), params: Arc::new([]) }
    }

    pub fn with<I, V>(label: &str, params: I) -> Event
    where
        I: IntoIterator<Item = V>,
        V: Into<Value>,
    {
        Event {
            label: label.into(),
            params: params.into_iter().map(Into::into).collect(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &[Value] {
        &self.params
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        if !self.params.is_empty() {
            f.write_str("(")?;
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed event `{0}`")]
pub struct ParseEventError(pub String);

impl FromStr for Event {
    type Err = ParseEventError;

    fn from_str(s: &str) -> Result<Event, ParseEventError> {
        let s = s.trim();
        let bad = || ParseEventError(s.to_string());
        let (label, params) = match s.find('(') {
            None => (s, None),
            Some(i) => {
                let rest = s[i + 1..].strip_suffix(')').ok_or_else(bad)?;
                (&s[..i], Some(rest))
            }
        };
        let label = label.trim();
        if label.is_empty() || label.contains([')', ',', ' ']) {
            return Err(bad());
        }
        let params: Vec<Value> = match params {
            None => Vec::new(),
            Some(p) if p.trim().is_empty() => Vec::new(),
            Some(p) => {
                let mut out = Vec::new();
                for tok in p.split(',') {
                    let tok = tok.trim();
                    if tok.is_empty() || tok.contains(['(', ')']) {
                        return Err(bad());
                    }
                    out.push(Value::parse(tok));
                }
                out
            }
        };
        Ok(Event { label: label.into(), params: params.into() })
    }
}

/// A finite event universe, iterated in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    events: BTreeSet<Event>,
}

impl Alphabet {
    pub fn new<I: IntoIterator<Item = Event>>(events: I) -> Alphabet {
        Alphabet { events: events.into_iter().collect() }
    }

    pub fn contains(&self, e: &Event) -> bool {
        self.events.contains(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn insert(&mut self, e: Event) {
        self.events.insert(e);
    }

    pub fn as_set(&self) -> &BTreeSet<Event> {
        &self.events
    }
}

impl FromIterator<Event> for Alphabet {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        Alphabet::new(iter)
    }
}

/// Positional parameter matcher inside a label pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ParamMatch {
    Exact(Value),
    Any,
}

/// A (possibly infinite) set of events described by a matcher.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum EventSet {
    #[default]
    None,
    All,
    Explicit(BTreeSet<Event>),
    /// `params: None` matches the label with any parameters of any arity.
    Pattern { label: Arc<str>, params: Option<Vec<ParamMatch>> },
    Union(Vec<EventSet>),
}

impl EventSet {
    pub fn of<I: IntoIterator<Item = Event>>(events: I) -> EventSet {
        EventSet::Explicit(events.into_iter().collect())
    }

    pub fn one(e: Event) -> EventSet {
        EventSet::of([e])
    }

    /// Every event carrying `label`, whatever its parameters.
    pub fn label(label: &str) -> EventSet {
        EventSet::Pattern { label: label.into(), params: None }
    }

    pub fn pattern(label: &str, params: Vec<ParamMatch>) -> EventSet {
        EventSet::Pattern { label: label.into(), params: Some(params) }
    }

    pub fn union<I: IntoIterator<Item = EventSet>>(sets: I) -> EventSet {
        EventSet::Union(sets.into_iter().collect())
    }

    pub fn contains(&self, e: &Event) -> bool {
        match self {
            EventSet::None => false,
            EventSet::All => true,
            EventSet::Explicit(s) => s.contains(e),
            EventSet::Pattern { label, params } => {
                if **label != *e.label() {
                    return false;
                }
                match params {
                    None => true,
                    Some(ps) => {
                        ps.len() == e.params().len()
                            && ps.iter().zip(e.params()).all(|(m, v)| match m {
                                ParamMatch::Any => true,
                                ParamMatch::Exact(x) => x == v,
                            })
                    }
                }
            }
            EventSet::Union(parts) => parts.iter().any(|p| p.contains(e)),
        }
    }

    /// Members of `alphabet` matched by this set, in canonical order.
    pub fn enumerate(&self, alphabet: &Alphabet) -> Vec<Event> {
        alphabet.iter().filter(|e| self.contains(e)).cloned().collect()
    }

    /// True when the set syntactically matches nothing.
    pub fn is_empty_syntactically(&self) -> bool {
        match self {
            EventSet::None => true,
            EventSet::Explicit(s) => s.is_empty(),
            EventSet::Union(parts) => parts.iter().all(|p| p.is_empty_syntactically()),
            _ => false,
        }
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventSet::None => f.write_str("{}"),
            EventSet::All => f.write_str("*"),
            EventSet::Explicit(s) => {
                f.write_str("{")?;
                for (i, e) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("}")
            }
            EventSet::Pattern { label, params } => {
                f.write_str(label)?;
                match params {
                    None => f.write_str("(..)"),
                    Some(ps) => {
                        f.write_str("(")?;
                        for (i, p) in ps.iter().enumerate() {
                            if i > 0 {
                                f.write_str(",")?;
                            }
                            match p {
                                ParamMatch::Any => f.write_str("*")?,
                                ParamMatch::Exact(v) => write!(f, "{v}")?,
                            }
                        }
                        f.write_str(")")
                    }
                }
            }
            EventSet::Union(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entering(i: i64, fault: bool) -> Event {
        Event::with("Entering", [Value::Int(i), Value::Bool(fault)])
    }

    #[test]
    fn none_and_all() {
        assert!(!EventSet::None.contains(&Event::new("Lower")));
        assert!(EventSet::All.contains(&Event::with("Raise", [true])));
    }

    #[test]
    fn pattern_with_wildcard() {
        let p = EventSet::pattern(
            "Entering",
            vec![ParamMatch::Exact(Value::Int(1)), ParamMatch::Any],
        );
        assert!(p.contains(&entering(1, true)));
        assert!(!p.contains(&entering(2, false)));
        assert!(!p.contains(&Event::with("Entering", [1])));
    }

    #[test]
    fn enumerate_take_family() {
        let mut sigma = Alphabet::default();
        for i in 1..=2i64 {
            for side in ["R", "L"] {
                sigma.insert(Event::with("Take", [Value::Int(i), side.into()]));
                sigma.insert(Event::with("Put", [Value::Int(i), side.into()]));
            }
        }
        let p = EventSet::pattern("Take", vec![ParamMatch::Exact(Value::Int(1)), ParamMatch::Any]);
        let got: Vec<String> = p.enumerate(&sigma).iter().map(|e| e.to_string()).collect();
        assert_eq!(got, ["Take(1,L)", "Take(1,R)"]);
    }

    #[test]
    fn enumerate_basic() {
        let sigma = Alphabet::new([Event::new("A"), Event::new("B")]);
        assert_eq!(EventSet::All.enumerate(&sigma).len(), 2);
        assert_eq!(EventSet::one(Event::new("A")).enumerate(&sigma), vec![Event::new("A")]);
    }

    #[test]
    fn flag_makes_distinct_events() {
        assert_ne!(Event::with("Entering", [1]), entering(1, true));
    }

    #[test]
    fn text_round_trip() {
        for s in ["Lower", "Entering(1,true)", "Take(2,R)", "X(0)"] {
            let e: Event = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
        assert_eq!("Raise()".parse::<Event>().unwrap(), Event::new("Raise"));
        assert!("Bad(".parse::<Event>().is_err());
        assert!("(1)".parse::<Event>().is_err());
    }
}

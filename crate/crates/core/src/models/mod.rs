//! Built-in benchmark models and the `name:formalism:variant:params` registry.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bp::BProgram;
use crate::event::Event;
use crate::pn::PetriNet;
use crate::statespace::{build_lts, build_pn_lts, Guards, Lts, StateSpaceError};

pub mod ab;
pub mod dining;
pub mod lc;
pub mod ttt;

pub use ab::ab_demo;
pub use dining::{dining_bp, dining_pn, DiningVariant};
pub use lc::{lc_bp, lc_pn, LcBpVariant, LcPnVariant};
pub use ttt::{ttt_bp, ttt_pn, TttPnVariant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("malformed model reference `{0}` (expected name:formalism[:variant[:params]])")]
    Syntax(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` has no {formalism} variant `{variant}`")]
    UnknownVariant { model: String, formalism: String, variant: String },
    #[error("{0}")]
    Parameters(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formalism {
    Bp,
    Pn,
}

impl fmt::Display for Formalism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formalism::Bp => "bp",
            Formalism::Pn => "pn",
        })
    }
}

impl FromStr for Formalism {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Formalism, ModelError> {
        match s {
            "bp" => Ok(Formalism::Bp),
            "pn" => Ok(Formalism::Pn),
            _ => Err(ModelError::Syntax(s.to_string())),
        }
    }
}

pub enum Model {
    Bp(BProgram),
    Pn(PetriNet),
}

impl Model {
    pub fn formalism(&self) -> Formalism {
        match self {
            Model::Bp(_) => Formalism::Bp,
            Model::Pn(_) => Formalism::Pn,
        }
    }

    pub fn lts(&self, guards: Guards) -> Result<Lts, StateSpaceError> {
        match self {
            Model::Bp(p) => build_lts(p, guards),
            Model::Pn(n) => build_pn_lts(n, guards),
        }
    }

    /// Labels of helper transitions (nets only).
    pub fn helpers(&self) -> BTreeSet<Event> {
        match self {
            Model::Bp(_) => BTreeSet::new(),
            Model::Pn(n) => n.transitions().iter().filter(|t| t.helper).map(|t| t.label.clone()).collect(),
        }
    }
}

/// A parsed model reference such as `lc:bp:modified:1` or `lc:pn:multi:2,faults`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelRef {
    pub name: String,
    pub formalism: Formalism,
    /// Empty selects the default variant.
    pub variant: String,
    pub n: Option<usize>,
    pub faults: bool,
}

impl ModelRef {
    pub fn new(name: &str, formalism: Formalism) -> ModelRef {
        ModelRef { name: name.to_string(), formalism, variant: String::new(), n: None, faults: false }
    }

    /// Size parameter with the model's default.
    pub fn size(&self) -> usize {
        self.n.unwrap_or(match self.name.as_str() {
            "dining" => 2,
            "lc" => 1,
            _ => 0,
        })
    }

    fn bad_variant(&self) -> ModelError {
        ModelError::UnknownVariant {
            model: self.name.clone(),
            formalism: self.formalism.to_string(),
            variant: self.variant.clone(),
        }
    }

    pub fn build(&self) -> Result<Model, ModelError> {
        let n = self.size();
        let v = self.variant.as_str();
        if self.faults && self.name != "lc" {
            return Err(ModelError::Parameters(format!("`{}` has no fault extension", self.name)));
        }
        match (self.name.as_str(), self.formalism) {
            ("lc", f) => {
                if n == 0 {
                    return Err(ModelError::Parameters("lc needs at least one track".into()));
                }
                match f {
                    Formalism::Bp => {
                        let variant = match v {
                            "" | "original" => LcBpVariant::Original,
                            "modified" | "modified_r2" => LcBpVariant::ModifiedR2,
                            _ => return Err(self.bad_variant()),
                        };
                        Ok(Model::Bp(lc_bp(n, self.faults, variant)))
                    }
                    Formalism::Pn => match v {
                        "single" | "single_1987" => {
                            if n != 1 || self.faults {
                                return Err(ModelError::Parameters(
                                    "the single-track net takes one track and no faults".into(),
                                ));
                            }
                            Ok(Model::Pn(lc_pn(1, false, LcPnVariant::Single1987)))
                        }
                        "" | "multi" | "multi_2016" => Ok(Model::Pn(lc_pn(n, self.faults, LcPnVariant::Multi2016))),
                        _ => Err(self.bad_variant()),
                    },
                }
            }
            ("dining", f) => {
                if n < 2 {
                    return Err(ModelError::Parameters("dining needs at least two philosophers".into()));
                }
                match f {
                    Formalism::Bp => {
                        let variant = match v {
                            "" | "base" => DiningVariant::Base,
                            "liveness" | "with_liveness" => DiningVariant::WithLiveness,
                            "arbitrator" => DiningVariant::Arbitrator,
                            "priority" | "priority_order" => DiningVariant::PriorityOrder,
                            _ => return Err(self.bad_variant()),
                        };
                        Ok(Model::Bp(dining_bp(n, variant)))
                    }
                    Formalism::Pn => match v {
                        "" | "base" => Ok(Model::Pn(dining_pn(n))),
                        _ => Err(self.bad_variant()),
                    },
                }
            }
            ("ttt", Formalism::Bp) => match v {
                "" | "base" => Ok(Model::Bp(ttt_bp())),
                _ => Err(self.bad_variant()),
            },
            ("ttt", Formalism::Pn) => match v {
                "" | "turns" | "turns_only" => Ok(Model::Pn(ttt_pn(TttPnVariant::TurnsOnly))),
                "xwin" | "xwin_row0" => Ok(Model::Pn(ttt_pn(TttPnVariant::XWinRow0))),
                _ => Err(self.bad_variant()),
            },
            ("ab", Formalism::Bp) => match v {
                "" | "base" => Ok(Model::Bp(ab_demo(false))),
                "interleave" => Ok(Model::Bp(ab_demo(true))),
                _ => Err(self.bad_variant()),
            },
            ("ab", Formalism::Pn) => Err(self.bad_variant()),
            (other, _) => Err(ModelError::UnknownModel(other.to_string())),
        }
    }
}

impl FromStr for ModelRef {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<ModelRef, ModelError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 2 || parts.len() > 4 || parts[0].is_empty() {
            return Err(ModelError::Syntax(s.to_string()));
        }
        let formalism = parts[1].parse().map_err(|_| ModelError::Syntax(s.to_string()))?;
        let mut r = ModelRef::new(parts[0], formalism);
        r.variant = parts.get(2).copied().unwrap_or("").to_ascii_lowercase();
        for p in parts.get(3).map(|p| p.split(',')).into_iter().flatten() {
            match p.trim() {
                "" => {}
                "faults" => r.faults = true,
                num => r.n = Some(num.parse().map_err(|_| ModelError::Syntax(s.to_string()))?),
            }
        }
        Ok(r)
    }
}

impl fmt::Display for ModelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:", self.name, self.formalism, self.variant)?;
        let mut params = Vec::new();
        if let Some(n) = self.n {
            params.push(n.to_string());
        }
        if self.faults {
            params.push("faults".to_string());
        }
        f.write_str(&params.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_refs() {
        let r: ModelRef = "lc:bp:modified:1".parse().unwrap();
        assert_eq!((r.name.as_str(), r.formalism, r.variant.as_str(), r.n), ("lc", Formalism::Bp, "modified", Some(1)));
        let r: ModelRef = "lc:pn:multi:3,faults".parse().unwrap();
        assert!(r.faults && r.n == Some(3));
        assert_eq!(r.to_string(), "lc:pn:multi:3,faults");
        assert!("lc".parse::<ModelRef>().is_err());
        assert!("lc:xx".parse::<ModelRef>().is_err());
        assert!("lc:bp:original:two".parse::<ModelRef>().is_err());
    }

    #[test]
    fn build_errors() {
        assert!(matches!("foo:bp".parse::<ModelRef>().unwrap().build(), Err(ModelError::UnknownModel(_))));
        assert!(matches!("ab:bp:zz".parse::<ModelRef>().unwrap().build(), Err(ModelError::UnknownVariant { .. })));
        assert!("lc:pn:single:2".parse::<ModelRef>().unwrap().build().is_err());
        assert!("ttt:pn:xwin".parse::<ModelRef>().unwrap().build().is_ok());
    }
}

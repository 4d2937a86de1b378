//! Behavioral programs and Petri nets: execution, translation, state-space
//! construction and trace-projection comparison.
//!
//! ```
//! use bpnet::models::ModelRef;
//! use bpnet::statespace::{reduce_helper, Guards};
//!
//! let model = "lc:pn:single".parse::<ModelRef>()?.build()?;
//! let lts = model.lts(Guards::default())?;
//! let reduced = reduce_helper(&lts, &model.helpers())?;
//! assert_eq!((lts.num_states(), reduced.num_states()), (10, 6));
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bp;
pub mod cli;
pub mod equiv;
pub mod event;
pub mod models;
pub mod pn;
pub mod statespace;
pub mod translate;

pub use bp::{BProgram, BProgramState, BThread, Script, Status, SyncStatement};
pub use event::{Alphabet, Event, EventSet, ParamMatch, Value};
pub use pn::{Marking, NetBuilder, PetriNet};
pub use statespace::{build_lts, Guards, Lts};
pub use equiv::{compare, ComparisonResult, Verdict};
pub use models::{Model, ModelRef};
pub use translate::{pn_to_bp, translate, TranslateError};

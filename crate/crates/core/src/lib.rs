//! Exact synthesis of minimal separating formulas for LTL fragments over
//! finite traces, with the supporting constructions around it.

pub mod automata;
pub mod instances;
pub mod ltl;
pub mod measures;
pub mod proof;
pub mod trace;
pub mod transforms;

pub use ltl::{parse_formula, prop, Formula, Fragment, Prop};
pub use proof::{min_search, DeductionTree, SearchConfig, SepInstance};
pub use trace::{Letter, SuffixRef, Trace, TraceSet};

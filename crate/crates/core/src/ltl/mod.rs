//! Formulas, the concrete syntax and satisfaction on finite and lasso words.

mod eval;
mod formula;
mod parse;

pub use eval::{eval, eval_all, eval_lasso, separates, EvalError};
pub use formula::{prop, Formula, Fragment, InvalidProp, Op, OpSet, Prop, Unary};
pub use parse::{parse_formula, ParseError};

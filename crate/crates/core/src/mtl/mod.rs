//! Metric temporal logic over discrete-time position traces.

mod ast;
mod atoms;
mod parse;
mod rewrite;
mod semantics;
mod trace;

pub use ast::{Interval, MtlFormula};
pub use atoms::{AgentRef, AtomTable, HalfSpace, Predicate};
pub use parse::{parse, parse_unchecked, ParseError};
pub use rewrite::{rewrite_at, BoolExpr, RewriteError, StampedAtom};
pub use semantics::{eval, eval_strong, eval_weak, View};
pub use trace::{Trace, TraceError};

/// `‖f‖`, see [`MtlFormula::necessary_length`].
pub fn necessary_length(f: &MtlFormula) -> Option<usize> {
    f.necessary_length()
}

//! Time-indexed rewriting of a formula against an observed prefix.
//!
//! `[f]^ℓ_j` replaces atoms at indices `<= ℓ` by their observed truth value,
//! keeps atoms at later indices as time-stamped symbols `π_k`, and unrolls
//! every temporal operator into finite conjunctions and disjunctions. The
//! result is a plain Boolean formula over the symbols.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::semantics::{window, View};
use super::{AtomTable, MtlFormula, Trace};

#[derive(Debug, Error, PartialEq)]
pub enum RewriteError {
    #[error("unbounded interval requires a truncation horizon")]
    UnboundedWithoutHorizon,
    #[error("observed prefix has {have} samples but index {needed} is required")]
    ShortPrefix { have: usize, needed: usize },
    #[error("truncation horizon {horizon} precedes current index {current}")]
    HorizonBeforeCurrent { horizon: usize, current: usize },
}

/// Time-stamped atom `name` evaluated at absolute index `index`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StampedAtom {
    pub name: String,
    pub index: usize,
}

impl fmt::Display for StampedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.name, self.index)
    }
}

/// Boolean formula over time-stamped atoms. Constructors fold constants and
/// flatten nested connectives of the same kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Const(bool),
    Atom(StampedAtom),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

impl BoolExpr {
    pub fn atom(name: impl Into<String>, index: usize) -> Self {
        BoolExpr::Atom(StampedAtom {
            name: name.into(),
            index,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        match e {
            BoolExpr::Const(b) => BoolExpr::Const(!b),
            BoolExpr::Not(inner) => *inner,
            other => BoolExpr::Not(Box::new(other)),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = BoolExpr>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                BoolExpr::Const(true) => {}
                BoolExpr::Const(false) => return BoolExpr::Const(false),
                BoolExpr::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => BoolExpr::Const(true),
            1 => out.pop().unwrap(),
            _ => BoolExpr::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = BoolExpr>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                BoolExpr::Const(false) => {}
                BoolExpr::Const(true) => return BoolExpr::Const(true),
                BoolExpr::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => BoolExpr::Const(false),
            1 => out.pop().unwrap(),
            _ => BoolExpr::Or(out),
        }
    }

    pub fn as_const(&self) -> Option<bool> {
        match self {
            BoolExpr::Const(b) => Some(*b),
            _ => None,
        }
    }

    /// Evaluates with `value` supplying each remaining symbol.
    pub fn eval(&self, value: &mut impl FnMut(&StampedAtom) -> bool) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Atom(a) => value(a),
            BoolExpr::Not(e) => !e.eval(value),
            BoolExpr::And(es) => es.iter().all(|e| e.eval(value)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval(value)),
        }
    }

    /// Pushes negations down to the atoms.
    pub fn to_nnf(&self) -> BoolExpr {
        self.nnf(false)
    }

    fn nnf(&self, negate: bool) -> BoolExpr {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b != negate),
            BoolExpr::Atom(_) => {
                if negate {
                    BoolExpr::Not(Box::new(self.clone()))
                } else {
                    self.clone()
                }
            }
            BoolExpr::Not(e) => e.nnf(!negate),
            BoolExpr::And(es) => {
                let parts = es.iter().map(|e| e.nnf(negate));
                if negate {
                    BoolExpr::or(parts)
                } else {
                    BoolExpr::and(parts)
                }
            }
            BoolExpr::Or(es) => {
                let parts = es.iter().map(|e| e.nnf(negate));
                if negate {
                    BoolExpr::and(parts)
                } else {
                    BoolExpr::or(parts)
                }
            }
        }
    }

    /// Distinct symbols, sorted.
    pub fn atoms(&self) -> Vec<StampedAtom> {
        fn walk(e: &BoolExpr, out: &mut Vec<StampedAtom>) {
            match e {
                BoolExpr::Const(_) => {}
                BoolExpr::Atom(a) => out.push(a.clone()),
                BoolExpr::Not(e) => walk(e, out),
                BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().for_each(|e| walk(e, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Node count, for diagnostics.
    pub fn size(&self) -> usize {
        match self {
            BoolExpr::Const(_) | BoolExpr::Atom(_) => 1,
            BoolExpr::Not(e) => 1 + e.size(),
            BoolExpr::And(es) | BoolExpr::Or(es) => 1 + es.iter().map(|e| e.size()).sum::<usize>(),
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, es: &[BoolExpr], sep: &str) -> fmt::Result {
            write!(f, "(")?;
            for (k, e) in es.iter().enumerate() {
                if k > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")
        }
        match self {
            BoolExpr::Const(true) => write!(f, "T"),
            BoolExpr::Const(false) => write!(f, "F0"),
            BoolExpr::Atom(a) => write!(f, "{a}"),
            BoolExpr::Not(e) => write!(f, "!{e}"),
            BoolExpr::And(es) => join(f, es, "&"),
            BoolExpr::Or(es) => join(f, es, "|"),
        }
    }
}

struct Rewriter<'a> {
    current: usize,
    horizon: Option<usize>,
    trace: &'a Trace,
    atoms: &'a AtomTable,
    memo: HashMap<(*const MtlFormula, usize, View), BoolExpr>,
}

impl Rewriter<'_> {
    fn go(&mut self, view: View, f: &MtlFormula, j: usize) -> Result<BoolExpr, RewriteError> {
        let key = (f as *const MtlFormula, j, view);
        if let Some(e) = self.memo.get(&key) {
            return Ok(e.clone());
        }
        let out = self.compute(view, f, j)?;
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn range(
        &self,
        j: usize,
        i: super::Interval,
    ) -> Result<std::ops::RangeInclusive<usize>, RewriteError> {
        match self.horizon {
            Some(h) => Ok(window(j, i, h)),
            None => match i.end {
                Some(end) => Ok(j + i.start..=j + end),
                None => Err(RewriteError::UnboundedWithoutHorizon),
            },
        }
    }

    fn compute(&mut self, view: View, f: &MtlFormula, j: usize) -> Result<BoolExpr, RewriteError> {
        Ok(match f {
            MtlFormula::True => BoolExpr::Const(true),
            MtlFormula::False => BoolExpr::Const(false),
            MtlFormula::Atom(name) => {
                if j <= self.current {
                    BoolExpr::Const(self.atoms.holds(name, self.trace, j))
                } else if self.horizon.is_some_and(|h| j > h) {
                    BoolExpr::Const(view == View::Weak)
                } else {
                    BoolExpr::atom(name.clone(), j)
                }
            }
            MtlFormula::Not(g) => BoolExpr::not(self.go(view.flip(), g, j)?),
            MtlFormula::And(a, b) => BoolExpr::and([self.go(view, a, j)?, self.go(view, b, j)?]),
            MtlFormula::Or(a, b) => BoolExpr::or([self.go(view, a, j)?, self.go(view, b, j)?]),
            MtlFormula::Until(a, b, i) => {
                let w = self.range(j, *i)?;
                let mut prefix = Vec::new();
                for k in j..*w.start() {
                    prefix.push(self.go(view, a, k)?);
                }
                let mut prefix = BoolExpr::and(prefix);
                let mut disjuncts = Vec::new();
                for jp in w {
                    if prefix == BoolExpr::Const(false) {
                        break;
                    }
                    let hit = self.go(view, b, jp)?;
                    disjuncts.push(BoolExpr::and([hit, prefix.clone()]));
                    prefix = BoolExpr::and([prefix, self.go(view, a, jp)?]);
                }
                BoolExpr::or(disjuncts)
            }
            MtlFormula::Eventually(g, i) => {
                let mut parts = Vec::new();
                for k in self.range(j, *i)? {
                    parts.push(self.go(view, g, k)?);
                }
                BoolExpr::or(parts)
            }
            MtlFormula::Always(g, i) => {
                let mut parts = Vec::new();
                for k in self.range(j, *i)? {
                    parts.push(self.go(view, g, k)?);
                }
                BoolExpr::and(parts)
            }
        })
    }
}

/// Computes `[f]^current_j` against the observed prefix `trace` (samples
/// `0..=current` are read).
///
/// With `horizon = Some(h)` every index past `h` is treated as lying beyond
/// the end of a trace that stops at `h`, exactly as the weak view does; this
/// is how unbounded operators are truncated. With `None` the unrolling is
/// purely symbolic and unbounded intervals are rejected.
pub fn rewrite_at(
    f: &MtlFormula,
    j: usize,
    current: usize,
    trace: &Trace,
    atoms: &AtomTable,
    horizon: Option<usize>,
) -> Result<BoolExpr, RewriteError> {
    if trace.len() < current + 1 {
        return Err(RewriteError::ShortPrefix {
            have: trace.len(),
            needed: current,
        });
    }
    if let Some(h) = horizon {
        if h < current {
            return Err(RewriteError::HorizonBeforeCurrent { horizon: h, current });
        }
    }
    let mut rw = Rewriter {
        current,
        horizon,
        trace,
        atoms,
        memo: HashMap::new(),
    };
    rw.go(View::Weak, f, j)
}

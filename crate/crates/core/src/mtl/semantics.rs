//! Boolean semantics of formulas over finite traces, in the strong and the
//! weak view.
//!
//! On a trace `y^0 .. y^H` an atom at `j > H` is false in the strong view and
//! true in the weak view; negation swaps the views. Temporal operators
//! quantify over `j + I`, which may run past `H`.

use super::{AtomTable, Interval, MtlFormula, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum View {
    Strong,
    Weak,
}

impl View {
    pub fn flip(self) -> Self {
        match self {
            View::Strong => View::Weak,
            View::Weak => View::Strong,
        }
    }
}

/// Candidate indices `j'` for an operator with interval `i` evaluated at `j`
/// on a trace whose last index is `last`.
///
/// Every formula evaluates to the same value at all indices `> last`, so the
/// range past `max(j + start, last + 1)` never needs visiting.
pub(crate) fn window(j: usize, i: Interval, last: usize) -> std::ops::RangeInclusive<usize> {
    let lo = j + i.start;
    let cap = lo.max(last + 1);
    let hi = match i.end {
        Some(end) => (j + end).min(cap),
        None => cap,
    };
    lo..=hi
}

pub fn eval(view: View, trace: &Trace, j: usize, f: &MtlFormula, atoms: &AtomTable) -> bool {
    let last = trace.last_index();
    match f {
        MtlFormula::True => true,
        MtlFormula::False => false,
        MtlFormula::Atom(name) => {
            if j > last {
                view == View::Weak
            } else {
                atoms.holds(name, trace, j)
            }
        }
        MtlFormula::Not(g) => !eval(view.flip(), trace, j, g, atoms),
        MtlFormula::And(a, b) => eval(view, trace, j, a, atoms) && eval(view, trace, j, b, atoms),
        MtlFormula::Or(a, b) => eval(view, trace, j, a, atoms) || eval(view, trace, j, b, atoms),
        MtlFormula::Until(a, b, i) => {
            // Prefix [j, j') must hold for `a`; track it incrementally.
            let w = window(j, *i, last);
            let mut prefix_ok = (j..*w.start()).all(|k| eval(view, trace, k, a, atoms));
            for jp in w {
                if !prefix_ok {
                    return false;
                }
                if eval(view, trace, jp, b, atoms) {
                    return true;
                }
                prefix_ok = eval(view, trace, jp, a, atoms);
            }
            false
        }
        MtlFormula::Eventually(g, i) => window(j, *i, last).any(|k| eval(view, trace, k, g, atoms)),
        MtlFormula::Always(g, i) => window(j, *i, last).all(|k| eval(view, trace, k, g, atoms)),
    }
}

/// `(y^{0:H}, j) ⊨_S f`.
pub fn eval_strong(trace: &Trace, j: usize, f: &MtlFormula, atoms: &AtomTable) -> bool {
    eval(View::Strong, trace, j, f, atoms)
}

/// `(y^{0:H}, j) ⊨_W f`.
pub fn eval_weak(trace: &Trace, j: usize, f: &MtlFormula, atoms: &AtomTable) -> bool {
    eval(View::Weak, trace, j, f, atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtl::{AgentRef, Predicate};

    /// Scalar trace where atom `p` holds iff the sample is <= 0.
    fn scalar(values: &[f64]) -> (Trace, AtomTable) {
        let trace = Trace::new(1, 0.5, values.iter().map(|v| vec![*v]).collect()).unwrap();
        let table = AtomTable::new().with(
            "p",
            Predicate::HalfSpaceConj {
                agent: AgentRef::Leader,
                halfspaces: vec![crate::mtl::HalfSpace::new(vec![1.0], 0.0)],
            },
        );
        (trace, table)
    }

    fn p() -> MtlFormula {
        MtlFormula::atom("p")
    }

    #[test]
    fn always_past_the_end_is_never_strong() {
        let (tr, at) = scalar(&[0.0, 0.0, 0.0, 0.0]);
        let f = MtlFormula::always(p(), Interval::bounded(0, 5));
        assert!(!eval_strong(&tr, 0, &f, &at));
        assert!(eval_weak(&tr, 0, &f, &at));
    }

    #[test]
    fn truth_is_view_independent() {
        let (tr, at) = scalar(&[1.0]);
        for j in 0..4 {
            assert!(eval_strong(&tr, j, &MtlFormula::True, &at));
            assert!(eval_weak(&tr, j, &MtlFormula::True, &at));
        }
    }

    #[test]
    fn eventually_inside_trace() {
        let (tr, at) = scalar(&[0.0, 0.0, 0.0, 0.0]);
        let f = MtlFormula::eventually(p(), Interval::bounded(0, 2));
        assert!(eval_strong(&tr, 0, &f, &at));
    }

    #[test]
    fn atom_past_the_end() {
        let (tr, at) = scalar(&[1.0, 1.0, 1.0, 1.0]);
        assert!(eval_weak(&tr, 7, &p(), &at));
        assert!(!eval_strong(&tr, 7, &p(), &at));
    }

    #[test]
    fn until_requires_prefix() {
        // p holds at 0,1 and fails at 2; q = !p holds at 2.
        let (tr, at) = scalar(&[0.0, 0.0, 1.0, 1.0]);
        let q = MtlFormula::not(p());
        let f = MtlFormula::until(p(), q.clone(), Interval::bounded(2, 3));
        assert!(eval_strong(&tr, 0, &f, &at));
        let g = MtlFormula::until(p(), q, Interval::bounded(3, 3));
        assert!(!eval_weak(&tr, 0, &g, &at));
    }

    #[test]
    fn unbounded_eventually_weak_but_not_strong() {
        let (tr, at) = scalar(&[1.0, 1.0]);
        let f = MtlFormula::eventually(p(), Interval::UNBOUNDED);
        assert!(eval_weak(&tr, 0, &f, &at));
        assert!(!eval_strong(&tr, 0, &f, &at));
    }
}

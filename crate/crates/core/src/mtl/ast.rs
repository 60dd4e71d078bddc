use std::fmt;

/// Integer index interval `[start, end]`; `end == None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub start: usize,
    pub end: Option<usize>,
}

impl Interval {
    pub const UNBOUNDED: Interval = Interval {
        start: 0,
        end: None,
    };

    /// Panics if `start > end`.
    pub fn bounded(start: usize, end: usize) -> Self {
        assert!(start <= end, "interval [{start},{end}] is empty");
        Interval {
            start,
            end: Some(end),
        }
    }

    pub fn from(start: usize) -> Self {
        Interval { start, end: None }
    }

    pub fn is_bounded(&self) -> bool {
        self.end.is_some()
    }

    pub fn is_full(&self) -> bool {
        self.start == 0 && self.end.is_none()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.end {
            Some(end) => write!(f, "[{},{}]", self.start, end),
            None => write!(f, "[{},inf]", self.start),
        }
    }
}

/// Metric temporal logic formula over named atomic propositions.
///
/// `Eventually` and `Always` are kept as their own variants so that printing
/// round-trips, but every consumer treats them as `T U_I f` and `!F_I !f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MtlFormula {
    True,
    False,
    Atom(String),
    Not(Box<MtlFormula>),
    And(Box<MtlFormula>, Box<MtlFormula>),
    Or(Box<MtlFormula>, Box<MtlFormula>),
    Until(Box<MtlFormula>, Box<MtlFormula>, Interval),
    Eventually(Box<MtlFormula>, Interval),
    Always(Box<MtlFormula>, Interval),
}

impl MtlFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        MtlFormula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: MtlFormula) -> Self {
        MtlFormula::Not(Box::new(f))
    }

    pub fn and(a: MtlFormula, b: MtlFormula) -> Self {
        MtlFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: MtlFormula, b: MtlFormula) -> Self {
        MtlFormula::Or(Box::new(a), Box::new(b))
    }

    /// `a => b`, written as `!a | b`.
    pub fn implies(a: MtlFormula, b: MtlFormula) -> Self {
        Self::or(Self::not(a), b)
    }

    pub fn until(a: MtlFormula, b: MtlFormula, interval: Interval) -> Self {
        MtlFormula::Until(Box::new(a), Box::new(b), interval)
    }

    pub fn eventually(f: MtlFormula, interval: Interval) -> Self {
        MtlFormula::Eventually(Box::new(f), interval)
    }

    pub fn always(f: MtlFormula, interval: Interval) -> Self {
        MtlFormula::Always(Box::new(f), interval)
    }

    /// Left-folded conjunction; an empty iterator yields `True`.
    pub fn conjunction(parts: impl IntoIterator<Item = MtlFormula>) -> Self {
        parts
            .into_iter()
            .reduce(Self::and)
            .unwrap_or(MtlFormula::True)
    }

    /// Left-folded disjunction; an empty iterator yields `False`.
    pub fn disjunction(parts: impl IntoIterator<Item = MtlFormula>) -> Self {
        parts
            .into_iter()
            .reduce(Self::or)
            .unwrap_or(MtlFormula::False)
    }

    /// Names of all atoms, in first-occurrence order.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            MtlFormula::True | MtlFormula::False => {}
            MtlFormula::Atom(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            MtlFormula::Not(f) | MtlFormula::Eventually(f, _) | MtlFormula::Always(f, _) => {
                f.collect_atoms(out)
            }
            MtlFormula::And(a, b) | MtlFormula::Or(a, b) | MtlFormula::Until(a, b, _) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            MtlFormula::True | MtlFormula::False | MtlFormula::Atom(_) => 0,
            MtlFormula::Not(f) | MtlFormula::Eventually(f, _) | MtlFormula::Always(f, _) => {
                1 + f.depth()
            }
            MtlFormula::And(a, b) | MtlFormula::Or(a, b) | MtlFormula::Until(a, b, _) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// True when every temporal operator carries a bounded interval.
    pub fn is_bounded(&self) -> bool {
        match self {
            MtlFormula::True | MtlFormula::False | MtlFormula::Atom(_) => true,
            MtlFormula::Not(f) => f.is_bounded(),
            MtlFormula::And(a, b) | MtlFormula::Or(a, b) => a.is_bounded() && b.is_bounded(),
            MtlFormula::Until(a, b, i) => i.is_bounded() && a.is_bounded() && b.is_bounded(),
            MtlFormula::Eventually(f, i) | MtlFormula::Always(f, i) => {
                i.is_bounded() && f.is_bounded()
            }
        }
    }

    /// Necessary length: the number of samples past `j` that the verdict at
    /// `j` can depend on. `None` means unbounded.
    pub fn necessary_length(&self) -> Option<usize> {
        fn plus(a: Option<usize>, b: Option<usize>) -> Option<usize> {
            Some(a? + b?)
        }
        fn max(a: Option<usize>, b: Option<usize>) -> Option<usize> {
            Some(a?.max(b?))
        }
        match self {
            MtlFormula::True | MtlFormula::False | MtlFormula::Atom(_) => Some(0),
            MtlFormula::Not(f) => f.necessary_length(),
            MtlFormula::And(a, b) | MtlFormula::Or(a, b) => {
                max(a.necessary_length(), b.necessary_length())
            }
            MtlFormula::Until(a, b, i) => plus(max(a.necessary_length(), b.necessary_length()), i.end),
            // T U_I f and !(T U_I !f): ||T|| = 0
            MtlFormula::Eventually(f, i) | MtlFormula::Always(f, i) => {
                plus(f.necessary_length(), i.end)
            }
        }
    }
}

/// Fully parenthesised concrete syntax accepted by [`super::parse`].
impl fmt::Display for MtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn itv(i: &Interval) -> String {
            if i.is_full() {
                String::new()
            } else {
                i.to_string()
            }
        }
        match self {
            MtlFormula::True => write!(f, "T"),
            MtlFormula::False => write!(f, "F0"),
            MtlFormula::Atom(name) => write!(f, "{name}"),
            MtlFormula::Not(g) => write!(f, "!{g}"),
            MtlFormula::And(a, b) => write!(f, "({a} & {b})"),
            MtlFormula::Or(a, b) => write!(f, "({a} | {b})"),
            MtlFormula::Until(a, b, i) => match **a {
                MtlFormula::Not(_) | MtlFormula::Eventually(..) | MtlFormula::Always(..) => {
                    write!(f, "(({a}) U{} {b})", itv(i))
                }
                _ => write!(f, "({a} U{} {b})", itv(i)),
            },
            MtlFormula::Eventually(g, i) => write!(f, "F{} {g}", itv(i)),
            MtlFormula::Always(g, i) => write!(f, "G{} {g}", itv(i)),
        }
    }
}

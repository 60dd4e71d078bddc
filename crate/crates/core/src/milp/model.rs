use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    /// Branching order: among fractional binaries, the smallest priority
    /// is branched on first.
    pub priority: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// Affine expression `Σ coef·var + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        LinExpr {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn var(v: VarId) -> Self {
        LinExpr {
            terms: vec![(v, 1.0)],
            constant: 0.0,
        }
    }

    pub fn term(v: VarId, coef: f64) -> Self {
        LinExpr {
            terms: vec![(v, coef)],
            constant: 0.0,
        }
    }

    pub fn add_term(&mut self, v: VarId, coef: f64) {
        self.terms.push((v, coef));
    }

    /// `self += k·other`.
    pub fn add_scaled(&mut self, other: &LinExpr, k: f64) {
        if k == 0.0 {
            return;
        }
        self.terms.extend(other.terms.iter().map(|&(v, c)| (v, c * k)));
        self.constant += k * other.constant;
    }

    /// Merges duplicate variables and drops zero coefficients; terms end up
    /// sorted by variable id.
    pub fn normalized(mut self) -> Self {
        self.terms.sort_by_key(|t| t.0);
        let mut out: Vec<(VarId, f64)> = Vec::with_capacity(self.terms.len());
        for (v, c) in self.terms {
            match out.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|t| t.1 != 0.0);
        self.terms = out;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.1 == 0.0)
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(v, c)| c * values[v.0]).sum::<f64>()
    }
}

impl From<VarId> for LinExpr {
    fn from(v: VarId) -> Self {
        LinExpr::var(v)
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: LinExpr) -> LinExpr {
        self.add_scaled(&rhs, 1.0);
        self
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(mut self, rhs: LinExpr) -> LinExpr {
        self.add_scaled(&rhs, -1.0);
        self
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self * -1.0
    }
}

impl Mul<f64> for LinExpr {
    type Output = LinExpr;
    fn mul(mut self, k: f64) -> LinExpr {
        self.terms.iter_mut().for_each(|t| t.1 *= k);
        self.constant *= k;
        self
    }
}

/// Linear row `Σ coef·var  sense  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violates the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let a = self.activity(values);
        match self.sense {
            Sense::Le => (a - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - a).max(0.0),
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("constraint `{constraint}` references undeclared variable {var}")]
    UnknownVariable { constraint: String, var: VarId },
    #[error("variable `{name}` has empty or invalid bounds [{lower}, {upper}]")]
    BadBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
}

/// Minimisation MILP: variables, linear rows and a linear objective.
/// Construction is append-only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpModel {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(VarId, f64)>,
    objective_offset: f64,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            kind: VarKind::Continuous,
            lower,
            upper,
            priority: 0,
        });
        VarId(self.vars.len() - 1)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
            priority: 0,
        });
        VarId(self.vars.len() - 1)
    }

    pub fn set_priority(&mut self, v: VarId, priority: u32) {
        self.vars[v.0].priority = priority;
    }

    /// Adds `expr sense rhs`; the expression's constant moves to the right.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: LinExpr,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        let expr = expr.normalized();
        self.constraints.push(Constraint {
            name: name.into(),
            terms: expr.terms,
            sense,
            rhs: rhs - expr.constant,
        });
        self.constraints.len() - 1
    }

    /// Tightens a variable's bounds (used to clamp variables to fixed values).
    pub fn set_bounds(&mut self, v: VarId, lower: f64, upper: f64) {
        let var = &mut self.vars[v.0];
        var.lower = lower;
        var.upper = upper;
    }

    /// Adds `expr` to the minimised objective.
    pub fn add_objective(&mut self, expr: &LinExpr) {
        self.objective.extend_from_slice(&expr.terms);
        self.objective_offset += expr.constant;
        let merged = LinExpr {
            terms: std::mem::take(&mut self.objective),
            constant: 0.0,
        }
        .normalized();
        self.objective = merged.terms;
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, v: VarId) -> &Variable {
        &self.vars[v.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(VarId, f64)] {
        &self.objective
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_offset
            + self
                .objective
                .iter()
                .map(|&(v, c)| c * values[v.0])
                .sum::<f64>()
    }

    /// Interval of `expr` over the variable bounds.
    pub fn expr_range(&self, expr: &LinExpr) -> (f64, f64) {
        let (mut lo, mut hi) = (expr.constant, expr.constant);
        for &(v, c) in &expr.terms {
            let var = &self.vars[v.0];
            if c >= 0.0 {
                lo += c * var.lower;
                hi += c * var.upper;
            } else {
                lo += c * var.upper;
                hi += c * var.lower;
            }
        }
        (lo, hi)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for var in &self.vars {
            if var.lower.is_nan() || var.upper.is_nan() || var.lower > var.upper {
                return Err(ModelError::BadBounds {
                    name: var.name.clone(),
                    lower: var.lower,
                    upper: var.upper,
                });
            }
        }
        for c in &self.constraints {
            for &(v, coef) in &c.terms {
                if v.0 >= self.vars.len() {
                    return Err(ModelError::UnknownVariable {
                        constraint: c.name.clone(),
                        var: v,
                    });
                }
                if !coef.is_finite() {
                    return Err(ModelError::NonFinite(c.name.clone()));
                }
            }
            if !c.rhs.is_finite() {
                return Err(ModelError::NonFinite(c.name.clone()));
            }
        }
        if self.objective.iter().any(|t| !t.1.is_finite()) {
            return Err(ModelError::NonFinite("objective".into()));
        }
        Ok(())
    }

    /// Largest row violation or bound violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.violation(values))
            .fold(0.0, f64::max);
        let bounds = self
            .vars
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }
}

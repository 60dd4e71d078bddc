//! MILP encodings: leader dynamics over the horizon, time-stamped Boolean
//! formulas over the leader's outputs, and the 1-norm effort objective.
//!
//! Formulas are encoded in negation normal form with one-sided indicators:
//! a binary `z` for a subformula only implies that the subformula holds.
//! Since the formula is monotone in its literals after normalisation this
//! keeps feasibility equivalent to satisfaction while halving the rows.
//! Subformulas that must hold unconditionally (everything reachable from the
//! root through conjunctions) become hard constraints without indicators.

use std::collections::HashMap;

use nalgebra::DMatrix;
use thiserror::Error;

use super::model::{LinExpr, MilpModel, Sense, VarId};
use crate::mtl::{AtomTable, BoolExpr, HalfSpace, Predicate, StampedAtom};

#[derive(Debug, Error, PartialEq)]
pub enum EncodeError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("atom `{0}` is not bound")]
    UnknownAtom(String),
    #[error("atom {0} lies outside the encoded horizon")]
    OutsideHorizon(StampedAtom),
    #[error("atom {atom} needs big-M {needed:.6e}, above the cap {cap:.6e}")]
    BigMTooSmall {
        atom: StampedAtom,
        needed: f64,
        cap: f64,
    },
    #[error("atom {0} constrains an output with infinite bounds")]
    Unbounded(StampedAtom),
    #[error("atom {atom} refers to agent slot {slot} which is not present")]
    MissingAgent { atom: StampedAtom, slot: usize },
}

/// Variable handles for the leader over one horizon: `x[j]` for
/// `j = 0..=N`, `u[j]` and `y[j]` for `j = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderVars {
    pub x: Vec<Vec<VarId>>,
    pub u: Vec<Vec<VarId>>,
    pub y: Vec<Vec<VarId>>,
}

/// Chains `x^{j+1} = A x^j + B u^j`, `y^j = C x^j` with `x^0` fixed.
///
/// Outputs get the box `y_bounds`; formulas over them need finite bounds for
/// their big-M constants.
#[allow(clippy::too_many_arguments)]
pub fn encode_dynamics(
    model: &mut MilpModel,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    x_init: &[f64],
    steps: usize,
    u_bounds: (&[f64], &[f64]),
    y_bounds: (&[f64], &[f64]),
) -> Result<LeaderVars, EncodeError> {
    let nx = a.nrows();
    let nu = b.ncols();
    let ny = c.nrows();
    if a.ncols() != nx || b.nrows() != nx || c.ncols() != nx {
        return Err(EncodeError::Dimension(format!(
            "A {}x{}, B {}x{}, C {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    if x_init.len() != nx {
        return Err(EncodeError::Dimension(format!(
            "initial state has {} entries, expected {nx}",
            x_init.len()
        )));
    }
    if u_bounds.0.len() != nu || u_bounds.1.len() != nu {
        return Err(EncodeError::Dimension("input bounds".into()));
    }
    if y_bounds.0.len() != ny || y_bounds.1.len() != ny {
        return Err(EncodeError::Dimension("output bounds".into()));
    }
    if steps == 0 {
        return Err(EncodeError::Dimension("horizon must be at least 1".into()));
    }

    let mut x = Vec::with_capacity(steps + 1);
    x.push(
        (0..nx)
            .map(|k| model.add_var(format!("x0_{k}"), x_init[k], x_init[k]))
            .collect::<Vec<_>>(),
    );
    let mut u = Vec::with_capacity(steps);
    let mut y = Vec::with_capacity(steps);
    for j in 0..steps {
        let uj: Vec<VarId> = (0..nu)
            .map(|k| model.add_var(format!("u{j}_{k}"), u_bounds.0[k], u_bounds.1[k]))
            .collect();
        let mut yj = Vec::with_capacity(ny);
        for r in 0..ny {
            let (lo, hi) = (y_bounds.0[r], y_bounds.1[r]);
            // an output that just reads one state reuses that state's column
            let nz: Vec<usize> = (0..nx).filter(|&k| c[(r, k)] != 0.0).collect();
            if let [k] = nz[..] {
                if c[(r, k)] == 1.0 {
                    let xv = x[j][k];
                    let v = model.var(xv);
                    let (l2, h2) = (v.lower.max(lo), v.upper.min(hi));
                    if l2 <= h2 {
                        model.set_bounds(xv, l2, h2);
                        yj.push(xv);
                        continue;
                    }
                }
            }
            let yv = model.add_var(format!("y{j}_{r}"), lo, hi);
            let mut e = LinExpr::term(yv, -1.0);
            for (k, &xv) in x[j].iter().enumerate() {
                e.add_term(xv, c[(r, k)]);
            }
            model.add_constraint(format!("out{j}_{r}"), e, Sense::Eq, 0.0);
            yj.push(yv);
        }
        let next: Vec<VarId> = (0..nx)
            .map(|k| model.add_var(format!("x{}_{k}", j + 1), f64::NEG_INFINITY, f64::INFINITY))
            .collect();
        for (r, &xn) in next.iter().enumerate() {
            let mut e = LinExpr::term(xn, -1.0);
            for (k, &xv) in x[j].iter().enumerate() {
                e.add_term(xv, a[(r, k)]);
            }
            for (k, &uv) in uj.iter().enumerate() {
                e.add_term(uv, b[(r, k)]);
            }
            model.add_constraint(format!("dyn{j}_{r}"), e, Sense::Eq, 0.0);
        }
        x.push(next);
        u.push(uj);
        y.push(yj);
    }
    Ok(LeaderVars { x, u, y })
}

/// Adds `Σ w_k |u_jk|` to the objective through `t_jk >= ±u_jk`.
/// `weights` has one entry per input channel.
pub fn add_l1_objective(model: &mut MilpModel, u: &[Vec<VarId>], weights: &[f64]) -> Vec<Vec<VarId>> {
    let mut out = Vec::with_capacity(u.len());
    for (j, uj) in u.iter().enumerate() {
        let mut tj = Vec::with_capacity(uj.len());
        for (k, &uv) in uj.iter().enumerate() {
            let t = model.add_var(format!("t{j}_{k}"), 0.0, f64::INFINITY);
            model.add_constraint(
                format!("abs{j}_{k}+"),
                LinExpr::var(t) - LinExpr::var(uv),
                Sense::Ge,
                0.0,
            );
            model.add_constraint(
                format!("abs{j}_{k}-"),
                LinExpr::var(t) + LinExpr::var(uv),
                Sense::Ge,
                0.0,
            );
            let w = weights.get(k).copied().unwrap_or(1.0);
            model.add_objective(&LinExpr::term(t, w));
            tj.push(t);
        }
        out.push(tj);
    }
    out
}

/// What the formula encoder needs to resolve a time-stamped atom.
#[derive(Debug, Clone, Copy)]
pub struct FormulaContext<'a> {
    pub atoms: &'a AtomTable,
    /// Position dimension `z`.
    pub dim: usize,
    /// Absolute index of `leader[0]`.
    pub origin: usize,
    /// Leader output variables per local index.
    pub leader: &'a [Vec<VarId>],
    /// Stacked constant samples `[_, ŷ1, ..., ŷQ]` per local index; the
    /// leader slot is ignored.
    pub others: &'a [Vec<f64>],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodeOptions {
    /// Margin for strict inequalities.
    pub epsilon: f64,
    /// Upper limit on any big-M constant; `None` accepts whatever the
    /// variable bounds imply.
    pub big_m_cap: Option<f64>,
    /// Amount by which both proximity boxes are pulled away from the
    /// sphere, so solver tolerances cannot flip the 2-norm verdict.
    pub proximity_margin: f64,
    /// Inward offset of every `a·y <= b` face a literal requires, so a
    /// simulated sample that rounds differently from the LP still lies
    /// inside.
    pub region_margin: f64,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            epsilon: 1e-6,
            big_m_cap: None,
            proximity_margin: 1e-4,
            region_margin: 1e-6,
        }
    }
}

/// Truth of an encoded subformula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Literal {
    Const(bool),
    Var(VarId),
}

/// A literal after resolving constants: either all of `rows` hold
/// (`a·y <= b`) or at least one of them fails strictly.
enum Shape {
    Const(bool),
    AllOf(StampedAtom, Vec<HalfSpace>),
    AnyNot(StampedAtom, Vec<HalfSpace>),
}

/// Encodes `expr` and constrains it to hold. The returned literal is the
/// root indicator (constant for formulas that fold or are forced by hard
/// rows).
pub fn encode_formula(
    model: &mut MilpModel,
    expr: &BoolExpr,
    ctx: &FormulaContext<'_>,
    opts: EncodeOptions,
) -> Result<Literal, EncodeError> {
    let nnf = expr.to_nnf();
    let mut enc = Encoder {
        model,
        ctx,
        opts,
        cache: HashMap::new(),
        forced: HashMap::new(),
        counter: 0,
    };
    enc.force(&nnf)?;
    Ok(match nnf {
        BoolExpr::Const(false) => Literal::Const(false),
        _ => Literal::Const(true),
    })
}

struct Encoder<'m, 'c> {
    model: &'m mut MilpModel,
    ctx: &'c FormulaContext<'c>,
    opts: EncodeOptions,
    cache: HashMap<(StampedAtom, bool), Literal>,
    forced: HashMap<(StampedAtom, bool), ()>,
    counter: usize,
}

impl Encoder<'_, '_> {
    fn fresh(&mut self, tag: &str) -> VarId {
        self.counter += 1;
        self.model.add_binary(format!("{tag}#{}", self.counter))
    }

    fn inherit_priority(&mut self, z: VarId, children: &[VarId]) {
        let p = children
            .iter()
            .map(|v| self.model.var(*v).priority)
            .min()
            .unwrap_or(0);
        self.model.set_priority(z, p);
    }

    fn leader_expr(&self, atom: &StampedAtom, h: &HalfSpace) -> Result<LinExpr, EncodeError> {
        let local = atom.index - self.ctx.origin;
        let y = &self.ctx.leader[local];
        if h.normal.len() != y.len() {
            return Err(EncodeError::Dimension(format!(
                "half-space of atom {atom} has {} entries, outputs have {}",
                h.normal.len(),
                y.len()
            )));
        }
        let mut e = LinExpr::constant(-h.offset);
        for (&v, &a) in y.iter().zip(&h.normal) {
            if a != 0.0 {
                e.add_term(v, a);
            }
        }
        Ok(e)
    }

    fn shape(&self, atom: &StampedAtom, positive: bool) -> Result<Shape, EncodeError> {
        let ctx = self.ctx;
        let pred = ctx
            .atoms
            .get(&atom.name)
            .ok_or_else(|| EncodeError::UnknownAtom(atom.name.clone()))?;
        if atom.index < ctx.origin || atom.index - ctx.origin >= ctx.leader.len() {
            return Err(EncodeError::OutsideHorizon(atom.clone()));
        }
        let local = atom.index - ctx.origin;
        let slot_of = |slot: usize| -> Result<&[f64], EncodeError> {
            let s = &ctx.others[local];
            if (slot + 1) * ctx.dim > s.len() {
                return Err(EncodeError::MissingAgent {
                    atom: atom.clone(),
                    slot,
                });
            }
            Ok(&s[slot * ctx.dim..(slot + 1) * ctx.dim])
        };
        Ok(match pred {
            Predicate::HalfSpaceConj { agent, halfspaces } => {
                let slot = agent.slot();
                if slot == 0 {
                    if positive {
                        Shape::AllOf(atom.clone(), halfspaces.clone())
                    } else {
                        Shape::AnyNot(atom.clone(), halfspaces.clone())
                    }
                } else {
                    let y = slot_of(slot)?;
                    let holds = halfspaces.iter().all(|h| h.slack(y) <= 0.0);
                    Shape::Const(holds == positive)
                }
            }
            Predicate::Proximity { follower, eta } => {
                // Inner approximations of the ball and of its complement:
                // the inscribed cube when the leader must be near, the
                // outside of the circumscribed cube when it must be away.
                let yi = slot_of(*follower)?;
                let half = if positive {
                    eta / (ctx.dim as f64).sqrt() - self.opts.proximity_margin
                } else {
                    eta + self.opts.proximity_margin
                };
                let mut hs = Vec::with_capacity(2 * ctx.dim);
                for k in 0..ctx.dim {
                    let mut up = vec![0.0; ctx.dim];
                    up[k] = 1.0;
                    hs.push(HalfSpace::new(up, yi[k] + half));
                    let mut down = vec![0.0; ctx.dim];
                    down[k] = -1.0;
                    hs.push(HalfSpace::new(down, half - yi[k]));
                }
                if positive {
                    Shape::AllOf(atom.clone(), hs)
                } else {
                    Shape::AnyNot(atom.clone(), hs)
                }
            }
        })
    }

    fn check_m(&self, atom: &StampedAtom, m: f64) -> Result<f64, EncodeError> {
        if !m.is_finite() {
            return Err(EncodeError::Unbounded(atom.clone()));
        }
        let m = 1.1 * m;
        if let Some(cap) = self.opts.big_m_cap {
            if m > cap {
                return Err(EncodeError::BigMTooSmall {
                    atom: atom.clone(),
                    needed: m,
                    cap,
                });
            }
        }
        Ok(m)
    }

    /// `z = 1  ⇒  a·y <= b`.
    fn implies_le(&mut self, atom: &StampedAtom, z: Option<VarId>, h: &HalfSpace) -> Result<(), EncodeError> {
        let e = self.leader_expr(atom, h)? + LinExpr::constant(self.opts.region_margin);
        let (_, hi) = self.model.expr_range(&e);
        let name = format!("{atom}<=");
        match z {
            None => {
                if hi <= 0.0 {
                    return Ok(());
                }
                let e = e.normalized();
                if self.tighten(&e, Sense::Le, 0.0) {
                    return Ok(());
                }
                self.model.add_constraint(name, e, Sense::Le, 0.0);
            }
            Some(z) => {
                if hi <= 0.0 {
                    return Ok(());
                }
                let m = self.check_m(atom, hi)?;
                // e <= M (1 - z)
                self.model
                    .add_constraint(name, e + LinExpr::term(z, m), Sense::Le, m);
            }
        }
        Ok(())
    }

    /// Folds a forced single-variable row into that variable's bounds.
    /// Returns false when the row has to stay (several terms, or the bound
    /// would empty the domain).
    fn tighten(&mut self, e: &LinExpr, sense: Sense, rhs: f64) -> bool {
        let [(v, a)] = e.terms[..] else {
            return false;
        };
        let t = (rhs - e.constant) / a;
        let var = self.model.var(v);
        let (mut lo, mut hi) = (var.lower, var.upper);
        if (sense == Sense::Le) == (a > 0.0) {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
        if lo > hi {
            return false;
        }
        self.model.set_bounds(v, lo, hi);
        true
    }

    /// `z = 1  ⇒  a·y >= b + ε`.
    fn implies_gt(&mut self, atom: &StampedAtom, z: Option<VarId>, h: &HalfSpace) -> Result<(), EncodeError> {
        let eps = self.opts.epsilon;
        let e = self.leader_expr(atom, h)?;
        let (lo, _) = self.model.expr_range(&e);
        let name = format!("{atom}>");
        match z {
            None => {
                if lo >= eps {
                    return Ok(());
                }
                let e = e.normalized();
                if self.tighten(&e, Sense::Ge, eps) {
                    return Ok(());
                }
                self.model.add_constraint(name, e, Sense::Ge, eps);
            }
            Some(z) => {
                if lo >= eps {
                    return Ok(());
                }
                let m = self.check_m(atom, eps - lo)?;
                // e >= eps - M (1 - z)
                self.model
                    .add_constraint(name, e - LinExpr::term(z, m), Sense::Ge, eps - m);
            }
        }
        Ok(())
    }

    /// Adds rows for shape under indicator `z` (`None`: unconditional).
    fn emit(&mut self, shape: &Shape, z: Option<VarId>) -> Result<(), EncodeError> {
        match shape {
            Shape::Const(true) => {}
            Shape::Const(false) => match z {
                None => {
                    self.model
                        .add_constraint("false", LinExpr::zero(), Sense::Ge, 1.0);
                }
                Some(z) => {
                    self.model
                        .add_constraint("false", LinExpr::var(z), Sense::Eq, 0.0);
                }
            },
            Shape::AllOf(atom, hs) => {
                for h in hs {
                    self.implies_le(atom, z, h)?;
                }
            }
            Shape::AnyNot(atom, hs) => {
                if hs.len() == 1 {
                    self.implies_gt(atom, z, &hs[0])?;
                } else {
                    let mut sum = LinExpr::zero();
                    for h in hs {
                        let w = self.fresh("side");
                        self.model.set_priority(w, atom.index as u32);
                        self.implies_gt(atom, Some(w), h)?;
                        sum.add_term(w, 1.0);
                    }
                    match z {
                        None => self.model.add_constraint(format!("{atom}|"), sum, Sense::Ge, 1.0),
                        Some(z) => self.model.add_constraint(
                            format!("{atom}|"),
                            sum - LinExpr::var(z),
                            Sense::Ge,
                            0.0,
                        ),
                    };
                }
            }
        }
        Ok(())
    }

    fn literal_parts(e: &BoolExpr) -> Option<(&StampedAtom, bool)> {
        match e {
            BoolExpr::Atom(a) => Some((a, true)),
            BoolExpr::Not(inner) => match inner.as_ref() {
                BoolExpr::Atom(a) => Some((a, false)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Constrains `e` to hold unconditionally.
    fn force(&mut self, e: &BoolExpr) -> Result<(), EncodeError> {
        if let Some((atom, pos)) = Self::literal_parts(e) {
            let key = (atom.clone(), pos);
            if self.forced.contains_key(&key) {
                return Ok(());
            }
            self.forced.insert(key, ());
            let shape = self.shape(atom, pos)?;
            return self.emit(&shape, None);
        }
        match e {
            BoolExpr::Const(true) => Ok(()),
            BoolExpr::Const(false) => self.emit(&Shape::Const(false), None),
            BoolExpr::And(parts) => parts.iter().try_for_each(|p| self.force(p)),
            BoolExpr::Or(parts) => {
                let mut sum = LinExpr::zero();
                for p in parts {
                    match self.indicator(p)? {
                        Literal::Const(true) => return Ok(()),
                        Literal::Const(false) => {}
                        Literal::Var(v) => sum.add_term(v, 1.0),
                    }
                }
                self.model.add_constraint("or", sum, Sense::Ge, 1.0);
                Ok(())
            }
            _ => unreachable!("input is in negation normal form"),
        }
    }

    /// Returns a literal that implies `e`.
    fn indicator(&mut self, e: &BoolExpr) -> Result<Literal, EncodeError> {
        if let Some((atom, pos)) = Self::literal_parts(e) {
            let key = (atom.clone(), pos);
            if let Some(&lit) = self.cache.get(&key) {
                return Ok(lit);
            }
            let lit = match self.shape(atom, pos)? {
                Shape::Const(b) => Literal::Const(b),
                shape => {
                    let z = self.fresh(&atom.to_string());
                    self.model.set_priority(z, atom.index as u32);
                    self.emit(&shape, Some(z))?;
                    Literal::Var(z)
                }
            };
            self.cache.insert(key, lit);
            return Ok(lit);
        }
        match e {
            BoolExpr::Const(b) => Ok(Literal::Const(*b)),
            BoolExpr::And(parts) => {
                let mut vars = Vec::new();
                for p in parts {
                    match self.indicator(p)? {
                        Literal::Const(true) => {}
                        Literal::Const(false) => return Ok(Literal::Const(false)),
                        Literal::Var(v) => vars.push(v),
                    }
                }
                match vars.len() {
                    0 => Ok(Literal::Const(true)),
                    1 => Ok(Literal::Var(vars[0])),
                    _ => {
                        let z = self.fresh("and");
                        self.inherit_priority(z, &vars);
                        for v in vars {
                            self.model.add_constraint(
                                "and",
                                LinExpr::var(z) - LinExpr::var(v),
                                Sense::Le,
                                0.0,
                            );
                        }
                        Ok(Literal::Var(z))
                    }
                }
            }
            BoolExpr::Or(parts) => {
                let mut vars = Vec::new();
                for p in parts {
                    match self.indicator(p)? {
                        Literal::Const(true) => return Ok(Literal::Const(true)),
                        Literal::Const(false) => {}
                        Literal::Var(v) => vars.push(v),
                    }
                }
                match vars.len() {
                    0 => Ok(Literal::Const(false)),
                    1 => Ok(Literal::Var(vars[0])),
                    _ => {
                        let z = self.fresh("or");
                        self.inherit_priority(z, &vars);
                        let mut e = LinExpr::term(z, -1.0);
                        for v in vars {
                            e.add_term(v, 1.0);
                        }
                        self.model.add_constraint("or", e, Sense::Ge, 0.0);
                        Ok(Literal::Var(z))
                    }
                }
            }
            _ => unreachable!("input is in negation normal form"),
        }
    }
}

//! Small random MILPs and an exhaustive oracle for them.
//!
//! The oracle enumerates every binary assignment and solves the remaining
//! two-variable LP by checking all vertices of its feasible polygon.

use leadsynth::milp::{LinExpr, MilpModel, Sense};
use rand::Rng;

pub struct Instance {
    pub nb: usize,
    // rows over [b.., x, y]: coefs, sense, rhs
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
    pub cost: Vec<f64>,
    pub box_: [(f64, f64); 2],
}

/// Random model with `1..=max_binaries` binaries and two bounded continuous
/// variables.
pub fn random_instance(rng: &mut impl Rng, max_binaries: usize) -> Instance {
    let nb = rng.random_range(1..=max_binaries);
    let nrows = rng.random_range(1..=5);
    let width = nb + 2;
    let mut rows = Vec::new();
    for _ in 0..nrows {
        let coefs: Vec<f64> = (0..width)
            .map(|_| rng.random_range(-5i32..=5) as f64)
            .collect();
        let sense = match rng.random_range(0..5) {
            0 => Sense::Ge,
            1 => Sense::Eq,
            _ => Sense::Le,
        };
        let rhs = rng.random_range(-6i32..=8) as f64;
        rows.push((coefs, sense, rhs));
    }
    let cost = (0..width)
        .map(|_| rng.random_range(-5i32..=5) as f64)
        .collect();
    let lo = rng.random_range(-4i32..=0) as f64;
    let hi = rng.random_range(1i32..=4) as f64;
    Instance {
        nb,
        rows,
        cost,
        box_: [(lo, hi), (-3.0, 3.0)],
    }
}

pub fn build(inst: &Instance) -> MilpModel {
    let mut m = MilpModel::new();
    let mut ids = Vec::new();
    for i in 0..inst.nb {
        ids.push(m.add_binary(format!("b{i}")));
    }
    ids.push(m.add_var("x", inst.box_[0].0, inst.box_[0].1));
    ids.push(m.add_var("y", inst.box_[1].0, inst.box_[1].1));
    for (k, (coefs, sense, rhs)) in inst.rows.iter().enumerate() {
        let mut e = LinExpr::zero();
        for (v, c) in ids.iter().zip(coefs) {
            e.add_term(*v, *c);
        }
        m.add_constraint(format!("r{k}"), e, *sense, *rhs);
    }
    let mut obj = LinExpr::zero();
    for (v, c) in ids.iter().zip(&inst.cost) {
        obj.add_term(*v, *c);
    }
    m.add_objective(&obj);
    m
}

/// Minimum of `c·(x, y)` over `{a·(x,y) sense r}` inside the box, or None.
fn lp2(rows: &[([f64; 2], Sense, f64)], c: [f64; 2], bx: [(f64, f64); 2]) -> Option<f64> {
    let mut lines: Vec<([f64; 2], f64)> = rows.iter().map(|r| (r.0, r.2)).collect();
    lines.push(([1.0, 0.0], bx[0].0));
    lines.push(([1.0, 0.0], bx[0].1));
    lines.push(([0.0, 1.0], bx[1].0));
    lines.push(([0.0, 1.0], bx[1].1));
    let feasible = |p: [f64; 2]| {
        let tol = 1e-9;
        p[0] >= bx[0].0 - tol
            && p[0] <= bx[0].1 + tol
            && p[1] >= bx[1].0 - tol
            && p[1] <= bx[1].1 + tol
            && rows.iter().all(|(a, s, r)| {
                let v = a[0] * p[0] + a[1] * p[1];
                match s {
                    Sense::Le => v <= r + tol,
                    Sense::Ge => v >= r - tol,
                    Sense::Eq => (v - r).abs() <= tol,
                }
            })
    };
    let mut best: Option<f64> = None;
    for i in 0..lines.len() {
        for k in i + 1..lines.len() {
            let (a, r) = lines[i];
            let (b, s) = lines[k];
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let p = [(r * b[1] - a[1] * s) / det, (a[0] * s - r * b[0]) / det];
            if feasible(p) {
                let v = c[0] * p[0] + c[1] * p[1];
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    }
    best
}

/// Optimum by enumerating every binary assignment, or None if infeasible.
pub fn oracle(inst: &Instance) -> Option<f64> {
    let mut best: Option<f64> = None;
    for mask in 0..(1u32 << inst.nb) {
        let b: Vec<f64> = (0..inst.nb).map(|i| ((mask >> i) & 1) as f64).collect();
        let rows: Vec<([f64; 2], Sense, f64)> = inst
            .rows
            .iter()
            .map(|(coefs, s, r)| {
                let fixed: f64 = coefs[..inst.nb].iter().zip(&b).map(|(a, x)| a * x).sum();
                ([coefs[inst.nb], coefs[inst.nb + 1]], *s, r - fixed)
            })
            .collect();
        let fixed_cost: f64 = inst.cost[..inst.nb].iter().zip(&b).map(|(a, x)| a * x).sum();
        let c = [inst.cost[inst.nb], inst.cost[inst.nb + 1]];
        if let Some(v) = lp2(&rows, c, inst.box_) {
            let v = v + fixed_cost;
            best = Some(best.map_or(v, |o: f64| o.min(v)));
        }
    }
    best
}

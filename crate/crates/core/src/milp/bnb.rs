//! Branch-and-bound over the binary variables.
//!
//! Best-bound node selection with plunging: after branching the child on the
//! rounding side is processed immediately, its sibling goes to the open
//! queue. Node order depends only on the model, so runs are reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::model::{MilpModel, VarKind};
use super::simplex::{LpEngine, LpStatus};

const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node limit reached; `values` holds the incumbent if one was found.
    IterLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub values: Option<Vec<f64>>,
    pub objective: f64,
    pub nodes: usize,
}

impl MilpSolution {
    pub fn has_solution(&self) -> bool {
        self.values.is_some()
    }
}

/// Anything that can solve a [`MilpModel`].
pub trait MilpSolver {
    fn solve(&self, model: &MilpModel) -> MilpSolution;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchAndBound {
    pub node_limit: usize,
}

impl Default for BranchAndBound {
    fn default() -> Self {
        BranchAndBound { node_limit: 200_000 }
    }
}

impl MilpSolver for BranchAndBound {
    fn solve(&self, model: &MilpModel) -> MilpSolution {
        solve(model, self.node_limit)
    }
}

struct Open {
    bound: f64,
    id: usize,
    fixes: Vec<(usize, f64)>,
    /// Branch that created the node: variable, value, and how far the
    /// parent's LP value had to move.
    branch: Option<(usize, f64, f64)>,
}

impl PartialEq for Open {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Open {
    // max-heap: smaller bound first, then older node first
    fn cmp(&self, o: &Self) -> Ordering {
        o.bound
            .total_cmp(&self.bound)
            .then_with(|| o.id.cmp(&self.id))
    }
}

/// Objective degradation per unit of rounding, learned from solved children.
struct Pseudocosts {
    sum: Vec<[f64; 2]>,
    count: Vec<[u32; 2]>,
}

impl Pseudocosts {
    fn new(n: usize) -> Self {
        Pseudocosts {
            sum: vec![[0.0; 2]; n],
            count: vec![[0; 2]; n],
        }
    }

    fn record(&mut self, j: usize, up: bool, gain: f64) {
        let d = up as usize;
        self.sum[j][d] += gain.max(0.0);
        self.count[j][d] += 1;
    }

    fn average(&self, d: usize) -> f64 {
        let (s, c) = self
            .sum
            .iter()
            .zip(&self.count)
            .filter(|(_, c)| c[d] > 0)
            .fold((0.0, 0u32), |(s, n), (v, c)| (s + v[d] / c[d] as f64, n + 1));
        if c == 0 {
            1.0
        } else {
            s / c as f64
        }
    }

    fn estimate(&self, j: usize, d: usize, avg: f64) -> f64 {
        if self.count[j][d] == 0 {
            avg
        } else {
            self.sum[j][d] / self.count[j][d] as f64
        }
    }
}

/// Solves `model` to optimality or until `node_limit` LPs have been solved.
pub fn solve(model: &MilpModel, node_limit: usize) -> MilpSolution {
    let binaries: Vec<usize> = model
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(i, _)| i)
        .collect();
    let base: Vec<(f64, f64)> = model.vars().iter().map(|v| (v.lower, v.upper)).collect();
    let mut lp = LpEngine::new(model);
    let mut pc = Pseudocosts::new(model.num_vars());
    let priority: Vec<u32> = model.vars().iter().map(|v| v.priority).collect();

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut heap: BinaryHeap<Open> = BinaryHeap::new();
    // until a first incumbent exists, open nodes are explored depth first
    let mut dive: Vec<Open> = Vec::new();
    let mut next_id = 0usize;
    let mut nodes = 0usize;
    let mut current: Option<Open> = Some(Open {
        bound: f64::NEG_INFINITY,
        id: 0,
        fixes: Vec::new(),
        branch: None,
    });
    let mut applied: Vec<(usize, f64)> = Vec::new();
    let mut saw_unbounded = false;

    loop {
        let node = match current.take() {
            Some(n) => n,
            None => match if incumbent.is_none() { dive.pop() } else { heap.pop() } {
                Some(n) => {
                    if let Some((inc, _)) = &incumbent {
                        if n.bound >= inc - prune_gap(*inc) {
                            continue;
                        }
                    }
                    n
                }
                None => break,
            },
        };
        if nodes >= node_limit {
            let (objective, values) = match incumbent {
                Some((_, v)) => {
                    let v = polish(model, &binaries, v);
                    (model.objective_value(&v), Some(v))
                }
                None => (f64::NAN, None),
            };
            return MilpSolution {
                status: MilpStatus::IterLimit,
                values,
                objective,
                nodes,
            };
        }
        nodes += 1;

        for &(j, _) in &applied {
            lp.set_bounds(j, base[j].0, base[j].1);
        }
        for &(j, v) in &node.fixes {
            lp.set_bounds(j, v, v);
        }
        applied.clone_from(&node.fixes);

        match lp.solve() {
            LpStatus::Optimal => {}
            LpStatus::Infeasible | LpStatus::IterLimit => {
                continue;
            }
            LpStatus::Unbounded => {
                saw_unbounded = true;
                break;
            }
        }
        let obj = lp.objective();
        if let Some((j, v, delta)) = node.branch {
            if node.bound.is_finite() && delta > 0.0 {
                pc.record(j, v > 0.5, (obj - node.bound) / delta);
            }
        }
        if let Some((inc, _)) = &incumbent {
            if obj >= inc - prune_gap(*inc) {
                continue;
            }
        }
        let x = lp.values();
        let avg = [pc.average(0), pc.average(1)];
        let mut branch: Option<(usize, f64)> = None;
        let mut best = f64::NEG_INFINITY;
        let tier = binaries
            .iter()
            .filter(|&&j| (x[j] - x[j].round()).abs() > INT_TOL)
            .map(|&j| priority[j])
            .min();
        for &j in &binaries {
            let f = x[j] - x[j].floor();
            if f.min(1.0 - f) <= INT_TOL || Some(priority[j]) != tier {
                continue;
            }
            let down = pc.estimate(j, 0, avg[0]) * f;
            let up = pc.estimate(j, 1, avg[1]) * (1.0 - f);
            let score = down.max(1e-6) * up.max(1e-6);
            if score > best {
                best = score;
                branch = Some((j, x[j]));
            }
        }
        match branch {
            None => {
                let mut vals = x.to_vec();
                for &j in &binaries {
                    vals[j] = vals[j].round();
                }
                incumbent = Some((obj, vals));
                heap.extend(dive.drain(..));
            }
            Some((j, xj)) => {
                let near = if xj >= 0.5 { 1.0 } else { 0.0 };
                let child = |v: f64, id: usize, fixes: &[(usize, f64)]| {
                    let mut f = fixes.to_vec();
                    f.push((j, v));
                    Open {
                        bound: obj,
                        id,
                        fixes: f,
                        branch: Some((j, v, (v - xj).abs())),
                    }
                };
                next_id += 1;
                let far = child(1.0 - near, next_id, &node.fixes);
                if incumbent.is_none() {
                    dive.push(far);
                } else {
                    heap.push(far);
                }
                next_id += 1;
                current = Some(child(near, next_id, &node.fixes));
            }
        }
    }

    if saw_unbounded && incumbent.is_none() {
        return MilpSolution {
            status: MilpStatus::Unbounded,
            values: None,
            objective: f64::NEG_INFINITY,
            nodes,
        };
    }
    match incumbent {
        Some((_, vals)) => {
            let vals = polish(model, &binaries, vals);
            MilpSolution {
                status: MilpStatus::Optimal,
                objective: model.objective_value(&vals),
                values: Some(vals),
                nodes,
            }
        }
        None => MilpSolution {
            status: MilpStatus::Infeasible,
            values: None,
            objective: f64::NAN,
            nodes,
        },
    }
}

fn prune_gap(inc: f64) -> f64 {
    1e-9 * inc.abs().max(1.0)
}

/// Re-solves the LP with every binary fixed at its incumbent value from a
/// fresh basis, which removes drift accumulated over many warm starts.
fn polish(model: &MilpModel, binaries: &[usize], vals: Vec<f64>) -> Vec<f64> {
    let mut lp = LpEngine::new(model);
    for &j in binaries {
        lp.set_bounds(j, vals[j], vals[j]);
    }
    if lp.solve() == LpStatus::Optimal {
        let mut out = lp.values().to_vec();
        for &j in binaries {
            out[j] = vals[j];
        }
        if model.max_violation(&out) <= model.max_violation(&vals) + 1e-9 {
            return out;
        }
    }
    vals
}

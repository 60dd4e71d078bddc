use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Trace;

/// Which agent's position a half-space predicate constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRef {
    Leader,
    /// Estimated position of follower `i` (1-based, matching the stacked
    /// sample layout `[y0, ŷ1, ..., ŷQ]`).
    Follower(usize),
}

impl AgentRef {
    pub fn slot(self) -> usize {
        match self {
            AgentRef::Leader => 0,
            AgentRef::Follower(i) => i,
        }
    }
}

/// Single linear inequality `normal · y <= offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        HalfSpace { normal, offset }
    }

    pub fn slack(&self, y: &[f64]) -> f64 {
        dot(&self.normal, y) - self.offset
    }
}

/// Satisfaction set of an atomic proposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicate {
    /// Intersection of half-spaces over one agent's position.
    HalfSpaceConj {
        agent: AgentRef,
        halfspaces: Vec<HalfSpace>,
    },
    /// `‖y0 − ŷ_follower‖₂ <= eta`.
    Proximity { follower: usize, eta: f64 },
}

impl Predicate {
    /// Axis-aligned box `center ± half_extent` on `agent`'s position.
    pub fn aabb(agent: AgentRef, center: &[f64], half_extent: &[f64]) -> Self {
        let dim = center.len();
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            let mut up = vec![0.0; dim];
            up[k] = 1.0;
            halfspaces.push(HalfSpace::new(up, center[k] + half_extent[k]));
            let mut down = vec![0.0; dim];
            down[k] = -1.0;
            halfspaces.push(HalfSpace::new(down, -(center[k] - half_extent[k])));
        }
        Predicate::HalfSpaceConj { agent, halfspaces }
    }

    /// Evaluates the predicate on one stacked sample.
    pub fn holds(&self, sample: &[f64], dim: usize) -> bool {
        match self {
            Predicate::HalfSpaceConj { agent, halfspaces } => {
                let y = agent_slice(sample, dim, agent.slot());
                halfspaces.iter().all(|h| h.slack(y) <= 0.0)
            }
            Predicate::Proximity { follower, eta } => {
                let y0 = agent_slice(sample, dim, 0);
                let yi = agent_slice(sample, dim, *follower);
                let d2: f64 = y0.iter().zip(yi).map(|(a, b)| (a - b) * (a - b)).sum();
                d2.sqrt() <= *eta
            }
        }
    }

    /// Largest agent slot referenced.
    pub fn max_slot(&self) -> usize {
        match self {
            Predicate::HalfSpaceConj { agent, .. } => agent.slot(),
            Predicate::Proximity { follower, .. } => *follower,
        }
    }
}

pub(crate) fn agent_slice(sample: &[f64], dim: usize, slot: usize) -> &[f64] {
    &sample[slot * dim..(slot + 1) * dim]
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Binds atom names to predicates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AtomTable {
    atoms: BTreeMap<String, Predicate>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, predicate: Predicate) {
        self.atoms.insert(name.into(), predicate);
    }

    pub fn with(mut self, name: impl Into<String>, predicate: Predicate) -> Self {
        self.insert(name, predicate);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Predicate> {
        self.atoms.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.atoms.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Predicate)> {
        self.atoms.iter()
    }

    /// Truth of `name` at sample `j`. Panics on unknown atoms or `j` past the
    /// end of the trace; callers handle the out-of-trace cases themselves.
    pub fn holds(&self, name: &str, trace: &Trace, j: usize) -> bool {
        let pred = self
            .get(name)
            .unwrap_or_else(|| panic!("atom `{name}` is not bound"));
        pred.holds(trace.sample(j), trace.dim())
    }
}

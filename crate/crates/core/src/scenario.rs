//! Scenario files: JSON description of one synthesis run, with load-time
//! validation of every condition the dwell-time guarantees rely on.
//!
//! ```json
//! {
//!   "name": "scenario1",
//!   "leader": { "model": "quadrotor", "x0": [-5, -30, 5, 0, 0, 0, 0, 0],
//!               "u_min": [-100, -100, -100, -100], "u_max": [100, 100, 100, 100] },
//!   "followers": { "model": "planar",
//!                  "agents": [ { "x0": [-20, -20, 0], "k": 0.1, "d_bar": 0.04 } ] },
//!   "goal": [0, 0, 0],
//!   "r_g": 5, "r": 5, "v_t": 1, "eta": 4, "ts": 0.5, "horizon": 10,
//!   "regions": { "G1": { "center": [-20, 10, 2.5], "size": [2, 2, 5] } },
//!   "workspace": "D",
//!   "phi_p": "G (F[0,6] (inG1 | inG2)) & G inD",
//!   "seed": 1, "step_cap": 10000, "node_limit": 20000
//! }
//! ```
//!
//! A model is either a name (`"quadrotor"`, `"planar"`) or an object with
//! row-major `a`, `b`, `c` matrices. Every region `X` defines the leader atom
//! `inX`; follower `i` (1-based) defines the proximity atom `near<i>`.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dwell::{self, DwellError, DwellParams, FollowerDwell};
use crate::mtl::{self, AgentRef, AtomTable, MtlFormula, ParseError, Predicate};
use crate::plant::{self, DisturbanceMode, FollowerModel, LtiModel, PlantError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid value at `{path}`: {message}")]
    Invalid { path: String, message: String },
    #[error("load-time condition failed: {0}")]
    Dwell(#[from] DwellError),
    #[error("model error: {0}")]
    Plant(#[from] PlantError),
    #[error("practical constraint `phi_p`: {0}")]
    Formula(#[from] ParseError),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Named(String),
    Matrices {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        c: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeaderSpec {
    pub model: ModelSpec,
    pub x0: Vec<f64>,
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_gravity() -> f64 {
    9.81
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub x0: Vec<f64>,
    pub k: f64,
    pub d_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FollowersSpec {
    pub model: ModelSpec,
    pub agents: Vec<AgentSpec>,
}

/// Axis-aligned box given by its center and full edge lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub center: Vec<f64>,
    pub size: Vec<f64>,
}

impl Region {
    pub fn lower(&self) -> Vec<f64> {
        self.center.iter().zip(&self.size).map(|(c, s)| c - s / 2.0).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.center.iter().zip(&self.size).map(|(c, s)| c + s / 2.0).collect()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        let (lo, hi) = (self.lower(), self.upper());
        y.iter().enumerate().all(|(k, v)| *v >= lo[k] && *v <= hi[k])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub leader: LeaderSpec,
    pub followers: FollowersSpec,
    pub goal: Vec<f64>,
    pub r_g: f64,
    pub r: f64,
    pub v_t: f64,
    pub eta: f64,
    pub ts: f64,
    pub horizon: usize,
    pub regions: BTreeMap<String, Region>,
    /// Region that bounds the leader's position inside the MILP.
    pub workspace: String,
    pub phi_p: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_step_cap")]
    pub step_cap: usize,
    #[serde(default = "default_node_limit")]
    pub node_limit: usize,
    #[serde(default)]
    pub disturbance: DisturbanceMode,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
}

fn default_step_cap() -> usize {
    10_000
}

fn default_node_limit() -> usize {
    20_000
}

fn default_substeps() -> usize {
    50
}

/// Quantities computed from a validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub leader: LtiModel,
    pub leader_ad: DMatrix<f64>,
    pub leader_bd: DMatrix<f64>,
    pub follower: FollowerModel,
    pub dwell: DwellParams,
    /// Dwell data of every follower at `t = 0`.
    pub initial: Vec<FollowerDwell>,
    pub atoms: AtomTable,
    pub phi_p: MtlFormula,
    pub goal: DVector<f64>,
    /// Position dimension `z`.
    pub dim: usize,
}

fn matrix(rows: &[Vec<f64>], path: &str) -> Result<DMatrix<f64>, ScenarioError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(invalid(path, "matrix must be non-empty and rectangular"));
    }
    Ok(DMatrix::from_row_iterator(r, c, rows.iter().flatten().copied()))
}

fn model(spec: &ModelSpec, path: &str, gravity: f64) -> Result<LtiModel, ScenarioError> {
    match spec {
        ModelSpec::Named(n) if n == "quadrotor" => Ok(plant::quadrotor_leader(gravity)),
        ModelSpec::Named(n) if n == "planar" => Ok(plant::planar_follower()),
        ModelSpec::Named(n) => Err(invalid(path, format!("unknown model `{n}`"))),
        ModelSpec::Matrices { a, b, c } => Ok(LtiModel::new(
            matrix(a, &format!("{path}.a"))?,
            matrix(b, &format!("{path}.b"))?,
            matrix(c, &format!("{path}.c"))?,
        )?),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ScenarioError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let p = path.as_ref();
        let text = std::fs::read_to_string(p).map_err(|source| ScenarioError::Io {
            path: p.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    /// Bundled case-study scenarios.
    pub fn bundled(name: &str) -> Option<Self> {
        let text = match name {
            "scenario1" => include_str!("../scenarios/scenario1.json"),
            "scenario2" => include_str!("../scenarios/scenario2.json"),
            _ => return None,
        };
        Some(Self::from_json(text).expect("bundled scenario parses"))
    }

    pub fn atom_table(&self, dim: usize) -> AtomTable {
        let mut atoms = AtomTable::new();
        for (name, region) in &self.regions {
            let half: Vec<f64> = region.size.iter().map(|s| s / 2.0).collect();
            atoms.insert(
                format!("in{name}"),
                Predicate::aabb(AgentRef::Leader, &region.center, &half),
            );
        }
        for i in 1..=self.followers.agents.len() {
            atoms.insert(
                near_atom(i),
                Predicate::Proximity {
                    follower: i,
                    eta: self.eta,
                },
            );
        }
        debug_assert!(self.regions.values().all(|r| r.center.len() == dim));
        atoms
    }

    /// Checks every load-time condition and computes derived quantities.
    pub fn prepare(&self) -> Result<Prepared, ScenarioError> {
        if self.followers.agents.is_empty() {
            return Err(ScenarioError::Schema {
                path: "followers.agents".into(),
                message: "at least one follower is required".into(),
            });
        }
        let leader = model(&self.leader.model, "leader.model", self.leader.gravity)?;
        let fl = model(&self.followers.model, "followers.model", self.leader.gravity)?;
        let dim = leader.outputs();
        if fl.outputs() != dim {
            return Err(invalid(
                "followers.model.c",
                format!("followers output {} coordinates, the leader {dim}", fl.outputs()),
            ));
        }
        if self.leader.x0.len() != leader.states() {
            return Err(invalid(
                "leader.x0",
                format!("expected {} entries", leader.states()),
            ));
        }
        for (name, v) in [("leader.u_min", &self.leader.u_min), ("leader.u_max", &self.leader.u_max)] {
            if v.len() != leader.inputs() {
                return Err(invalid(name, format!("expected {} entries", leader.inputs())));
            }
        }
        if self
            .leader
            .u_min
            .iter()
            .zip(&self.leader.u_max)
            .any(|(lo, hi)| !(lo <= hi))
        {
            return Err(invalid("leader.u_min", "lower input bound above upper bound"));
        }
        if self.goal.len() != fl.states() {
            return Err(invalid("goal", format!("expected {} entries", fl.states())));
        }
        if self.horizon == 0 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        if self.substeps == 0 {
            return Err(invalid("substeps", "must be at least 1"));
        }
        for (name, r) in &self.regions {
            let path = format!("regions.{name}");
            if r.center.len() != dim || r.size.len() != dim {
                return Err(invalid(path, format!("center and size need {dim} entries")));
            }
            if r.size.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                return Err(invalid(path, "region box is empty"));
            }
        }
        if !self.regions.contains_key(&self.workspace) {
            return Err(invalid(
                "workspace",
                format!("no region named `{}`", self.workspace),
            ));
        }
        let follower = FollowerModel::new(fl)?;
        let goal = DVector::from_row_slice(&self.goal);
        let dwell = DwellParams {
            lambda_a: follower.lambda_a,
            lambda_c: follower.lambda_c,
            v_t: self.v_t,
            ts: self.ts,
            r_g: self.r_g,
            r: self.r,
            eta: self.eta,
        };
        dwell.validate()?;
        let mut initial = Vec::new();
        for (i, ag) in self.followers.agents.iter().enumerate() {
            let path = format!("followers.agents[{i}].x0");
            if ag.x0.len() != follower.lti.states() {
                return Err(invalid(path, format!("expected {} entries", follower.lti.states())));
            }
            let x = DVector::from_row_slice(&ag.x0);
            follower.check_goal(&x, &goal)?;
            let e2 = (&goal - &x).norm();
            initial.push(dwell::follower_dwell(&dwell, i + 1, ag.k, ag.d_bar, e2)?);
        }
        let atoms = self.atom_table(dim);
        let phi_p = mtl::parse(&self.phi_p, &atoms)?;
        let (leader_ad, leader_bd) = leader.discretize(self.ts);
        Ok(Prepared {
            leader,
            leader_ad,
            leader_bd,
            follower,
            dwell,
            initial,
            atoms,
            phi_p,
            goal,
            dim,
        })
    }
}

pub fn near_atom(i: usize) -> String {
    format!("near{i}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenario_loads() {
        let s = Scenario::bundled("scenario1").unwrap();
        let p = s.prepare().unwrap();
        assert_eq!(s.followers.agents.len(), 3);
        assert_eq!(s.followers.agents[0].x0, vec![-20.0, -20.0, 0.0]);
        assert_eq!(s.followers.agents[1].x0, vec![20.0, 30.0, 0.0]);
        assert_eq!(s.followers.agents[2].x0, vec![40.0, -40.0, 0.0]);
        assert_eq!(&s.leader.x0[..3], &[-5.0, -30.0, 5.0]);
        let nm: Vec<_> = p.initial.iter().map(|d| (d.n, d.m)).collect();
        assert_eq!(nm, vec![(6, 1), (7, 1), (7, 1)]);
        assert!(Scenario::bundled("scenario2").unwrap().prepare().is_ok());
    }

    #[test]
    fn threshold_violation_is_reported() {
        let mut s = Scenario::bundled("scenario1").unwrap();
        s.v_t = 10.0;
        assert!(matches!(
            s.prepare(),
            Err(ScenarioError::Dwell(DwellError::ThresholdTooLarge { .. }))
        ));
    }

    #[test]
    fn empty_followers_is_a_schema_error() {
        let mut s = Scenario::bundled("scenario1").unwrap();
        s.followers.agents.clear();
        assert!(matches!(s.prepare(), Err(ScenarioError::Schema { .. })));
    }

    #[test]
    fn schema_error_names_the_field() {
        let mut v: serde_json::Value =
            serde_json::from_str(&Scenario::bundled("scenario1").unwrap().to_json()).unwrap();
        v["followers"]["agents"][1]["k"] = serde_json::json!("fast");
        match Scenario::from_json(&v.to_string()) {
            Err(ScenarioError::Schema { path, .. }) => assert_eq!(path, "followers.agents[1].k"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let s = Scenario::bundled("scenario2").unwrap();
        assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    }
}

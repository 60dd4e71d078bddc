//! Receding-horizon synthesis of the leader's inputs.
//!
//! At `ℓ = 0` and at every step where some follower gets serviced, the
//! requirement is rewritten against the executed prefix, encoded over the
//! next `N` samples and solved; between re-solves the stored plan is played
//! open loop. Services reset the follower's observer and refresh its
//! minimum-dwell bound, which takes effect from the service index on.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dwell;
use std::collections::BTreeSet;

use crate::milp::{
    add_l1_objective, encode_dynamics, encode_formula, solve, EncodeError, EncodeOptions,
    FormulaContext, MilpModel, MilpStatus,
};
use crate::mtl::{self, AtomTable, BoolExpr, Interval, MtlFormula, Predicate, StampedAtom, Trace};
use crate::plant::{predict_estimate, sample_disturbance, DisturbanceMode, Follower};
use crate::scenario::{near_atom, Prepared, Scenario, ScenarioError};

/// Positions and states of all agents at one sample instant.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub index: usize,
    pub leader: DVector<f64>,
    pub followers: Vec<Follower>,
}

impl World {
    pub fn new(scn: &Scenario) -> Self {
        World {
            index: 0,
            leader: DVector::from_row_slice(&scn.leader.x0),
            followers: scn
                .followers
                .agents
                .iter()
                .map(|a| Follower::new(DVector::from_row_slice(&a.x0), a.k, a.d_bar))
                .collect(),
        }
    }

    pub fn leader_position(&self, p: &Prepared) -> DVector<f64> {
        &p.leader.c * &self.leader
    }

    pub fn estimate_position(&self, p: &Prepared, i: usize) -> DVector<f64> {
        &p.follower.lti.c * &self.followers[i].xhat
    }

    pub fn true_position(&self, p: &Prepared, i: usize) -> DVector<f64> {
        &p.follower.lti.c * &self.followers[i].x
    }

    /// Stacked sample `[y0, ŷ1, ..., ŷQ]`.
    pub fn sample(&self, p: &Prepared) -> Vec<f64> {
        let mut s: Vec<f64> = self.leader_position(p).iter().copied().collect();
        for i in 0..self.followers.len() {
            s.extend(self.estimate_position(p, i).iter());
        }
        s
    }

    /// Every follower's true position is within `R_g` of the goal.
    pub fn converged(&self, scn: &Scenario, p: &Prepared) -> bool {
        let goal = &p.follower.lti.c * &p.goal;
        (0..self.followers.len()).all(|i| (&goal - self.true_position(p, i)).norm() <= scn.r_g)
    }

    /// Applies `u` to the leader and advances everything by one sample
    /// period. Returns the largest `‖e1‖` of each follower over the substeps.
    pub fn step(&mut self, scn: &Scenario, p: &Prepared, u: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let u = DVector::from_row_slice(u);
        self.leader = &p.leader_ad * &self.leader + &p.leader_bd * u;
        let dt = scn.ts / scn.substeps as f64;
        let mut peak = vec![0.0f64; self.followers.len()];
        for _ in 0..scn.substeps {
            for (i, f) in self.followers.iter_mut().enumerate() {
                let d = match scn.disturbance {
                    DisturbanceMode::UniformBall => sample_disturbance(rng, f.dbar, &p.follower.active),
                    DisturbanceMode::WorstCase => {
                        let mut d = DVector::zeros(f.x.len());
                        if let Some(k) = p.follower.active.iter().position(|a| *a) {
                            d[k] = f.dbar;
                        }
                        d
                    }
                };
                f.advance(&p.follower, &p.goal, dt, 1, || d.clone());
                peak[i] = peak[i].max((&f.xhat - &f.x).norm());
            }
        }
        self.index += 1;
        peak
    }
}

/// Followers (0-based) whose estimate is within `η` of the leader.
pub fn detect_service(world: &World, p: &Prepared, eta: f64) -> Vec<usize> {
    let y0 = world.leader_position(p);
    (0..world.followers.len())
        .filter(|&i| (&y0 - world.estimate_position(p, i)).norm() <= eta)
        .collect()
}

fn near(i: usize) -> MtlFormula {
    MtlFormula::atom(near_atom(i))
}

/// `□◇[0, n_i − 1] near_i`: consecutive services at most `n_i` samples
/// apart.
fn deadline(i: usize, n: usize) -> MtlFormula {
    MtlFormula::always(
        MtlFormula::eventually(near(i), Interval::bounded(0, n.saturating_sub(1))),
        Interval::UNBOUNDED,
    )
}

/// `near_i ⇒ □[1, m] ¬near_i`.
fn quiet(i: usize, m: usize) -> MtlFormula {
    MtlFormula::implies(
        near(i),
        MtlFormula::always(MtlFormula::not(near(i)), Interval::bounded(1, m)),
    )
}

/// `φ1 ∧ φ2 ∧ φp` for per-follower bounds `(n_i, m_i)`; followers with
/// `m_i = 0` contribute no φ2 conjunct.
pub fn build_phi(bounds: &[(usize, usize)], phi_p: &MtlFormula) -> MtlFormula {
    let segments: Vec<Vec<Segment>> = bounds
        .iter()
        .map(|&(_, m)| vec![Segment { start: 0, m }])
        .collect();
    let n: Vec<usize> = bounds.iter().map(|b| b.0).collect();
    phi_segmented(&n, &segments, phi_p)
}

/// Minimum-dwell bound `m` in force from sample `start` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub m: usize,
}

/// Like [`build_phi`], but each follower's φ2 conjunct is split into
/// segments so that a refreshed `m_i` only governs services from its
/// segment start on.
pub fn phi_segmented(n: &[usize], segments: &[Vec<Segment>], phi_p: &MtlFormula) -> MtlFormula {
    let mut parts = Vec::new();
    for (k, &ni) in n.iter().enumerate() {
        parts.push(deadline(k + 1, ni));
    }
    for (k, segs) in segments.iter().enumerate() {
        for (s, seg) in segs.iter().enumerate() {
            if seg.m == 0 {
                continue;
            }
            let interval = match segs.get(s + 1) {
                Some(next) if next.start > seg.start => Interval::bounded(seg.start, next.start - 1),
                Some(_) => continue,
                None if seg.start == 0 => Interval::UNBOUNDED,
                None => Interval::from(seg.start),
            };
            parts.push(MtlFormula::always(quiet(k + 1, seg.m), interval));
        }
    }
    if *phi_p != MtlFormula::True {
        parts.push(phi_p.clone());
    }
    MtlFormula::conjunction(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    Infeasible,
    /// The solver hit its node limit without a feasible plan.
    SolverLimit,
    Timeout,
    /// A serviced follower was farther than `R` from the leader.
    AssumptionViolated,
    /// The MILP could not be built (for example an oversized big-M).
    EncodingFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowerSample {
    pub x: Vec<f64>,
    pub xhat: Vec<f64>,
    pub e1: f64,
    pub e2: f64,
    /// Largest `‖e1‖` since the previous sample.
    pub e1_peak: f64,
}

/// State at sample `index`, before any observer reset at that instant, and
/// the input applied over the following period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub t: f64,
    pub leader: Vec<f64>,
    pub leader_state: Vec<f64>,
    pub u: Option<Vec<f64>>,
    pub followers: Vec<FollowerSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceEvent {
    /// 1-based follower number.
    pub follower: usize,
    pub index: usize,
    pub t: f64,
    pub distance_estimate: f64,
    pub distance_true: f64,
    pub e1_pre: f64,
    pub e2_pre: f64,
    pub e2_post: f64,
    pub min_dwell: f64,
    /// Bound from the minimum dwell time.
    pub m_raw: usize,
    /// Bound placed in the requirement; lowered to `n − 1` when `m_raw`
    /// would leave no admissible service gap.
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveReason {
    Initial,
    Service,
    PlanExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub index: usize,
    pub reason: SolveReason,
    pub status: String,
    pub nodes: usize,
    pub objective: f64,
    pub binaries: usize,
    pub constraints: usize,
    /// MILPs solved before the plan respected every assumed literal.
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisLog {
    pub scenario: String,
    pub seed: u64,
    pub status: RunStatus,
    pub message: Option<String>,
    pub n: Vec<usize>,
    pub segments: Vec<Vec<Segment>>,
    pub steps: Vec<StepRecord>,
    pub events: Vec<ServiceEvent>,
    pub solves: Vec<SolveRecord>,
    /// The requirement in force at the end of the run.
    pub formula: String,
    pub verdict_weak: bool,
    pub verdict_strong: bool,
}

impl SynthesisLog {
    /// Number of executed control steps.
    pub fn num_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.u.is_some()).count()
    }

    /// Executed stacked trace `[y0, ŷ1, ..., ŷQ]` with pre-reset estimates.
    pub fn trace(&self, dim: usize, ts: f64) -> Trace {
        let samples = self
            .steps
            .iter()
            .map(|s| {
                let mut v = s.leader.clone();
                for f in &s.followers {
                    v.extend(&f.xhat[..dim]);
                }
                v
            })
            .collect();
        Trace::new(dim, ts, samples).expect("log samples are consistent")
    }

    /// `Σ |u|₁` over steps with index in `range`.
    pub fn effort(&self, range: std::ops::Range<usize>) -> f64 {
        self.steps
            .iter()
            .filter(|s| range.contains(&s.index))
            .filter_map(|s| s.u.as_ref())
            .map(|u| u.iter().map(|v| v.abs()).sum::<f64>())
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("log serialises")
    }
}

struct Plan {
    origin: usize,
    u: Vec<Vec<f64>>,
}

enum PlanError {
    Status(RunStatus, String),
}

struct Synth<'a> {
    scn: &'a Scenario,
    p: &'a Prepared,
    n: Vec<usize>,
    segments: Vec<Vec<Segment>>,
}

impl Synth<'_> {
    fn phi(&self) -> MtlFormula {
        phi_segmented(&self.n, &self.segments, &self.p.phi_p)
    }

    fn plan(&self, world: &World, trace: &Trace) -> Result<(Plan, SolveRecord), PlanError> {
        let (scn, p) = (self.scn, self.p);
        let l = world.index;
        let big_n = scn.horizon;
        let encoding = |e: EncodeError| PlanError::Status(RunStatus::EncodingFailed, e.to_string());
        let expr = mtl::rewrite_at(&self.phi(), 0, l, trace, &p.atoms, Some(l + big_n - 1))
            .map_err(|e| PlanError::Status(RunStatus::EncodingFailed, e.to_string()))?
            .to_nnf();
        if expr == BoolExpr::Const(false) {
            return Err(PlanError::Status(
                RunStatus::Infeasible,
                format!("the executed prefix already violates the requirement at step {l}"),
            ));
        }
        let dim = p.dim;
        let others: Vec<Vec<f64>> = (0..big_n)
            .map(|j| {
                let mut s = vec![0.0; dim];
                for f in &world.followers {
                    let xh = predict_estimate(&f.xhat, &p.goal, f.k, j as f64 * scn.ts);
                    s.extend((&p.follower.lti.c * xh).iter());
                }
                s
            })
            .collect();
        let ws = &scn.regions[&scn.workspace];
        let (lo, hi) = (ws.lower(), ws.upper());
        let opts = EncodeOptions::default();

        // Negated proximity literals start out assumed; any that the plan
        // breaks are encoded for real and the model is solved again.
        let mut strict: BTreeSet<StampedAtom> = BTreeSet::new();
        let mut record = SolveRecord {
            index: l,
            reason: SolveReason::Initial,
            status: String::new(),
            nodes: 0,
            objective: f64::NAN,
            binaries: 0,
            constraints: 0,
            rounds: 0,
        };
        loop {
            let relaxed = assume_away(&expr, &p.atoms, &strict);
            let mut model = MilpModel::new();
            let vars = encode_dynamics(
                &mut model,
                &p.leader_ad,
                &p.leader_bd,
                &p.leader.c,
                world.leader.as_slice(),
                big_n,
                (&scn.leader.u_min, &scn.leader.u_max),
                (&lo, &hi),
            )
            .map_err(encoding)?;
            add_l1_objective(&mut model, &vars.u, &vec![1.0; p.leader.inputs()]);
            let ctx = FormulaContext {
                atoms: &p.atoms,
                dim,
                origin: l,
                leader: &vars.y,
                others: &others,
            };
            encode_formula(&mut model, &relaxed, &ctx, opts).map_err(encoding)?;
            let sol = solve(&model, scn.node_limit);
            record.rounds += 1;
            record.nodes += sol.nodes;
            record.status = format!("{:?}", sol.status);
            record.objective = sol.objective;
            record.binaries = model.num_binaries();
            record.constraints = model.constraints().len();
            let values = match (&sol.status, &sol.values) {
                (MilpStatus::Optimal | MilpStatus::IterLimit, Some(v)) => v,
                (MilpStatus::IterLimit, None) => {
                    return Err(PlanError::Status(
                        RunStatus::SolverLimit,
                        format!("no feasible plan within {} nodes at step {l}", scn.node_limit),
                    ))
                }
                _ => {
                    return Err(PlanError::Status(
                        RunStatus::Infeasible,
                        format!("MILP {:?} at step {l}", sol.status),
                    ))
                }
            };
            let plan_y: Vec<Vec<f64>> = vars
                .y
                .iter()
                .map(|yj| yj.iter().map(|v| values[v.0]).collect())
                .collect();
            let near = |a: &StampedAtom, slack: f64| -> bool {
                let Some(Predicate::Proximity { follower, eta }) = p.atoms.get(&a.name) else {
                    return false;
                };
                let j = a.index - l;
                let yi = &others[j][follower * dim..(follower + 1) * dim];
                let d2: f64 = plan_y[j].iter().zip(yi).map(|(v, c)| (v - c).powi(2)).sum();
                d2.sqrt() <= eta + slack
            };
            let accepted = plan_satisfies(&expr, &mut |a, positive| {
                let j = a.index - l;
                match p.atoms.get(&a.name) {
                    Some(Predicate::Proximity { .. }) if positive => near(a, 0.0),
                    Some(Predicate::Proximity { .. }) => !near(a, opts.proximity_margin),
                    Some(Predicate::HalfSpaceConj { agent, halfspaces }) => {
                        let y = match agent.slot() {
                            0 => &plan_y[j][..],
                            s => &others[j][s * dim..(s + 1) * dim],
                        };
                        let inside = halfspaces.iter().all(|h| h.slack(y) <= LITERAL_TOL);
                        let outside = halfspaces.iter().any(|h| h.slack(y) > -LITERAL_TOL);
                        if positive {
                            inside
                        } else {
                            outside
                        }
                    }
                    None => false,
                }
            });
            let broken: Vec<StampedAtom> = if accepted {
                Vec::new()
            } else {
                negated_proximity(&expr, &p.atoms)
                    .into_iter()
                    .filter(|a| !strict.contains(a) && near(a, opts.proximity_margin))
                    .collect()
            };
            if broken.is_empty() {
                let u = vars
                    .u
                    .iter()
                    .map(|uj| uj.iter().map(|v| values[v.0]).collect())
                    .collect();
                return Ok((Plan { origin: l, u }, record));
            }
            strict.extend(broken);
        }
    }
}

/// Slack allowed when reading region literals off a solver plan.
const LITERAL_TOL: f64 = 1e-6;

/// Evaluates an NNF expression with `value(atom, positive)` deciding each
/// literal.
fn plan_satisfies(e: &BoolExpr, value: &mut impl FnMut(&StampedAtom, bool) -> bool) -> bool {
    match e {
        BoolExpr::Const(b) => *b,
        BoolExpr::Atom(a) => value(a, true),
        BoolExpr::Not(inner) => match inner.as_ref() {
            BoolExpr::Atom(a) => value(a, false),
            other => !plan_satisfies(other, value),
        },
        BoolExpr::And(ps) => ps.iter().all(|q| plan_satisfies(q, value)),
        BoolExpr::Or(ps) => ps.iter().any(|q| plan_satisfies(q, value)),
    }
}

/// Proximity atoms that occur negated in an NNF expression.
fn negated_proximity(e: &BoolExpr, atoms: &AtomTable) -> BTreeSet<StampedAtom> {
    fn walk(e: &BoolExpr, atoms: &AtomTable, out: &mut BTreeSet<StampedAtom>) {
        match e {
            BoolExpr::Not(inner) => {
                if let BoolExpr::Atom(a) = inner.as_ref() {
                    if matches!(atoms.get(&a.name), Some(Predicate::Proximity { .. })) {
                        out.insert(a.clone());
                    }
                }
            }
            BoolExpr::And(ps) | BoolExpr::Or(ps) => ps.iter().for_each(|p| walk(p, atoms, out)),
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    walk(e, atoms, &mut out);
    out
}

/// Replaces negated proximity literals outside `strict` by `true`.
fn assume_away(e: &BoolExpr, atoms: &AtomTable, strict: &BTreeSet<StampedAtom>) -> BoolExpr {
    match e {
        BoolExpr::Not(inner) => match inner.as_ref() {
            BoolExpr::Atom(a)
                if !strict.contains(a)
                    && matches!(atoms.get(&a.name), Some(Predicate::Proximity { .. })) =>
            {
                BoolExpr::Const(true)
            }
            _ => e.clone(),
        },
        BoolExpr::And(ps) => BoolExpr::and(ps.iter().map(|p| assume_away(p, atoms, strict))),
        BoolExpr::Or(ps) => BoolExpr::or(ps.iter().map(|p| assume_away(p, atoms, strict))),
        _ => e.clone(),
    }
}

fn record(world: &World, p: &Prepared, ts: f64, peaks: &[f64]) -> StepRecord {
    StepRecord {
        index: world.index,
        t: world.index as f64 * ts,
        leader: world.leader_position(p).iter().copied().collect(),
        leader_state: world.leader.iter().copied().collect(),
        u: None,
        followers: world
            .followers
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let e = f.errors(&p.goal);
                FollowerSample {
                    x: f.x.iter().copied().collect(),
                    xhat: f.xhat.iter().copied().collect(),
                    e1: e.e1.norm(),
                    e2: e.e2.norm(),
                    e1_peak: peaks[i].max(e.e1.norm()),
                }
            })
            .collect(),
    }
}

/// Runs the synthesis loop on a scenario until every follower is inside the
/// feedback region, the MILP fails, or the step cap is hit.
pub fn run(scn: &Scenario) -> Result<SynthesisLog, ScenarioError> {
    let p = scn.prepare()?;
    Ok(run_prepared(scn, &p))
}

pub fn run_prepared(scn: &Scenario, p: &Prepared) -> SynthesisLog {
    run_observed(scn, p, |_| {})
}

/// As [`run_prepared`], calling `on_solve` after every MILP solve.
pub fn run_observed(scn: &Scenario, p: &Prepared, mut on_solve: impl FnMut(&SolveRecord)) -> SynthesisLog {
    let q = scn.followers.agents.len();
    let mut synth = Synth {
        scn,
        p,
        n: p.initial.iter().map(|d| d.n).collect(),
        segments: p
            .initial
            .iter()
            .map(|d| {
                vec![Segment {
                    start: 0,
                    m: d.m.min(d.n.saturating_sub(1)),
                }]
            })
            .collect(),
    };
    let mut world = World::new(scn);
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut events = Vec::new();
    let mut solves = Vec::new();
    let mut samples: Vec<Vec<f64>> = Vec::new();
    let mut plan: Option<Plan> = None;
    let mut peaks = vec![0.0; q];
    let mut message = None;

    let status = loop {
        let l = world.index;
        steps.push(record(&world, p, scn.ts, &peaks));
        samples.push(world.sample(p));
        if world.converged(scn, p) {
            break RunStatus::Converged;
        }
        if l >= scn.step_cap {
            message = Some(format!("step cap {} reached", scn.step_cap));
            break RunStatus::Timeout;
        }

        let serviced = detect_service(&world, p, scn.eta);
        let y0 = world.leader_position(p);
        let mut violated = None;
        for &i in &serviced {
            let dist_true = (&y0 - world.true_position(p, i)).norm();
            let dist_est = (&y0 - world.estimate_position(p, i)).norm();
            if dist_true > scn.r {
                violated = Some(format!(
                    "follower {} serviced at step {l} from {dist_true:.4} m, beyond R = {}",
                    i + 1,
                    scn.r
                ));
                break;
            }
            let before = world.followers[i].errors(&p.goal);
            world.followers[i].service_reset(l as f64 * scn.ts);
            let f = &world.followers[i];
            let e2_post = f.errors(&p.goal).e2.norm();
            let min_d = dwell::min_dwell(f.k, scn.v_t, e2_post);
            let (_, m_raw) = dwell::step_bounds(0.0, min_d, scn.ts);
            let n = synth.n[i];
            let m = m_raw.min(n.saturating_sub(1));
            let segs = &mut synth.segments[i];
            if segs.last().is_some_and(|s| s.start == l) {
                segs.last_mut().unwrap().m = m;
            } else {
                segs.push(Segment { start: l, m });
            }
            events.push(ServiceEvent {
                follower: i + 1,
                index: l,
                t: l as f64 * scn.ts,
                distance_estimate: dist_est,
                distance_true: dist_true,
                e1_pre: before.e1.norm(),
                e2_pre: before.e2.norm(),
                e2_post,
                min_dwell: min_d,
                m_raw,
                m,
                n,
            });
        }
        if let Some(msg) = violated {
            message = Some(msg);
            break RunStatus::AssumptionViolated;
        }

        let reason = if l == 0 {
            Some(SolveReason::Initial)
        } else if !serviced.is_empty() {
            Some(SolveReason::Service)
        } else if plan.as_ref().is_none_or(|pl| l - pl.origin >= pl.u.len()) {
            Some(SolveReason::PlanExhausted)
        } else {
            None
        };
        if let Some(reason) = reason {
            let trace = Trace::new(p.dim, scn.ts, samples.clone()).expect("consistent samples");
            match synth.plan(&world, &trace) {
                Ok((pl, mut rec)) => {
                    rec.reason = reason;
                    on_solve(&rec);
                    solves.push(rec);
                    plan = Some(pl);
                }
                Err(PlanError::Status(st, msg)) => {
                    message = Some(msg);
                    break st;
                }
            }
        }
        let pl = plan.as_ref().expect("a plan exists after solving");
        let u = pl.u[l - pl.origin].clone();
        steps.last_mut().unwrap().u = Some(u.clone());
        peaks = world.step(scn, p, &u, &mut rng);
    };

    let phi = synth.phi();
    let trace = Trace::new(p.dim, scn.ts, samples).expect("consistent samples");
    SynthesisLog {
        scenario: scn.name.clone(),
        seed: scn.seed,
        status,
        message,
        n: synth.n.clone(),
        segments: synth.segments.clone(),
        verdict_weak: mtl::eval_weak(&trace, 0, &phi, &p.atoms),
        verdict_strong: mtl::eval_strong(&trace, 0, &phi, &p.atoms),
        formula: phi.to_string(),
        steps,
        events,
        solves,
    }
}

/// Re-simulates a log from its recorded inputs and service instants and
/// returns the regenerated step records.
pub fn replay(scn: &Scenario, p: &Prepared, log: &SynthesisLog) -> Vec<StepRecord> {
    let mut world = World::new(scn);
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let mut out = Vec::with_capacity(log.steps.len());
    let mut peaks = vec![0.0; world.followers.len()];
    for s in &log.steps {
        let mut rec = record(&world, p, scn.ts, &peaks);
        for ev in log.events.iter().filter(|e| e.index == s.index) {
            world.followers[ev.follower - 1].service_reset(s.t);
        }
        rec.u = s.u.clone();
        out.push(rec);
        if let Some(u) = &s.u {
            peaks = world.step(scn, p, u, &mut rng);
        }
    }
    out
}

#![allow(dead_code)]

pub mod milp;

use leadsynth::mtl::{AgentRef, AtomTable, HalfSpace, Interval, MtlFormula, Predicate, Trace};
use rand::Rng;

/// Two-dimensional positions, leader plus one follower.
pub const DIM: usize = 2;

/// Atoms: `p` and `q` constrain the leader, `r` the follower estimate.
pub fn table() -> AtomTable {
    AtomTable::new()
        .with(
            "p",
            Predicate::HalfSpaceConj {
                agent: AgentRef::Leader,
                halfspaces: vec![HalfSpace::new(vec![1.0, 0.5], 0.3)],
            },
        )
        .with(
            "q",
            Predicate::aabb(AgentRef::Leader, &[0.5, -0.5], &[1.0, 1.5]),
        )
        .with(
            "r",
            Predicate::HalfSpaceConj {
                agent: AgentRef::Follower(1),
                halfspaces: vec![HalfSpace::new(vec![0.0, 1.0], 0.0)],
            },
        )
}

pub fn random_interval(rng: &mut impl Rng, span: usize) -> Interval {
    let a = rng.random_range(0..=span);
    let b = rng.random_range(a..=span);
    Interval::bounded(a, b)
}

/// Random formula of depth at most `depth` with bounded intervals whose
/// endpoints do not exceed `span`.
pub fn random_formula(rng: &mut impl Rng, depth: usize, span: usize) -> MtlFormula {
    let names = ["p", "q", "r"];
    if depth == 0 || rng.random_bool(0.2) {
        return match rng.random_range(0..10) {
            0 => MtlFormula::True,
            1 => MtlFormula::False,
            k => MtlFormula::atom(names[k % 3]),
        };
    }
    let d = depth - 1;
    match rng.random_range(0..6) {
        0 => MtlFormula::not(random_formula(rng, d, span)),
        1 => MtlFormula::and(random_formula(rng, d, span), random_formula(rng, d, span)),
        2 => MtlFormula::or(random_formula(rng, d, span), random_formula(rng, d, span)),
        3 => MtlFormula::until(
            random_formula(rng, d, span),
            random_formula(rng, d, span),
            random_interval(rng, span),
        ),
        4 => MtlFormula::eventually(random_formula(rng, d, span), random_interval(rng, span)),
        _ => MtlFormula::always(random_formula(rng, d, span), random_interval(rng, span)),
    }
}

/// Random trace with `len` stacked samples `[y0, ŷ1]`.
pub fn random_trace(rng: &mut impl Rng, len: usize) -> Trace {
    let samples = (0..len)
        .map(|_| (0..2 * DIM).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    Trace::new(DIM, 0.5, samples).unwrap()
}

/// Encodes `[f]^0_0` truncated at the trace end, clamps the leader outputs
/// to the trace and reports MILP feasibility.
pub fn milp_feasible(f: &MtlFormula, trace: &Trace, atoms: &AtomTable) -> bool {
    use leadsynth::milp::{encode_formula, solve, EncodeOptions, FormulaContext, MilpModel, MilpStatus};
    use leadsynth::mtl::rewrite_at;

    let last = trace.last_index();
    let expr = rewrite_at(f, 0, 0, trace, atoms, Some(last)).unwrap();
    let mut model = MilpModel::new();
    let leader: Vec<Vec<_>> = (0..=last)
        .map(|j| {
            (0..DIM)
                .map(|k| {
                    let y = trace.sample(j)[k];
                    model.add_var(format!("y{j}_{k}"), y, y)
                })
                .collect()
        })
        .collect();
    let others: Vec<Vec<f64>> = trace.samples().to_vec();
    let ctx = FormulaContext {
        atoms,
        dim: DIM,
        origin: 0,
        leader: &leader,
        others: &others,
    };
    encode_formula(&mut model, &expr, &ctx, EncodeOptions::default()).unwrap();
    let sol = solve(&model, 100_000);
    assert_ne!(sol.status, MilpStatus::IterLimit);
    sol.status == MilpStatus::Optimal
}

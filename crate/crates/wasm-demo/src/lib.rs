//! Browser bindings for three small operations: the dwell-time calculator,
//! the finite-trace MTL monitor over a drawn 2-D path, and a short-horizon
//! synthesis of a planar double-integrator path.
//!
//! Every export takes and returns JSON strings so the page needs no glue
//! beyond the generated bindings. The plain functions are usable natively,
//! which is how the tests exercise them.

use std::collections::BTreeMap;

use leadsynth::dwell;
use leadsynth::milp::{add_l1_objective, encode_dynamics, encode_formula, solve, EncodeOptions, FormulaContext, MilpModel, MilpStatus};
use leadsynth::mtl::{self, eval_strong, eval_weak, AgentRef, AtomTable, Predicate, Trace};
use leadsynth::plant::LtiModel;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Side length of the square arena every region and path lives in.
pub const ARENA: f64 = 10.0;

#[derive(Debug, Serialize)]
pub struct DwellReport {
    pub max_dwell: f64,
    pub min_dwell: f64,
    pub n: usize,
    pub m: usize,
    /// `‖e1‖` bound after exactly `max_dwell` seconds without service.
    pub envelope_at_max: f64,
}

pub fn dwell_report(lambda_a: f64, k: f64, d_bar: f64, v_t: f64, e2: f64, ts: f64) -> Result<DwellReport, String> {
    for (name, v) in [("lambda", lambda_a), ("k", k), ("d_bar", d_bar), ("V_T", v_t), ("T_s", ts)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(format!("{name} must be positive"));
        }
    }
    if !(e2 >= 0.0 && e2.is_finite()) {
        return Err("‖e2‖ must be non-negative".into());
    }
    let max_d = dwell::max_dwell(lambda_a, v_t, d_bar);
    let min_d = dwell::min_dwell(k, v_t, e2);
    let (n, m) = dwell::step_bounds(max_d, min_d, ts);
    Ok(DwellReport {
        max_dwell: max_d,
        min_dwell: min_d,
        n,
        m,
        envelope_at_max: dwell::e1_envelope(lambda_a, d_bar, max_d),
    })
}

#[derive(Debug, Clone, Deserialize)]
pub struct Region {
    pub center: [f64; 2],
    pub size: [f64; 2],
}

/// Atoms `in<Name>` for every region.
pub fn atom_table(regions: &BTreeMap<String, Region>) -> Result<AtomTable, String> {
    let mut atoms = AtomTable::new();
    for (name, r) in regions {
        if r.size.iter().any(|s| !(*s > 0.0)) {
            return Err(format!("region {name} is empty"));
        }
        let half = [r.size[0] / 2.0, r.size[1] / 2.0];
        atoms.insert(format!("in{name}"), Predicate::aabb(AgentRef::Leader, &r.center, &half));
    }
    Ok(atoms)
}

#[derive(Debug, Serialize)]
pub struct MonitorReport {
    pub weak: bool,
    pub strong: bool,
    /// Weak and strong verdicts of the formula at every index of the path.
    pub weak_at: Vec<bool>,
    pub strong_at: Vec<bool>,
    pub necessary_length: Option<usize>,
}

pub fn monitor(formula: &str, regions: &BTreeMap<String, Region>, path: &[[f64; 2]]) -> Result<MonitorReport, String> {
    let atoms = atom_table(regions)?;
    let f = mtl::parse(formula, &atoms).map_err(|e| e.to_string())?;
    if path.is_empty() {
        return Err("the path is empty".into());
    }
    let trace = Trace::new(2, 1.0, path.iter().map(|p| p.to_vec()).collect()).map_err(|e| e.to_string())?;
    let weak_at: Vec<bool> = (0..path.len()).map(|j| eval_weak(&trace, j, &f, &atoms)).collect();
    let strong_at: Vec<bool> = (0..path.len()).map(|j| eval_strong(&trace, j, &f, &atoms)).collect();
    Ok(MonitorReport {
        weak: weak_at[0],
        strong: strong_at[0],
        weak_at,
        strong_at,
        necessary_length: mtl::necessary_length(&f),
    })
}

#[derive(Debug, Serialize)]
pub struct PlanReport {
    pub status: String,
    pub path: Vec<[f64; 2]>,
    pub inputs: Vec<[f64; 2]>,
    pub objective: f64,
    pub nodes: usize,
    pub binaries: usize,
    pub constraints: usize,
}

/// Planar double integrator sampled at 1 s: state `(p, v)`, input the
/// acceleration, output the position.
fn double_integrator() -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let mut a = DMatrix::zeros(4, 4);
    a[(0, 2)] = 1.0;
    a[(1, 3)] = 1.0;
    let mut b = DMatrix::zeros(4, 2);
    b[(2, 0)] = 1.0;
    b[(3, 1)] = 1.0;
    let mut c = DMatrix::zeros(2, 4);
    c[(0, 0)] = 1.0;
    c[(1, 1)] = 1.0;
    let lti = LtiModel::new(a, b, c.clone()).expect("consistent shapes");
    let (ad, bd) = lti.discretize(1.0);
    (ad, bd, c)
}

/// Minimum-effort path from `start` (at rest) over `horizon` samples that
/// satisfies `formula` weakly, with `|u| <= u_max` per axis.
pub fn plan(
    formula: &str,
    regions: &BTreeMap<String, Region>,
    start: [f64; 2],
    horizon: usize,
    u_max: f64,
    node_limit: usize,
) -> Result<PlanReport, String> {
    if !(1..=40).contains(&horizon) {
        return Err("horizon must lie in 1..=40".into());
    }
    if !(u_max > 0.0 && u_max.is_finite()) {
        return Err("the input bound must be positive".into());
    }
    let atoms = atom_table(regions)?;
    let f = mtl::parse(formula, &atoms).map_err(|e| e.to_string())?;
    let trace = Trace::new(2, 1.0, vec![start.to_vec()]).map_err(|e| e.to_string())?;
    let expr = mtl::rewrite_at(&f, 0, 0, &trace, &atoms, Some(horizon - 1)).map_err(|e| e.to_string())?;

    let (ad, bd, c) = double_integrator();
    let mut model = MilpModel::new();
    let x0 = [start[0], start[1], 0.0, 0.0];
    let vars = encode_dynamics(
        &mut model,
        &ad,
        &bd,
        &c,
        &x0,
        horizon,
        (&[-u_max; 2], &[u_max; 2]),
        (&[0.0; 2], &[ARENA; 2]),
    )
    .map_err(|e| e.to_string())?;
    add_l1_objective(&mut model, &vars.u, &[1.0, 1.0]);
    let others = vec![vec![0.0; 2]; horizon];
    let ctx = FormulaContext {
        atoms: &atoms,
        dim: 2,
        origin: 0,
        leader: &vars.y,
        others: &others,
    };
    encode_formula(&mut model, &expr, &ctx, EncodeOptions::default()).map_err(|e| e.to_string())?;
    let sol = solve(&model, node_limit);
    let mut report = PlanReport {
        status: format!("{:?}", sol.status),
        path: Vec::new(),
        inputs: Vec::new(),
        objective: sol.objective,
        nodes: sol.nodes,
        binaries: model.num_binaries(),
        constraints: model.constraints().len(),
    };
    if let (MilpStatus::Optimal | MilpStatus::IterLimit, Some(v)) = (&sol.status, &sol.values) {
        report.path = vars.y.iter().map(|y| [v[y[0].0], v[y[1].0]]).collect();
        report.inputs = vars.u.iter().map(|u| [v[u[0].0], v[u[1].0]]).collect();
    }
    Ok(report)
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    match r {
        Ok(v) => Ok(serde_json::to_string(&v).expect("report serialises")),
        Err(e) => Err(JsError::new(&e)),
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("{what}: {e}"))
}

#[wasm_bindgen(js_name = dwellBounds)]
pub fn dwell_bounds_js(lambda_a: f64, k: f64, d_bar: f64, v_t: f64, e2: f64, ts: f64) -> Result<String, JsError> {
    to_js(dwell_report(lambda_a, k, d_bar, v_t, e2, ts))
}

#[wasm_bindgen(js_name = monitorPath)]
pub fn monitor_js(formula: &str, regions: &str, path: &str) -> Result<String, JsError> {
    to_js((|| {
        let regions = from_json(regions, "regions")?;
        let path: Vec<[f64; 2]> = from_json(path, "path")?;
        monitor(formula, &regions, &path)
    })())
}

#[wasm_bindgen(js_name = planPath)]
pub fn plan_js(formula: &str, regions: &str, start_x: f64, start_y: f64, horizon: usize, u_max: f64) -> Result<String, JsError> {
    to_js((|| {
        let regions = from_json(regions, "regions")?;
        plan(formula, &regions, [start_x, start_y], horizon, u_max, 5_000)
    })())
}

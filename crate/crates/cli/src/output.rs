use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use leadsynth::scenario::Scenario;
use leadsynth::synth::{RunStatus, SolveRecord, SynthesisLog};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub status: RunStatus,
    pub message: Option<String>,
    pub converged: bool,
    pub steps: usize,
    pub services: Vec<usize>,
    pub n: Vec<usize>,
    pub formula: String,
    pub verdict: String,
    pub verdict_weak: bool,
    pub verdict_strong: bool,
    pub objectives: Vec<SolveRecord>,
    pub effort: f64,
    pub scenario: Scenario,
}

impl Summary {
    pub fn new(scn: &Scenario, log: &SynthesisLog) -> Self {
        let mut services = vec![0; scn.followers.agents.len()];
        for e in &log.events {
            services[e.follower - 1] += 1;
        }
        Summary {
            status: log.status,
            message: log.message.clone(),
            converged: log.status == RunStatus::Converged,
            steps: log.num_steps(),
            services,
            n: log.n.clone(),
            formula: log.formula.clone(),
            verdict: verdict(log.verdict_weak, log.verdict_strong).into(),
            verdict_weak: log.verdict_weak,
            verdict_strong: log.verdict_strong,
            objectives: log.solves.clone(),
            effort: log.effort(0..usize::MAX),
            scenario: scn.clone(),
        }
    }
}

pub fn verdict(weak: bool, strong: bool) -> &'static str {
    match (weak, strong) {
        (_, true) => "strongly-satisfied",
        (true, false) => "weakly-satisfied",
        (false, _) => "violated",
    }
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    write_atomic(path, &w.into_inner()?)
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn trajectory_header(dim: usize, states: usize, leader_states: usize, q: usize) -> Vec<String> {
    let mut h = vec!["index".to_string(), "t".to_string()];
    h.extend((1..=dim).map(|k| format!("y0_{k}")));
    h.extend((1..=leader_states).map(|k| format!("x0_{k}")));
    for i in 1..=q {
        h.extend((1..=states).map(|k| format!("x{i}_{k}")));
        h.extend((1..=states).map(|k| format!("xhat{i}_{k}")));
        h.push(format!("e1_{i}"));
        h.push(format!("e2_{i}"));
    }
    h
}

pub fn events_header() -> Vec<String> {
    [
        "follower",
        "index",
        "t",
        "distance_estimate",
        "distance_true",
        "e1_pre",
        "e2_pre",
        "e2_post",
        "min_dwell",
        "m_raw",
        "m",
        "n",
    ]
    .map(String::from)
    .to_vec()
}

pub fn inputs_header(inputs: usize) -> Vec<String> {
    let mut h = vec!["index".to_string(), "t".to_string()];
    h.extend((1..=inputs).map(|k| format!("u{k}")));
    h
}

pub fn write_outputs(out: &Path, scn: &Scenario, log: &SynthesisLog) -> Result<()> {
    fs::create_dir_all(out.join("plotdata"))
        .with_context(|| format!("creating {}", out.display()))?;
    let q = scn.followers.agents.len();
    let dim = log.steps.first().map_or(0, |s| s.leader.len());
    let states = scn.followers.agents.first().map_or(0, |a| a.x0.len());
    let leader_states = scn.leader.x0.len();
    let inputs = scn.leader.u_min.len();

    let rows: Vec<Vec<String>> = log
        .steps
        .iter()
        .map(|s| {
            let mut r = vec![s.index.to_string(), num(s.t)];
            r.extend(s.leader.iter().copied().map(num));
            r.extend(s.leader_state.iter().copied().map(num));
            for f in &s.followers {
                r.extend(f.x.iter().copied().map(num));
                r.extend(f.xhat.iter().copied().map(num));
                r.push(num(f.e1));
                r.push(num(f.e2));
            }
            r
        })
        .collect();
    write_csv(
        &out.join("trajectories.csv"),
        &trajectory_header(dim, states, leader_states, q),
        &rows,
    )?;

    let rows: Vec<Vec<String>> = log
        .events
        .iter()
        .map(|e| {
            vec![
                e.follower.to_string(),
                e.index.to_string(),
                num(e.t),
                num(e.distance_estimate),
                num(e.distance_true),
                num(e.e1_pre),
                num(e.e2_pre),
                num(e.e2_post),
                num(e.min_dwell),
                e.m_raw.to_string(),
                e.m.to_string(),
                e.n.to_string(),
            ]
        })
        .collect();
    write_csv(&out.join("events.csv"), &events_header(), &rows)?;

    let rows: Vec<Vec<String>> = log
        .steps
        .iter()
        .filter_map(|s| {
            let u = s.u.as_ref()?;
            let mut r = vec![s.index.to_string(), num(s.t)];
            r.extend(u.iter().copied().map(num));
            Some(r)
        })
        .collect();
    write_csv(&out.join("inputs.csv"), &inputs_header(inputs), &rows)?;

    write_plotdata(&out.join("plotdata"), scn, log, dim)?;
    write_atomic(&out.join("phi.txt"), format!("{}\n", log.formula).as_bytes())?;
    let summary = serde_json::to_string_pretty(&Summary::new(scn, log))?;
    write_atomic(&out.join("summary.json"), summary.as_bytes())?;
    Ok(())
}

/// One file per figure panel: positions, planar view, `‖e1‖`, `‖e2‖`, plus
/// the region boxes.
fn write_plotdata(dir: &Path, scn: &Scenario, log: &SynthesisLog, dim: usize) -> Result<()> {
    let q = scn.followers.agents.len();
    let axes = ["x", "y", "z"];
    let axis = |k: usize| axes.get(k).map_or(format!("p{}", k + 1), |a| a.to_string());

    let mut h = vec!["t".to_string()];
    h.extend((0..dim).map(|k| format!("leader_{}", axis(k))));
    for i in 1..=q {
        h.extend((0..dim).map(|k| format!("f{i}_{}", axis(k))));
    }
    let rows: Vec<Vec<String>> = log
        .steps
        .iter()
        .map(|s| {
            let mut r = vec![num(s.t)];
            r.extend(s.leader.iter().copied().map(num));
            for f in &s.followers {
                r.extend(f.x[..dim].iter().copied().map(num));
            }
            r
        })
        .collect();
    write_csv(&dir.join("positions.csv"), &h, &rows)?;

    let planar = dim.min(2);
    let mut h = vec!["t".to_string()];
    h.extend((0..planar).map(|k| format!("leader_{}", axis(k))));
    for i in 1..=q {
        h.extend((0..planar).map(|k| format!("f{i}_{}", axis(k))));
    }
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut out = vec![r[0].clone()];
            for a in 0..=q {
                out.extend(r[1 + a * dim..1 + a * dim + planar].iter().cloned());
            }
            out
        })
        .collect();
    write_csv(&dir.join("planar.csv"), &h, &rows)?;

    for (file, pick) in [
        ("e1.csv", (|f: &leadsynth::synth::FollowerSample| f.e1) as fn(&_) -> f64),
        ("e2.csv", |f| f.e2),
        ("e1_peak.csv", |f| f.e1_peak),
    ] {
        let mut h = vec!["t".to_string()];
        h.extend((1..=q).map(|i| format!("f{i}")));
        let rows: Vec<Vec<String>> = log
            .steps
            .iter()
            .map(|s| {
                let mut r = vec![num(s.t)];
                r.extend(s.followers.iter().map(|f| num(pick(f))));
                r
            })
            .collect();
        write_csv(&dir.join(file), &h, &rows)?;
    }

    let mut h = vec!["name".to_string()];
    h.extend((0..dim).map(|k| format!("lower_{}", axis(k))));
    h.extend((0..dim).map(|k| format!("upper_{}", axis(k))));
    let rows: Vec<Vec<String>> = scn
        .regions
        .iter()
        .map(|(name, r)| {
            let mut row = vec![name.clone()];
            row.extend(r.lower().into_iter().map(num));
            row.extend(r.upper().into_iter().map(num));
            row
        })
        .collect();
    write_csv(&dir.join("regions.csv"), &h, &rows)?;
    Ok(())
}

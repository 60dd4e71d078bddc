mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use leadsynth::mtl::{self, eval_strong, eval_weak, Trace};
use leadsynth::scenario::Scenario;
use leadsynth::synth::{run_prepared, RunStatus};

#[derive(Parser)]
#[command(name = "leadsynth", version, about = "Leader input synthesis for intermittently serviced followers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the closed loop and write trajectories, events, inputs and a summary.
    Run {
        /// Scenario file, or a summary.json from an earlier run.
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        step_cap: Option<usize>,
        #[arg(long)]
        node_limit: Option<usize>,
    },
    /// Validate a scenario and print the dwell-time bounds.
    Check { scenario: PathBuf },
    /// Weak and strong verdicts of a formula over a recorded trajectory.
    Monitor {
        trajectories: PathBuf,
        phi: PathBuf,
        /// Scenario defining the atoms; defaults to the summary.json next to
        /// the trajectories.
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

const EXIT_ERROR: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_VIOLATED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            out,
            seed,
            horizon,
            step_cap,
            node_limit,
        } => load(&scenario).and_then(|mut scn| {
            if let Some(s) = seed {
                scn.seed = s;
            }
            if let Some(n) = horizon {
                scn.horizon = n;
            }
            if let Some(k) = step_cap {
                scn.step_cap = k;
            }
            if let Some(l) = node_limit {
                scn.node_limit = l;
            }
            run(&scn, &out)
        }),
        Command::Check { scenario } => load(&scenario).and_then(|scn| check(&scn)),
        Command::Monitor {
            trajectories,
            phi,
            scenario,
        } => monitor(&trajectories, &phi, scenario.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// Reads a scenario file; a summary.json is accepted through its embedded
/// scenario.
fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let text = match value.get("scenario") {
        Some(inner) if value.get("status").is_some() => inner.to_string(),
        _ => text,
    };
    Scenario::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn run(scn: &Scenario, out: &Path) -> Result<u8> {
    let p = scn.prepare().context("validating scenario")?;
    let start = Instant::now();
    let log = run_prepared(scn, &p);
    let elapsed = start.elapsed();
    output::write_outputs(out, scn, &log)?;
    println!(
        "{}: {:?} after {} steps, {} services, {} solves, {:.1}s",
        if scn.name.is_empty() { "scenario" } else { &scn.name },
        log.status,
        log.num_steps(),
        log.events.len(),
        log.solves.len(),
        elapsed.as_secs_f64()
    );
    if let Some(m) = &log.message {
        println!("{m}");
    }
    println!("verdict: {}", output::verdict(log.verdict_weak, log.verdict_strong));
    Ok(if log.status == RunStatus::Converged {
        0
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn check(scn: &Scenario) -> Result<u8> {
    let p = scn.prepare()?;
    println!("lambda_a = {:.6}  lambda_c = {:.6}", p.dwell.lambda_a, p.dwell.lambda_c);
    println!("follower  max_dwell[s]  min_dwell[s]  n  m");
    for (i, d) in p.initial.iter().enumerate() {
        println!(
            "{:>8}  {:>12.6}  {:>12.6}  {}  {}",
            i + 1,
            d.max_dwell,
            d.min_dwell,
            d.n,
            d.m
        );
    }
    println!("phi_p = {}", p.phi_p);
    Ok(0)
}

fn monitor(trajectories: &Path, phi: &Path, scenario: Option<&Path>) -> Result<u8> {
    let scn = match scenario {
        Some(s) => load(s)?,
        None => load(&trajectories.with_file_name("summary.json"))
            .context("no --scenario given and no summary.json beside the trajectories")?,
    };
    let p = scn.prepare()?;
    let text = std::fs::read_to_string(phi).with_context(|| format!("reading {}", phi.display()))?;
    let f = mtl::parse(text.trim(), &p.atoms)?;
    let trace = read_trace(trajectories, p.dim, scn.ts)?;
    let weak = eval_weak(&trace, 0, &f, &p.atoms);
    let strong = eval_strong(&trace, 0, &f, &p.atoms);
    println!("samples: {}", trace.len());
    println!("weak: {weak}");
    println!("strong: {strong}");
    println!("verdict: {}", output::verdict(weak, strong));
    Ok(if weak { 0 } else { EXIT_VIOLATED })
}

/// Stacked `[y0, ŷ1, ..., ŷQ]` samples from a trajectories file.
fn read_trace(path: &Path, dim: usize, ts: f64) -> Result<Trace> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header = r.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let mut cols = Vec::new();
    for k in 1..=dim {
        cols.push(col(&format!("y0_{k}")).with_context(|| format!("missing column y0_{k}"))?);
    }
    let mut i = 1;
    while col(&format!("xhat{i}_1")).is_some() {
        for k in 1..=dim {
            cols.push(col(&format!("xhat{i}_{k}")).with_context(|| format!("missing column xhat{i}_{k}"))?);
        }
        i += 1;
    }
    let mut samples = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let s: Result<Vec<f64>> = cols
            .iter()
            .map(|&c| {
                rec[c]
                    .parse::<f64>()
                    .with_context(|| format!("row {}: bad number `{}`", line + 2, &rec[c]))
            })
            .collect();
        samples.push(s?);
    }
    if samples.is_empty() {
        bail!("{} has no samples", path.display());
    }
    Ok(Trace::new(dim, ts, samples)?)
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_leadsynth"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn edited(base: &Path, dir: &Path, edit: impl FnOnce(&mut serde_json::Value)) -> PathBuf {
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(base).unwrap()).unwrap();
    edit(&mut v);
    let p = dir.join("edited.json");
    fs::write(&p, v.to_string()).unwrap();
    p
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn check_prints_dwell_bounds() {
    let o = run(&["check", bundled("scenario1.json").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row = out.lines().find(|l| l.trim_start().starts_with("1 ")).unwrap();
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(cols[1], "3.258097");
    assert_eq!(&cols[3..], ["6", "1"]);
    assert_eq!(out.lines().filter(|l| l.trim_start().starts_with(char::is_numeric)).count(), 3);
}

#[test]
fn check_rejects_threshold_above_bound() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(&bundled("scenario1.json"), dir.path(), |v| v["v_t"] = 10.0.into());
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("V_T"), "{}", stderr(&o));
}

#[test]
fn check_rejects_empty_follower_list() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(&bundled("scenario1.json"), dir.path(), |v| {
        v["followers"]["agents"] = serde_json::json!([])
    });
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("followers.agents"), "{}", stderr(&o));
}

#[test]
fn check_reports_schema_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(&bundled("scenario1.json"), dir.path(), |v| v["eta"] = "four".into());
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("eta"), "{}", stderr(&o));
}

#[test]
fn run_writes_outputs_with_stable_headers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["run", data("small.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));

    assert_eq!(
        header(&out.join("trajectories.csv")),
        "index,t,y0_1,y0_2,y0_3,x0_1,x0_2,x0_3,x0_4,x0_5,x0_6,x0_7,x0_8,\
         x1_1,x1_2,x1_3,xhat1_1,xhat1_2,xhat1_3,e1_1,e2_1"
    );
    assert_eq!(
        header(&out.join("events.csv")),
        "follower,index,t,distance_estimate,distance_true,e1_pre,e2_pre,e2_post,min_dwell,m_raw,m,n"
    );
    assert_eq!(header(&out.join("inputs.csv")), "index,t,u1,u2,u3,u4");
    assert_eq!(header(&out.join("plotdata/planar.csv")), "t,leader_x,leader_y,f1_x,f1_y");
    assert_eq!(header(&out.join("plotdata/e1.csv")), "t,f1");
    assert_eq!(header(&out.join("plotdata/regions.csv")), "name,lower_x,lower_y,lower_z,upper_x,upper_y,upper_z");

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "converged");
    assert_eq!(summary["verdict"], "weakly-satisfied");
    let services = summary["services"][0].as_u64().unwrap();
    let events = fs::read_to_string(out.join("events.csv")).unwrap().lines().count() - 1;
    assert_eq!(services as usize, events);
    let steps = summary["steps"].as_u64().unwrap() as usize;
    let inputs = fs::read_to_string(out.join("inputs.csv")).unwrap().lines().count() - 1;
    assert_eq!(steps, inputs);
    let leftovers: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn summary_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = run(&["run", data("small.json").to_str().unwrap(), "--out", a.to_str().unwrap(), "--seed", "9"]);
    assert!(o.status.success());
    let o = run(&["run", a.join("summary.json").to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(o.status.success());
    for f in ["trajectories.csv", "events.csv", "inputs.csv", "summary.json", "phi.txt", "plotdata/e2.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_changes_the_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, seed) in [(&a, "1"), (&b, "2")] {
        let o = run(&["run", data("small.json").to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", seed]);
        assert!(o.status.success());
    }
    assert_ne!(
        fs::read(a.join("trajectories.csv")).unwrap(),
        fs::read(b.join("trajectories.csv")).unwrap()
    );
    for out in [&a, &b] {
        let e1 = fs::read_to_string(out.join("plotdata/e1.csv")).unwrap();
        for line in e1.lines().skip(1) {
            let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!(v <= 1.0);
        }
    }
}

#[test]
fn step_cap_exits_nonzero_and_keeps_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "run",
        data("small.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--step-cap",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let summary = fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("\"timeout\""));
    assert_eq!(fs::read_to_string(out.join("inputs.csv")).unwrap().lines().count(), 3);
}

#[test]
fn monitor_agrees_with_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert!(run(&["run", data("small.json").to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status
        .success());
    let o = run(&[
        "monitor",
        out.join("trajectories.csv").to_str().unwrap(),
        out.join("phi.txt").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict: weakly-satisfied"));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "G !inD").unwrap();
    let o = run(&[
        "monitor",
        out.join("trajectories.csv").to_str().unwrap(),
        bad.to_str().unwrap(),
        "--scenario",
        data("small.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("weak: false"));
}

#[test]
fn monitor_rejects_unknown_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert!(run(&["run", data("small.json").to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status
        .success());
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "G inZ").unwrap();
    let o = run(&[
        "monitor",
        out.join("trajectories.csv").to_str().unwrap(),
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nhreduce"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn simulate(cfg: &Path, out: &Path) -> Output {
    bin().args(["simulate", "--config"]).arg(cfg).arg("--out").arg(out).output().unwrap()
}

fn compare(cfg: &Path, mode: &str, full: &Path, reduced: &Path) -> Output {
    bin().args(["compare", "--mode", mode, "--config"]).arg(cfg).arg(full).arg(reduced).output().unwrap()
}

const SUSLOV_FULL: &str = r#"{"system":"suslov","level":"full","inertia":[2,3,4,0.3,-0.2],"steps":100}"#;
const SUSLOV_ETA: &str = r#"{"system":"suslov","level":"eta","inertia":[2,3,4,0.3,-0.2],"steps":100}"#;

#[test]
fn suslov_eta_default_run_succeeds() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "eta.json", r#"{"system":"suslov","level":"eta","inertia":[1,2,3,0,0],"steps":200}"#);
    let out = dir.path().join("eta.csv");
    let o = simulate(&cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 202);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("eta.report.json")).unwrap()).unwrap();
    assert_eq!(report["summary"]["passed"], true);
    assert_eq!(report["steps"].as_array().unwrap().len(), 201);
}

#[test]
fn zero_steps_writes_the_initial_row() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "p.json", r#"{"system":"particle","level":"full","h_step":0.1,"steps":0}"#);
    let out = dir.path().join("p.csv");
    assert_eq!(code(&simulate(&cfg, &out)), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "k,x,y,z,xn,yn,zn");
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    for (i, text) in [
        "{ not json",
        r#"{"system":"suslov","level":"eta","inertia":[1,2,-3,0,0],"steps":5}"#,
        r#"{"system":"particle","level":"eta","h_step":0.1,"steps":5}"#,
    ]
    .iter()
    .enumerate()
    {
        let cfg = write(dir.path(), &format!("bad{i}.json"), text);
        assert_eq!(code(&simulate(&cfg, &out)), 2, "{text}");
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&simulate(&missing, &out)), 2);
}

#[test]
fn solver_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"system":"suslov","level":"full","inertia":[2,3,4,0.3,-0.2],"steps":5,"max_iter":1}"#,
    );
    assert_eq!(code(&simulate(&cfg, &dir.path().join("s.csv"))), 3);
}

#[test]
fn simulate_then_check_round_trips_for_every_level() {
    let dir = TempDir::new().unwrap();
    for (i, text) in [
        SUSLOV_FULL,
        SUSLOV_ETA,
        r#"{"system":"suslov","level":"eta","inertia":[2,3,4,0.3,-0.2],"connection_h":[0.3,0.1,-0.2],"steps":50}"#,
        r#"{"system":"suslov","level":"momentum","inertia":[2,3,4,0.3,-0.2],"steps":50}"#,
        r#"{"system":"particle","level":"full","h_step":0.1,"steps":50}"#,
        r#"{"system":"particle","level":"h_reduced","h_step":0.1,"steps":50}"#,
        r#"{"system":"particle","level":"g_reduced","h_step":0.1,"steps":50}"#,
        r#"{"system":"particle","level":"gh_reduced","h_step":0.1,"steps":50}"#,
    ]
    .iter()
    .enumerate()
    {
        let cfg = write(dir.path(), &format!("c{i}.json"), text);
        let out = dir.path().join(format!("c{i}.csv"));
        assert_eq!(code(&simulate(&cfg, &out)), 0, "{text}");
        let o = bin().args(["check", "--config"]).arg(&cfg).arg(&out).output().unwrap();
        assert_eq!(code(&o), 0, "{text}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    }
}

#[test]
fn check_reports_failures_and_schema_mismatch() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "eta.json", SUSLOV_ETA);
    let out = dir.path().join("eta.csv");
    assert_eq!(code(&simulate(&cfg, &out)), 0);

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut cells: Vec<String> = lines[10].split(',').map(str::to_string).collect();
    let v: f64 = cells[2].parse().unwrap();
    cells[2] = format!("{:.16e}", v + 1e-4);
    lines[10] = cells.join(",");
    let bad = write(dir.path(), "bad.csv", &(lines.join("\n") + "\n"));
    let o = bin().args(["check", "--config"]).arg(&cfg).arg(&bad).output().unwrap();
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));

    let full_cfg = write(dir.path(), "full.json", SUSLOV_FULL);
    assert_eq!(code(&bin().args(["check", "--config"]).arg(&full_cfg).arg(&out).output().unwrap()), 2);

    let empty = write(dir.path(), "empty.csv", &(lines[0].clone() + "\n"));
    assert_eq!(code(&bin().args(["check", "--config"]).arg(&cfg).arg(&empty).output().unwrap()), 0);
}

#[test]
fn output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "full.json", SUSLOV_FULL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(code(&simulate(&cfg, &a)), 0);
    assert_eq!(code(&simulate(&cfg, &b)), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn suslov_comparisons() {
    let dir = TempDir::new().unwrap();
    let full_cfg = write(dir.path(), "full.json", SUSLOV_FULL);
    let eta_cfg = write(dir.path(), "eta.json", SUSLOV_ETA);
    let h_cfg = write(
        dir.path(),
        "h.json",
        r#"{"system":"suslov","level":"eta","inertia":[2,3,4,0.3,-0.2],"connection_h":[0.3,0.1,-0.2],"steps":100}"#,
    );
    let p_cfg = write(dir.path(), "p.json", r#"{"system":"suslov","level":"momentum","inertia":[2,3,4,0.3,-0.2],"steps":100}"#);
    let full = dir.path().join("full.csv");
    let eta = dir.path().join("eta.csv");
    let v = dir.path().join("v.csv");
    let p = dir.path().join("p.csv");
    for (c, o) in [(&full_cfg, &full), (&eta_cfg, &eta), (&h_cfg, &v), (&p_cfg, &p)] {
        assert_eq!(code(&simulate(c, o)), 0);
    }

    let o = compare(&eta_cfg, "project", &full, &eta);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("max deviation"));
    assert_eq!(code(&compare(&eta_cfg, "reconstruct", &full, &eta)), 0);
    assert_eq!(code(&compare(&h_cfg, "project", &full, &v)), 0);
    assert_eq!(code(&compare(&h_cfg, "reconstruct", &full, &v)), 0);
    assert_eq!(code(&compare(&h_cfg, "connection", &full, &v)), 0);
    assert_eq!(code(&compare(&p_cfg, "momentum", &full, &p)), 0);
    assert_eq!(code(&compare(&p_cfg, "project", &full, &p)), 0);
    assert_eq!(code(&compare(&p_cfg, "reconstruct", &full, &p)), 0);

    // The un-rotated η path is not the h-reduced path.
    assert_eq!(code(&compare(&h_cfg, "project", &full, &eta)), 1);

    let text = std::fs::read_to_string(&eta).unwrap();
    let shifted: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                return l.to_string();
            }
            let mut cells: Vec<String> = l.split(',').map(str::to_string).collect();
            let v: f64 = cells[1].parse().unwrap();
            cells[1] = format!("{:.16e}", v + 1e-6);
            cells.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n");
    let shifted = write(dir.path(), "shifted.csv", &shifted);
    assert_eq!(code(&compare(&eta_cfg, "project", &full, &shifted)), 1);

    let short_cfg = write(dir.path(), "short.json", r#"{"system":"suslov","level":"eta","inertia":[2,3,4,0.3,-0.2],"steps":10}"#);
    let short = dir.path().join("short.csv");
    assert_eq!(code(&simulate(&short_cfg, &short)), 0);
    assert_eq!(code(&compare(&eta_cfg, "project", &full, &short)), 2);
    assert_eq!(code(&compare(&eta_cfg, "staged", &full, &eta)), 2);
    assert_eq!(code(&compare(&eta_cfg, "project", &eta, &eta)), 2);
}

#[test]
fn particle_comparisons() {
    let dir = TempDir::new().unwrap();
    let mut paths = vec![];
    for level in ["full", "h_reduced", "g_reduced", "gh_reduced"] {
        let cfg = write(
            dir.path(),
            &format!("{level}.json"),
            &format!(r#"{{"system":"particle","level":"{level}","h_step":0.1,"steps":60}}"#),
        );
        let out = dir.path().join(format!("{level}.csv"));
        assert_eq!(code(&simulate(&cfg, &out)), 0);
        paths.push((cfg, out));
    }
    let full = &paths[0].1;
    for (cfg, out) in &paths[1..] {
        assert_eq!(code(&compare(cfg, "project", full, out)), 0, "{}", out.display());
        assert_eq!(code(&compare(cfg, "reconstruct", full, out)), 0, "{}", out.display());
    }
    for (cfg, out) in &paths[2..] {
        let o = compare(cfg, "staged", full, out);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        assert!(String::from_utf8_lossy(&o.stdout).contains("F defect"));
    }
    assert_eq!(code(&compare(&paths[1].0, "staged", full, &paths[1].1)), 2);
}

#[test]
fn sweep_runs_every_config() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.json", SUSLOV_ETA);
    let b = write(dir.path(), "b.json", r#"{"system":"particle","level":"g_reduced","h_step":0.2,"steps":30}"#);
    let out = dir.path().join("runs");
    let o = bin().args(["simulate", "--sweep", "--config"]).arg(&a).arg("--config").arg(&b).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("a.csv").exists() && out.join("b.csv").exists());
    assert!(out.join("a.report.json").exists());

    let bad = write(dir.path(), "c.json", "{}");
    let o = bin().args(["simulate", "--sweep", "--config"]).arg(&a).arg("--config").arg(&bad).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 2);

    let o = bin().args(["simulate", "--config"]).arg(&a).arg("--config").arg(&b).arg("--out").arg(dir.path().join("x.csv")).output().unwrap();
    assert_eq!(code(&o), 2);
}

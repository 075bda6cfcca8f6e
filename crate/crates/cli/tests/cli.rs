use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rydring::{Series, TimeGrid};

fn rydring(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydring"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn basis_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = rydring(&["basis", "--n", "10"], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bracelets"], 78);
    assert_eq!(v["blockaded_dim"], 14);
    assert_eq!(v["blockaded_configs"], 123);
}

#[test]
fn csv_reproduces_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = rydring(&["evolve", "--n", "10", "--t-end", "40", "--g2", "2,3", "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("run");
    let summary = json(&run.join("summary.json"));

    let text = fs::read_to_string(run.join("series.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["t", "beta", "N_Ryd", "g2_2", "g2_3", "M_C", "M_C_class", "C", "EOF"]);
    let beta: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let s = Series::new(TimeGrid::from_zero(40.0, 0.02).unwrap(), beta).unwrap();
    let mean = summary["beta"]["mean"].as_f64().unwrap();
    let std = summary["beta"]["std"].as_f64().unwrap();
    assert!((s.time_average(5.0, 40.0).unwrap() - mean).abs() < 1e-9);
    assert!((s.time_std(5.0, 40.0).unwrap() - std).abs() < 1e-9);
    assert!(fs::read_to_string(run.join("config.toml")).unwrap().contains("t_end = 40.0"));
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = rydring(&["evolve", "--n", "9", "--t-end", "20", "--out", name], dir.path());
        assert!(out.status.success());
    }
    for file in ["series.csv", "summary.json"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs");
    }
}

#[test]
fn config_file_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "n_sites = 10\nnot_a_key = 3\n").unwrap();
    let out = rydring(&["evolve", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("rydring-evolve-n10").exists());

    let out = rydring(&["evolve", "--n", "10", "--m", "9"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = rydring(&["compare", "--n", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    fs::write(dir.path().join("good.toml"), "n_sites = 12\nt_end = 10.0\n").unwrap();
    let out = rydring(&["evolve", "--config", "good.toml", "--n", "8", "--out", "r"], dir.path());
    assert!(out.status.success());
    assert_eq!(json(&dir.path().join("r/summary.json"))["n_sites"], 8);
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = rydring(&["verify", "--n", "8"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let out = rydring(&["verify", "--n", "14"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn file_modes_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| assert!(rydring(args, dir.path()).status.success(), "{args:?}");
    run(&["compare", "--n", "10", "--delta", "40", "--t-end", "10", "--out", "c"]);
    let c = json(&dir.path().join("c/summary.json"));
    assert_eq!(c["deviations"][0]["observable"], "beta");
    assert!(dir.path().join("c/compare.csv").exists());

    run(&["spectrum", "--n", "8", "--delta", "20", "--out", "s"]);
    let s = json(&dir.path().join("s/spectrum.json"));
    assert_eq!(s["dim"], 256);
    let counts: u64 = s["manifolds"].as_array().unwrap().iter().map(|m| m["count"].as_u64().unwrap()).sum();
    assert_eq!(counts, 256);

    run(&["graph", "--n", "8", "--out", "g"]);
    assert!(fs::read_to_string(dir.path().join("g/graph.dot")).unwrap().starts_with("graph coupling {"));
}

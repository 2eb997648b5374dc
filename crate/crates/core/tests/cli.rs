//! End-to-end runs of the `combsim` binary.

use std::path::Path;
use std::process::{Command, Output};

fn combsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combsim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

#[test]
fn gatecount_prints_total_and_breakdown() {
    let o = combsim(&["gatecount", "--nt", "3", "--nc", "3", "--with-b"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("283"));
    for part in ["target", "comb", "interaction"] {
        assert!(out.contains(part), "{out}");
    }
    let o = combsim(&["gatecount", "--nt", "4", "--nc", "3", "--with-b"]);
    assert_eq!(stdout(&o).lines().next(), Some("347"));
}

#[test]
fn gatecount_dump_lists_every_gate() {
    let o = combsim(&["gatecount", "--with-b", "--dump"]);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    let gates = lines.iter().filter(|l| l.starts_with(|c: char| c.is_ascii_uppercase())).count();
    assert_eq!(gates, 283);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = combsim(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn config_errors_exit_with_two_and_name_the_fields() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[comb]\ntf = 10.0\n\n[run]\nsteps = 100\ndt = 0.3\n").unwrap();
    let o = combsim(&["--config", bad.to_str().unwrap(), "--seed", "1", "comb"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("run.dt") && err.contains("comb.tf"), "{err}");

    let o = combsim(&["--seed", "1", "--mode", "circuit", "--coupling", "random_pattern", "comb"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("interaction.coupling"));

    std::fs::write(&bad, "[model]\nnt = 3\nbogus = 1\n").unwrap();
    let o = combsim(&["--config", bad.to_str().unwrap(), "gatecount"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_seed_is_drawn_and_printed() {
    let dir = tempfile::tempdir().unwrap();
    let o = combsim(&["--out", dir.path().to_str().unwrap(), "--steps", "20", "--tf", "5", "comb"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stderr(&o).lines().find(|l| l.starts_with("seed: ")).map(str::to_owned).expect("seed printed");
    let seed: u64 = line["seed: ".len()..].trim().parse().unwrap();
    // the printed seed reproduces the run
    let first = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let again = tempfile::tempdir().unwrap();
    let o = combsim(&[
        "--out",
        again.path().to_str().unwrap(),
        "--steps",
        "20",
        "--tf",
        "5",
        "--seed",
        &seed.to_string(),
        "comb",
    ]);
    assert!(o.status.success());
    assert_eq!(first, std::fs::read_to_string(again.path().join("trajectory.csv")).unwrap());
}

#[test]
fn spectrum_toy_writes_sorted_rows_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let o = combsim(&["--out", dir.path().to_str().unwrap(), "spectrum", "--toy", "--points", "21"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,e0,e1,e2,e3,e4,e5,e6,e7"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 21);
    for r in &rows {
        assert!(r[1..].windows(2).all(|w| w[0] <= w[1]));
    }
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("spectrum.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "spectrum");
    assert!(meta["config"].is_object());
}

#[test]
fn ensemble_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let args =
        ["--out", dir.path().to_str().unwrap(), "--format", "both", "--seed", "9", "--steps", "30", "--tf", "10"];
    let o = combsim(&[&args[..], &["ensemble", "--members", "5"]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("ensemble.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("seed,initial_fidelity,final_fidelity,steps,outcomes"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ensemble.json")).unwrap()).unwrap();
    assert_eq!(doc["data"].as_array().unwrap().len(), 5);
    assert_eq!(doc["metadata"]["seeds"][0], 9);
}

#[test]
fn qaa_runs_and_searches() {
    let o = combsim(&["--h", "1.0", "--steps", "50", "--mode", "circuit", "qaa"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("gates 1050"), "{}", stdout(&o));
    let o = combsim(&["--h", "2.0", "qaa", "--search"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("steps to fidelity 0.5:"));
}

#[test]
fn fixtures_load() {
    for f in ["trajectory.toml", "ensemble.toml", "sc_cost.toml"] {
        combsim::config::AppConfig::load(Path::new(&fixture(f))).unwrap();
    }
    for f in ["trajectory.toml", "ensemble.toml", "sc_cost.toml"] {
        combsim::config::AppConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/search").join(f))
            .unwrap();
    }
}

#[test]
fn compare_writes_cost_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = combsim(&[
        "--config",
        &fixture("sc_cost.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "compare",
        "--hs",
        "0.8,1.0",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("cost.csv")).unwrap();
    assert!(csv.starts_with("method,h,delta,inv_gap,steps,gates"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn optimize_writes_a_loadable_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tuned.toml");
    let o = combsim(&[
        "--seed",
        "3",
        "--steps",
        "20",
        "--tf",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
        "optimize",
        "--budget",
        "3",
        "--write-config",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let tuned = combsim::config::AppConfig::load(&out).unwrap();
    assert!(tuned.comb.nu0.is_some() && tuned.interaction.g.is_some());
}

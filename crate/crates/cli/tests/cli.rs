use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use causal_design::bench::ExperimentConfig;
use causal_design::graph::{Dag, InterventionTarget};
use causal_design::sem::{Dataset, LinearGaussianScm};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_causal-design"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CHAIN_CONFIG: &str = r#"
strategies = ["abcd", "random"]
replicates = 3
m = 4
n_obs = 100
seed = 5

[graph]
kind = "chain"
p = 4

[budget]
total = 12
batches = 3
"#;

fn write_chain_data(path: &Path, n: usize, weight: f64) {
    let dag = if weight == 0.0 { Dag::empty(2).unwrap() } else { Dag::new(2, &[(0, 1)]).unwrap() };
    let scm = LinearGaussianScm::new(dag, vec![0.0, weight, 0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let d = scm.sample(InterventionTarget::OBSERVATIONAL, n, 3);
    d.write_csv(fs::File::create(path).unwrap()).unwrap();
}

#[test]
fn simulate_writes_batch_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, CHAIN_CONFIG).unwrap();
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    // Header plus B rows per (strategy, replicate).
    assert_eq!(csv.lines().count(), 1 + 3 * 3 * 2);
    assert!(stdout(&o).contains("abcd"));
    for f in ["summary.json", "config.json", "truth_mass.csv"] {
        assert!(out.join(f).exists());
    }
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let json: serde_json::Value = toml_to_json(CHAIN_CONFIG);
    fs::write(&cfg, json.to_string()).unwrap();
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("o{k}"));
        let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push(["results.csv", "summary.json", "config.json", "truth_mass.csv"].map(|f| fs::read(out.join(f)).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

fn toml_to_json(text: &str) -> serde_json::Value {
    let cfg = causal_design::bench::ExperimentConfig::from_str_any(text).unwrap();
    serde_json::to_value(cfg).unwrap()
}

#[test]
fn seed_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, CHAIN_CONFIG).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "--seed", "6"])), 0);
    assert_ne!(fs::read(a.join("results.csv")).unwrap(), fs::read(b.join("results.csv")).unwrap());
    assert!(fs::read_to_string(b.join("config.json")).unwrap().contains("\"seed\": 6"));
}

#[test]
fn bad_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let out = dir.path().join("out");
    fs::write(&cfg, "strategies = [\"abcd\"\n[graph]\nkind = 3\n").unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    fs::write(&cfg, CHAIN_CONFIG.replace("batches = 3", "batches = 5")).unwrap();
    assert_eq!(code(&run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 2);
    fs::write(&cfg, CHAIN_CONFIG.replace("m = 4", "mm = 4")).unwrap();
    assert_eq!(code(&run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 2);
    let missing = dir.path().join("nope.toml");
    assert_eq!(code(&run(&["simulate", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["simulate", "--out", out.to_str().unwrap()])), 2);
    assert!(!out.join("results.csv").exists());
}

#[test]
fn design_next_orients_the_edge() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write_chain_data(&data, 500, 0.8);
    let json = dir.path().join("design.json");
    let trace = dir.path().join("trace.csv");
    let o = run(&[
        "design-next", "--data", data.to_str().unwrap(), "--family", "{};{0};{1}", "--functional", "orient:0,1",
        "--nb", "10", "--out", json.to_str().unwrap(), "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let design = report["design"].as_array().unwrap();
    let single: usize = design
        .iter()
        .filter(|e| e["target"] != "")
        .map(|e| e["count"].as_u64().unwrap() as usize)
        .sum();
    assert!(single > 0, "{report}");
    assert!(stdout(&o).contains("recommended design"));
    assert!(fs::read_to_string(&trace).unwrap().starts_with("step,target,count,value,std_error\n"));
}

#[test]
fn design_next_constant_functional_has_zero_trace() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    // Independent columns: every bootstrap graph is empty, so the edge
    // indicator is constant.
    write_chain_data(&data, 2000, 0.0);
    let json = dir.path().join("design.json");
    let o = run(&[
        "design-next", "--data", data.to_str().unwrap(), "--family", "singles", "--functional", "edge:0,1",
        "--nb", "4", "--t", "5", "--m", "3", "--out", json.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["prior_entropy"], 0.0);
    for e in report["trace"].as_array().unwrap() {
        assert_eq!(e["value"], 0.0, "{report}");
    }
}

#[test]
fn design_next_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let args = |d: &Path| -> Vec<String> {
        ["design-next", "--data", d.to_str().unwrap(), "--family", "singles", "--functional", "full", "--nb", "4"]
            .map(String::from)
            .to_vec()
    };
    fs::write(&data, "").unwrap();
    assert_eq!(code(&bin().args(args(&data)).output().unwrap()), 1);
    fs::write(&data, "x0,x1,target\n").unwrap();
    assert_eq!(code(&bin().args(args(&data)).output().unwrap()), 1);
    fs::write(&data, "x0,y1,target\n1,2,\n").unwrap();
    let o = bin().args(args(&data)).output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("y1"), "{}", stderr(&o));
    fs::write(&data, "x0,x1,target\n1,2,\n3,oops,\n").unwrap();
    let o = bin().args(args(&data)).output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    // Node 1 is intervened on in every row: it cannot be fitted.
    fs::write(&data, "x0,x1,target\n1,2,1\n3,4,1\n0.5,1,1\n").unwrap();
    let o = bin().args(args(&data)).output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("node 1"), "{}", stderr(&o));
    let mut a = args(&data);
    a[5] = "edge:0,9".into();
    assert_eq!(code(&bin().args(a).output().unwrap()), 2);
}

#[test]
fn replicate_counterexample_prints_the_score_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["replicate", "counterexample", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("scores ({1}:5, {2}:4, {3}:3, {4}:4)"), "{s}");
    assert!(dir.path().join("counterexample.json").exists());
}

#[test]
fn replicate_bisection_starts_at_the_midpoint() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["replicate", "bisection", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("batch 1: select {8}"), "{}", stdout(&o));
}

#[test]
fn replicate_unknown_scenario_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["replicate", "nonsense", "--out", dir.path().to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["replicate", "boxplot", "--out", dir.path().to_str().unwrap(), "--replicates", "0"])), 2);
}

#[test]
fn dataset_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_chain_data(&path, 10, 0.5);
    let d = Dataset::read_csv(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(d.n(), 10);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        ExperimentConfig::from_str_any(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

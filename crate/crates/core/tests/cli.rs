//! End-to-end runs of the `nhemitter` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const HIDDEN: &str = r#"{
  "bath": "unidirectional", "kappa": 1.0, "length": 400, "boundary": "periodic",
  "emitter": {"delta0": 0.3, "gamma": 1.0, "g": 0.8, "x0": 200}
}"#;

struct Run {
    out: PathBuf,
    output: Output,
}

impl Run {
    fn code(&self) -> i32 {
        self.output.status.code().expect("exit code")
    }

    fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.output.stderr).into_owned()
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.out.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
    }

    fn manifest(&self, command: &str) -> Value {
        serde_json::from_str(&self.read(&format!("{command}.manifest.json"))).expect("manifest json")
    }
}

fn run(dir: &Path, tag: &str, command: &str, config: &str, extra: &[&str]) -> Run {
    let cfg = dir.join(format!("{tag}.json"));
    fs::write(&cfg, config).unwrap();
    let out = dir.join(tag);
    let output = Command::new(env!("CARGO_BIN_EXE_nhemitter"))
        .arg(command)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .expect("spawn nhemitter");
    Run { out, output }
}

/// Parses a CSV table into a header and rows of strings.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].clone()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

#[test]
fn hidden_bound_state_row() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), "bs", "bound-states", HIDDEN, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let (h, rows) = table(&r.read("bound-states.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(column(&h, &rows, "loop_class")[0], "InsideLoop");
    assert!((num(&column(&h, &rows, "re_e")[0]) - 0.3).abs() < 1e-6);
    assert!((num(&column(&h, &rows, "im_e")[0]) + 0.5).abs() < 1e-6);
    let m = r.manifest("bound-states");
    assert_eq!(m["tool"], "nhemitter");
    assert_eq!(m["command"], "bound-states");
    assert!(m["version"].is_string() && m["wall_time_s"].is_number());
    assert_eq!(m["config"]["emitter"]["g"], 0.8);
}

#[test]
fn classify_reports_spatial_decay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = HIDDEN.replace("\"delta0\": 0.3, \"gamma\": 1.0, \"g\": 0.8", "\"delta0\": 0.0, \"gamma\": 0.0, \"g\": 1.6");
    let r = run(dir.path(), "cl", "classify", &cfg, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let (h, rows) = table(&r.read("classify.csv"));
    assert_eq!(column(&h, &rows, "regime"), ["SpatialDecay"]);
    assert!(r.manifest("classify")["derived"].get("zeta_plus").is_some());
}

#[test]
fn evolve_writes_amplitudes_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"bath": "unidirectional", "kappa": 1, "length": 100, "boundary": "open",
        "emitter": {"g": 0.6, "x0": 0}, "time": {"t_max": 10, "steps": 11, "snapshot_every": 5}}"#;
    let r = run(dir.path(), "ev", "evolve", cfg, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let (h, rows) = table(&r.read("evolve.csv"));
    assert_eq!(h, ["t", "re_c_e", "im_c_e", "emitter_population", "photon_population", "ground_probability"]);
    assert_eq!(rows.len(), 11);
    let (h, rows) = table(&r.read("evolve-snapshots.csv"));
    assert_eq!(h, ["t", "x", "re_c_x", "im_c_x"]);
    // snapshots at t = 0, 5, 10
    assert_eq!(rows.len(), 3 * 100);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), "a", "bound-states", HIDDEN, &[]);
    let b = run(dir.path(), "b", "bound-states", HIDDEN, &[]);
    assert_eq!(a.read("bound-states.csv"), b.read("bound-states.csv"));
    let line = a.read("bound-states.csv").lines().nth(1).unwrap().to_string();
    // 17 significant digits in scientific notation
    assert!(line.split(',').nth(1).unwrap().contains("e-1"));
    assert_eq!(line.split(',').nth(1).unwrap().split('e').next().unwrap().len(), 18);
}

#[test]
fn manifest_alone_reproduces_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(dir.path(), "p1", "profile", HIDDEN, &["--set", "profile.t=7.5"]);
    assert_eq!(first.code(), 0, "{}", first.stderr());
    let config = serde_json::to_string_pretty(&first.manifest("profile")["config"]).unwrap();
    let second = run(dir.path(), "p2", "profile", &config, &[]);
    assert_eq!(second.code(), 0, "{}", second.stderr());
    assert_eq!(first.read("profile.csv"), second.read("profile.csv"));
}

#[test]
fn json_format_writes_json_tables() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), "j", "winding", HIDDEN, &["--format", "json"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let rows: Value = serde_json::from_str(&r.read("winding.json")).unwrap();
    assert_eq!(rows[0]["winding"].as_i64().map(i64::abs), Some(1));
    assert!(!r.out.join("winding.csv").exists());
}

#[test]
fn invalid_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let negative = HIDDEN.replace("\"kappa\": 1.0", "\"kappa\": -1.0");
    let r = run(dir.path(), "neg", "spectrum", &negative, &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("kappa"), "{}", r.stderr());

    let unknown = HIDDEN.replace("\"x0\": 200", "\"x0\": 200, \"detuning\": 1");
    let r = run(dir.path(), "unk", "spectrum", &unknown, &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("line 3"), "{}", r.stderr());

    let odd = r#"{"bath": "alternating_loss", "kappa": 1, "length": 401, "j_hop": 1, "emitter": {"g": 1.5, "x0": 0}}"#;
    assert_eq!(run(dir.path(), "odd", "eps", odd, &[]).code(), 2);

    // sweep without a sweep section, and with an empty value list
    assert_eq!(run(dir.path(), "nosweep", "sweep", HIDDEN, &[]).code(), 2);
    let empty = HIDDEN.replace("\"x0\": 200}", "\"x0\": 200}, \"sweep\": {\"params\": [{\"name\": \"g\", \"values\": []}]}");
    let r = run(dir.path(), "empty", "sweep", &empty, &[]);
    assert_eq!(r.code(), 2, "{}", r.stderr());
}

#[test]
fn numeric_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // the two poles coalesce at g = kappa / 2
    let cfg = r#"{"bath": "unidirectional", "kappa": 1, "length": 100, "boundary": "open",
        "emitter": {"g": 0.5, "x0": 0}, "profile": {"t": 5, "source": "analytic"}}"#;
    let r = run(dir.path(), "deg", "profile", cfg, &[]);
    assert_eq!(r.code(), 3, "{}", r.stderr());
}

const SWEEP: &str = r#"{
  "bath": "unidirectional", "kappa": 1.0, "length": 400, "boundary": "periodic",
  "emitter": {"delta0": 0.3, "gamma": 1.0, "g": 0.8, "x0": 200},
  "sweep": {"task": "bound-states", "params": [{"name": "g", "start": 0.1, "stop": 3.0, "points": 30}]}
}"#;

#[test]
fn coupling_sweep_pins_xi_and_lowers_the_weight() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), "sw", "sweep", SWEEP, &["--jobs", "4"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let (h, rows) = table(&r.read("sweep.csv"));
    assert_eq!(rows.len(), 30);
    let g: Vec<f64> = column(&h, &rows, "g").iter().map(|s| num(s)).collect();
    assert!(g.windows(2).all(|w| w[1] > w[0]), "row order follows the sweep");
    let xi: Vec<f64> = column(&h, &rows, "inside_xi").iter().map(|s| num(s)).collect();
    let reference = 1.0 / (1.0 / 0.34f64.sqrt()).ln();
    assert!(xi.iter().all(|x| (x / reference - 1.0).abs() < 0.01), "{xi:?}");
    let w: Vec<f64> = column(&h, &rows, "inside_emitter_weight").iter().map(|s| num(s)).collect();
    assert!(w.windows(2).all(|p| p[1] < p[0]), "{w:?}");
    assert!(column(&h, &rows, "error").iter().all(String::is_empty));

    let serial = run(dir.path(), "sw1", "sweep", SWEEP, &["--jobs", "1"]);
    assert_eq!(r.read("sweep.csv"), serial.read("sweep.csv"));
}

#[test]
fn sweep_records_failed_points_in_row() {
    let dir = tempfile::tempdir().unwrap();
    // a negative coupling fails validation for that point only
    let cfg = r#"{"bath": "unidirectional", "kappa": 1, "length": 100, "boundary": "open",
        "emitter": {"g": 0.6, "x0": 0},
        "sweep": {"task": "classify", "params": [{"name": "g", "values": [0.4, -1.0, 1.6]}]}}"#;
    let r = run(dir.path(), "mix", "sweep", cfg, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let (h, rows) = table(&r.read("sweep.csv"));
    let errors = column(&h, &rows, "error");
    assert!(errors[0].is_empty() && errors[2].is_empty());
    assert!(!errors[1].is_empty());
    assert_eq!(column(&h, &rows, "regime")[2], "SpatialDecay");

    let all_bad = cfg.replace("[0.4, -1.0, 1.6]", "[-1.0, -2.0]");
    assert_eq!(run(dir.path(), "bad", "sweep", &all_bad, &[]).code(), 3);
}

#[test]
fn two_parameter_sweeps_span_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"bath": "unidirectional", "kappa": 1, "length": 100, "boundary": "open",
        "emitter": {"g": 0.6, "x0": 0},
        "sweep": {"task": "classify", "params": [{"name": "g", "values": [0.3, 1.6]}, {"name": "delta0", "values": [0.0, 0.5, 1.0]}]}}"#;
    let r = run(dir.path(), "grid", "sweep", cfg, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let (h, rows) = table(&r.read("sweep.csv"));
    assert_eq!(rows.len(), 6);
    assert_eq!(column(&h, &rows, "delta0").iter().map(|s| num(s)).collect::<Vec<_>>(), [0.0, 0.5, 1.0, 0.0, 0.5, 1.0]);
}

use std::path::Path;
use std::process::{Command, Output};

use polydisc::io::{read_table, ConfigFile};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polydisc")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn meta_f64(path: &Path, key: &str) -> f64 {
    ConfigFile::read(path).unwrap().meta[key].as_f64().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn construct_kite_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let kite = dir.path().join("kite.json");
    let svg = dir.path().join("kite.svg");
    ok(&["construct", "--family", "kite4", "--out", p(&kite), "--svg", p(&svg)]);
    let file = ConfigFile::read(&kite).unwrap();
    assert_eq!(file.n, 4);
    let stored = meta_f64(&kite, "delta_bar");
    assert!((stored - 1.148748).abs() < 1e-6);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("class=\"diameter\""));

    let text = ok(&["evaluate", p(&kite)]);
    assert!(text.contains("class: OddCycleWithPendants"), "{text}");
    let resid: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("kkt_residual: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(resid < 1e-8);

    let json: serde_json::Value = serde_json::from_str(&ok(&["evaluate", p(&kite), "--json"])).unwrap();
    assert!((json["delta_bar"].as_f64().unwrap() - stored).abs() < 1e-12);
}

#[test]
fn construct_families() {
    let dir = tempfile::tempdir().unwrap();
    let arc = dir.path().join("arc.json");
    ok(&["construct", "--family", "arc", "--n", "18", "--out", p(&arc)]);
    assert!((meta_f64(&arc, "delta_bar") - 1.283184).abs() < 1e-6);

    let stdout = ok(&["construct", "--family", "dodecagon12"]);
    let file = ConfigFile::from_json(&stdout).unwrap();
    assert!((file.meta["delta_bar"].as_f64().unwrap() - 1.2901383629057280854).abs() < 1e-10);

    for (fam, n) in [("regular", "7"), ("hexagon6", "6"), ("sparse-arc", "24"), ("triwave", "64")] {
        let out = dir.path().join(format!("{fam}.json"));
        ok(&["construct", "--family", fam, "--n", n, "--out", p(&out)]);
        assert_eq!(ConfigFile::read(&out).unwrap().n.to_string(), n);
    }
}

#[test]
fn construct_errors() {
    assert_eq!(code(&["construct", "--family", "triwave", "--n", "7"]), 2);
    assert_eq!(code(&["construct", "--family", "arc", "--n", "10"]), 2);
    assert_eq!(code(&["construct", "--family", "bogus"]), 2);
    assert_eq!(code(&["construct", "--family", "kite4", "--n", "5"]), 2);
    assert_eq!(code(&["construct", "--family", "triwave", "--n", "8", "--amplitude", "1.0"]), 4);
    assert_eq!(code(&["construct", "--family", "kite4", "--out", "/nonexistent-dir/k.json"]), 3);
}

#[test]
fn evaluate_square_and_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let sq = dir.path().join("square.json");
    std::fs::write(&sq, r#"{"schema_version":1,"n":4,"points":[[1,0],[0,1],[-1,0],[0,-1]],"meta":{}}"#).unwrap();
    let text = ok(&["evaluate", p(&sq)]);
    assert!(text.contains("class: Disconnected"), "{text}");
    assert!(text.contains("connected: false"));

    let nan = dir.path().join("nan.json");
    std::fs::write(&nan, r#"{"schema_version":1,"n":1,"points":[[NaN,0]]}"#).unwrap();
    assert_eq!(code(&["evaluate", p(&nan)]), 2);
    assert_eq!(code(&["evaluate", p(&dir.path().join("missing.json"))]), 3);
}

#[test]
fn optimize_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let trace = dir.path().join("trace.csv");
    let base = ["optimize", "--n", "6", "--starts", "64", "--seed", "7"];
    ok(&[&base[..], &["--out", p(&a), "--trace-csv", p(&trace)]].concat());
    ok(&[&base[..], &["--out", p(&b)]].concat());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!((meta_f64(&a, "delta_bar") - 1.310854).abs() < 1e-5);
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("start,step,objective\n"));
    let starts: std::collections::BTreeSet<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(starts.len(), 64);
}

#[test]
fn optimize_with_star_graph() {
    let stdout = ok(&["optimize", "--n", "4", "--graph", "4;1-2,2-3,2-4", "--starts", "8"]);
    let file = ConfigFile::from_json(&stdout).unwrap();
    let achieved = file.meta["graph_achieved"].as_bool().unwrap();
    let value = file.meta["delta_bar"].as_f64().unwrap();
    assert!(!achieved || value < 1.148748 - 1e-6);
    assert_eq!(code(&["optimize", "--n", "4", "--graph", "4;1-9"]), 2);
    assert_eq!(code(&["optimize", "--n", "2"]), 2);
}

#[test]
fn table_arc_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    ok(&["table", "--n", "12,18,24", "--families", "arc", "--out", p(&out)]);
    let rows = read_table(std::fs::File::open(&out).unwrap()).unwrap();
    let col: Vec<f64> = rows.iter().map(|r| r.delta_bar_section4.unwrap()).collect();
    for (got, want) in col.iter().zip([1.290138, 1.283184, 1.281941]) {
        assert!((got - want).abs() < 1e-6);
    }
    for r in &rows {
        assert!(r.consistency_error() < 1e-9);
    }
    let csv = ok(&["table", "--n", "4", "--families", "optimize", "--starts", "16"]);
    let rows = read_table(csv.as_bytes()).unwrap();
    assert!((rows[0].delta_bar - 1.148748).abs() < 1e-6);
    assert!(rows[0].delta_bar_section4.is_none());
    assert_eq!(code(&["table", "--n"]), 2);
    assert_eq!(code(&["table", "--n", "8", "--families", "arc"]), 2);
}

#[test]
fn asym_commands() {
    let text = ok(&["asym", "Cstar"]);
    assert!(text.starts_with("Cstar: 1.304457"), "{text}");
    assert!(text.contains("alt route"));
    let json: serde_json::Value = serde_json::from_str(&ok(&["asym", "--converge", "1", "400", "--json"])).unwrap();
    assert!(json["abs_diff"].as_f64().unwrap() < 5e-3);
    let rk: serde_json::Value = serde_json::from_str(&ok(&["asym", "--rk", "4", "-2", "--json"])).unwrap();
    assert!((rk["re"].as_f64().unwrap() + 2.0).abs() < 1e-6);
    assert!(ok(&["asym", "--all"]).matches(" ok").count() == 6);
    assert_eq!(code(&["asym", "bogus"]), 2);
    assert_eq!(code(&["asym", "--converge", "7", "10"]), 2);
    assert_eq!(code(&["asym"]), 2);
}

#[test]
fn kkt_command() {
    let dir = tempfile::tempdir().unwrap();
    let kite = dir.path().join("kite.json");
    ok(&["construct", "--family", "kite4", "--out", p(&kite)]);
    let rep: serde_json::Value = serde_json::from_str(&ok(&["kkt", p(&kite)])).unwrap();
    assert_eq!(rep["passed"], serde_json::Value::Bool(true));
    assert_eq!(rep["active_set"].as_array().unwrap().len(), 4);
}

#[test]
fn threads_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_polydisc"))
        .args(["asym", "J"])
        .env("POLYDISC_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(code(&["--threads", "0", "asym", "J"]), 2);
    assert_eq!(code(&["--threads", "2", "asym", "J"]), 0);
}

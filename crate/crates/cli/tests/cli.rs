use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn balancemkt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_balancemkt")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn synth(dir: &Path) -> String {
    let path = dir.join("scenario.json");
    let o = balancemkt(&["synth", "--buses", "8", "--zones", "2", "--seed", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path.to_str().unwrap().to_string()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"{"seed": 5, "p_percent": [0.3], "time_stride": 12,
    "learning": {"learning_iterations": 30, "evaluation_iterations": 10}}"#;

#[test]
fn run_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = synth(tmp.path());
    let config = write_config(tmp.path(), SMALL);
    let bundle = tmp.path().join("bundle");
    let o = balancemkt(&["run", "--scenario", &scenario, "--config", &config, "--out", bundle.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(bundle.join("results.json").is_file());

    let report = tmp.path().join("report");
    let o = balancemkt(&["report", "--results", bundle.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    for f in ["summary.csv", "volumes.csv", "volume_boxplot.svg", "profit_by_technology.svg", "price_by_hour_p30.svg"] {
        assert!(report.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn compare_wind_writes_both_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = synth(tmp.path());
    let config = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("cmp");
    let o = balancemkt(&["compare-wind", "--scenario", &scenario, "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("gaussian/results.json").is_file());
    assert!(out.join("weibull/results.json").is_file());
    assert!(out.join("wind_summary.csv").is_file());
}

#[test]
fn invalid_input_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = synth(tmp.path());
    let config = write_config(tmp.path(), r#"{"seed": 1, "p_percent": []}"#);
    let o = balancemkt(&["run", "--scenario", &scenario, "--config", &config, "--out", "unused"]);
    assert_eq!(code(&o), 1);
    let config = write_config(tmp.path(), r#"{"seed": 1, "bogus": true}"#);
    let o = balancemkt(&["run", "--scenario", &scenario, "--config", &config, "--out", "unused"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn infeasible_scenario_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let path = synth(tmp.path());
    // every unit forced to full output cannot match the load
    let mut scenario: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    for g in scenario["generators"].as_array_mut().unwrap() {
        g["g_min"] = g["g_max"].clone();
    }
    fs::write(&path, scenario.to_string()).unwrap();
    let config = write_config(tmp.path(), SMALL);
    let o = balancemkt(&["run", "--scenario", &path, "--config", &config, "--out", tmp.path().join("b").to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn missing_file_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.json");
    let o = balancemkt(&["report", "--results", missing.to_str().unwrap(), "--out", "unused"]);
    assert_eq!(code(&o), 3);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schouten-lab"))
}

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

/// Reports with wall times removed.
fn stable(mut v: Value) -> Value {
    if let Some(rs) = v["reports"].as_array_mut() {
        for r in rs {
            r.as_object_mut().unwrap().remove("wall_time");
        }
    }
    v
}

#[test]
fn exit_codes() {
    let ok = run(&["poisson-verify", "--problem", problem("rigid_body.json").to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["pass"], Value::Bool(true));

    let bad = run(&["poisson-verify", "--problem", problem("not_poisson.json").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["pass"], Value::Bool(false));

    for args in [
        vec!["poisson-verify", "--problem", "/nonexistent/problem.json"],
        vec!["euler", "--checks", "no-such-check"],
        vec!["euler", "--eta", "1,1"],
        vec!["dirac", "--dim", "5"],
        vec!["poisson-verify"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn malformed_problem_files_are_infrastructure_errors() {
    let dir = std::env::temp_dir().join(format!("schouten-lab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (name, body, needle) in [
        ("syntax.json", "{\n  \"chart\": [\"x\",\n}", "line 3"),
        ("key.json", r#"{"chart": ["x"], "colour": 1}"#, "colour"),
        ("coord.json", r#"{"chart": ["x", "y"], "tensors": {"f": {"components": {"0": "w"}}}}"#, "w"),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, body).unwrap();
        let o = run(&["poisson-verify", "--problem", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{name}: {err}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn same_seed_same_report() {
    for args in [
        vec!["dirac", "--dim", "6", "--seed", "5"],
        vec!["euler", "--eta", "1,1,-1", "--checks", "triviality,normal-form,flow", "--samples", "8", "--seed", "3"],
        vec!["check-axioms", "--dim", "4", "--trials", "10", "--seed", "9"],
    ] {
        let a = run(&args);
        let b = run(&[args.clone(), vec!["--jobs", "1"]].concat());
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(stable(json(&a)), stable(json(&b)), "{args:?}");
    }
}

#[test]
fn report_layout_and_out_file() {
    let out = std::env::temp_dir().join(format!("schouten-lab-out-{}.json", std::process::id()));
    let o = run(&["homological-solve", "--problem", problem("canonical_plus_casimir.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    std::fs::remove_file(&out).unwrap();
    assert_eq!(v["tool"], "schouten-lab");
    assert_eq!(v["command"], "homological-solve");
    assert_eq!(v["ledger_hash"].as_str().unwrap().len(), 64);
    let r = &v["reports"][0];
    for key in ["check", "parameters", "grid", "per_point_residuals", "max_residual", "tolerance", "pass", "wall_time"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn problem_file_settings_and_overrides() {
    let p = problem("euler_indefinite.json");
    let o = run(&["euler", "--problem", p.to_str().unwrap(), "--checks", "casimir,first-order"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["seed"], 11);
    let names: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert!(names.iter().all(|n| n.starts_with("casimir") || *n == "first-order"), "{names:?}");
    let o = run(&["euler", "--problem", p.to_str().unwrap(), "--checks", "casimir", "--seed", "2"]);
    assert_eq!(json(&o)["seed"], 2);
}

#[test]
fn built_in_cases() {
    for args in [
        vec!["poisson-verify", "--case", "euler"],
        vec!["poisson-verify", "--case", "dirac"],
        vec!["homological-solve", "--case", "euler", "--eta", "1,1,-1"],
        vec!["homological-solve", "--case", "dirac"],
        vec!["dirac", "--demo"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

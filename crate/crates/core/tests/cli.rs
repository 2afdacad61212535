use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wgreedy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = r#"{
  "spaces": [{ "kind": "lp", "dim": 5, "p": 2 }, { "kind": "sup", "dim": 5 }],
  "weights": [{ "kind": "constant" }],
  "suites": ["almost-greedy-bound", "nu-counterexample"],
  "sample_plan": { "seed": 3, "random_count": 10 }
}"#;

#[test]
fn report_json_is_deterministic_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = run(&["report", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
    assert_eq!(v["config"]["sample_plan"]["seed"], 3);
}

#[test]
fn seed_override_changes_the_echo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let o = run(&["report", "--config", cfg.to_str().unwrap(), "--seed", "99", "--suite", "nu-counterexample"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["sample_plan"]["seed"], 99);
    assert_eq!(v["config"]["suites"], serde_json::json!(["nu-counterexample"]));
}

#[test]
fn csv_has_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let o = run(&["report", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check_id,space,weight,instances,max_ratio,bound,verdict"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.ends_with(",pass")));
    assert!(rows[0].starts_with("almost-greedy-bound,lp(p=2;dim=5),constant,"));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("4 pass, 0 fail"));

    let bad = write(dir.path(), "bad.json", r#"{"spaces":[{"kind":"lp","dim":4,"p":0.5}]}"#);
    let o = run(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("spaces[0].p"));

    let big = write(dir.path(), "big.json", r#"{"spaces":[{"kind":"lp","dim":30,"p":2}]}"#);
    let o = run(&["verify", "--config", big.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("guards.max_dim"));

    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--suite", "no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("suites[0]"));
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let out = dir.path().join("missing").join("r.json");
    let o = run(&["report", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn constants_greedy_and_sigma_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let o = run(&["constants", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["constants"].as_array().unwrap().len(), 2);
    assert_eq!(v["constants"][0]["democracy"]["value"], 1.0);

    let o = run(&["greedy", "--x", "1,-1,0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let result = &v["spaces"][0]["result"];
    assert_eq!(result["run"]["orderings"].as_array().unwrap().len(), 2);
    assert_eq!(result["residual_norms"][0][3], 0.0);

    let o = run(&["sigma", "--x", "3,2,1", "--budget", "2", "--mode", "expansional"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"][0]["result"]["value"], 1.0);
    assert_eq!(v["results"][0]["result"]["optimal_set"], serde_json::json!([1, 2]));

    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shipped_report_validates_against_schema() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let probe = Command::new("python3").args(["-c", "import jsonschema"]).output();
    if !probe.is_ok_and(|o| o.status.success()) {
        eprintln!("python3 with jsonschema not available; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{
          "spaces": [
            { "kind": "lp", "dim": 5, "p": "inf" },
            { "kind": "remark-mixed", "dim": 6, "weight": { "kind": "harmonic" } },
            { "kind": "custom-combination", "dim": 4, "components": [{ "p": "inf" }, { "p": "inf", "map": "tail-sums" }] }
          ],
          "weights": [{ "kind": "constant" }, { "kind": "geometric", "first": 0.5, "ratio": 0.5 }],
          "sample_plan": { "seed": 1, "random_count": 6 }
        }"#,
    );
    let out = dir.path().join("r.json");
    let o = run(&["report", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let script = "import json,sys,jsonschema\n\
                  s=json.load(open(sys.argv[1])); r=json.load(open(sys.argv[2]))\n\
                  jsonschema.Draft202012Validator(s).validate(r)\n";
    let o = Command::new("python3")
        .args(["-c", script, root.join("schema/report.schema.json").to_str().unwrap(), out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

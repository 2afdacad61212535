use wgreedy::config::{SpaceKindName, SpaceSpec};
use wgreedy::report::{render, to_csv, CSV_HEADER};
use wgreedy::{emit, parse_config, run, OutputFormat, RunConfig, Verdict};

fn lp2(dim: usize) -> SpaceSpec {
    SpaceSpec { kind: SpaceKindName::Lp, dim, p: Some(wgreedy::config::Exponent(2.0)), weight: None, components: None }
}

#[test]
fn nu_cell_yields_one_pass_record() {
    let mut cfg = RunConfig::for_spaces(vec![lp2(6)]);
    cfg.suites = vec!["nu-counterexample".into()];
    let r = run(&cfg).unwrap();
    assert_eq!(r.checks.len(), 1);
    assert_eq!(r.checks[0].verdict, Verdict::Pass);
    assert_eq!(r.summary.pass, 1);
    assert!(r.ok());
}

#[test]
fn empty_suites_give_constants_only() {
    let cfg = parse_config(r#"{"spaces":[{"kind":"lp","dim":6,"p":2}],"weights":[{"kind":"constant"}],"suites":[]}"#)
        .unwrap();
    let r = run(&cfg).unwrap();
    assert!(r.checks.is_empty());
    assert_eq!(r.constants.len(), 1);
    let csv = to_csv(&r).unwrap();
    assert_eq!(csv.trim_end(), CSV_HEADER.join(","));
}

#[test]
fn every_suite_appears_once_per_cell() {
    let cfg = parse_config(
        r#"{"spaces":[{"kind":"lp","dim":4,"p":1},{"kind":"sup","dim":4}],
            "weights":[{"kind":"constant"},{"kind":"harmonic"}],
            "suites":["all","truncation-bound"],
            "sample_plan":{"seed":5,"random_count":4}}"#,
    )
    .unwrap();
    let r = run(&cfg).unwrap();
    let ids = wgreedy::suite::CHECK_IDS;
    assert_eq!(r.checks.len(), 4 * ids.len());
    for (cell, chunk) in r.checks.chunks(ids.len()).enumerate() {
        let got: Vec<&str> = chunk.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(got, ids, "cell {cell}");
        assert!(chunk.iter().all(|c| c.space == chunk[0].space && c.weight == chunk[0].weight));
    }
    assert_eq!(r.summary.error, 0);
}

#[test]
fn json_is_sorted_and_round_trips_floats() {
    let mut cfg = RunConfig::for_spaces(vec![lp2(5)]);
    cfg.suites = vec!["almost-greedy-bound".into()];
    let r = run(&cfg).unwrap();
    let text = render(&r, OutputFormat::Json).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    fn sorted(v: &serde_json::Value) -> bool {
        match v {
            serde_json::Value::Object(m) => {
                let keys: Vec<&String> = m.keys().collect();
                keys.windows(2).all(|w| w[0] < w[1]) && m.values().all(sorted)
            }
            serde_json::Value::Array(a) => a.iter().all(sorted),
            _ => true,
        }
    }
    assert!(sorted(&v));
    let ratio = v["checks"][0]["max_ratio"].as_f64().unwrap();
    assert_eq!(ratio, r.checks[0].max_ratio.unwrap());
}

#[test]
fn emit_reports_io_failure() {
    let cfg = RunConfig::for_spaces(vec![lp2(3)]);
    let mut cfg = cfg;
    cfg.suites.clear();
    let r = run(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("no").join("such").join("r.csv");
    assert!(emit(&r, OutputFormat::Csv, Some(&bad)).is_err());
    let good = dir.path().join("r.csv");
    emit(&r, OutputFormat::Csv, Some(&good)).unwrap();
    assert!(std::fs::read_to_string(good).unwrap().starts_with("check_id,"));
}

//! Whole-run driver and report rendering.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::space::NormedSpace;
use crate::suite::{Cell, ConstantsTable, InequalityCheck, Verdict};
use crate::weight::Weight;

pub const CSV_HEADER: [&str; 7] = ["check_id", "space", "weight", "instances", "max_ratio", "bound", "verdict"];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub empirical_only: usize,
    pub not_applicable: usize,
    pub error: usize,
}

impl Summary {
    fn of(checks: &[InequalityCheck]) -> Self {
        let mut s = Summary::default();
        for c in checks {
            match c.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::EmpiricalOnly => s.empirical_only += 1,
                Verdict::NotApplicable => s.not_applicable += 1,
                Verdict::Error => s.error += 1,
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    /// The validated configuration, `"all"` expanded and the output path dropped.
    pub config: RunConfig,
    pub constants: Vec<ConstantsTable>,
    pub checks: Vec<InequalityCheck>,
    pub summary: Summary,
}

impl Report {
    /// True when no check failed or errored.
    pub fn ok(&self) -> bool {
        self.summary.fail == 0 && self.summary.error == 0
    }
}

/// Runs every configured check on every (space, weight) pair.
///
/// Cells run in parallel; output order is spaces, then weights, then the
/// configured check order, so the report does not depend on scheduling.
pub fn run(config: &RunConfig) -> Result<Report> {
    let mut config = config.clone();
    config.validate()?;
    config.output.path = None;
    let mut pairs: Vec<(NormedSpace, Weight)> = Vec::new();
    for s in &config.spaces {
        let space = s.build()?;
        for w in &config.weights {
            pairs.push((space.clone(), w.build(space.dim())?));
        }
    }
    let results: Vec<(ConstantsTable, Vec<InequalityCheck>)> = pairs
        .par_iter()
        .map(|(space, weight)| {
            let cell = Cell::new(space, weight, &config.sample_plan, config.suite_options.clone())?;
            let checks = config.suites.iter().map(|id| cell.run_check(id)).collect();
            Ok((cell.constants_table(), checks))
        })
        .collect::<Result<_>>()?;
    let mut constants = Vec::with_capacity(results.len());
    let mut checks = Vec::new();
    for (t, c) in results {
        constants.push(t);
        checks.extend(c);
    }
    Ok(Report {
        tool: "wgreedy".into(),
        version: crate::VERSION.into(),
        summary: Summary::of(&checks),
        config,
        constants,
        checks,
    })
}

/// Rebuilds every object with its keys in lexicographic order.
fn sorted(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sorted(v))).collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sorted).collect()),
        other => other,
    }
}

/// Pretty JSON with sorted keys.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&sorted(serde_json::to_value(value)?))?;
    s.push('\n');
    Ok(s)
}

fn number(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => serde_json::Number::from_f64(x).map(|n| n.to_string()).unwrap_or_default(),
        Some(x) if x > 0.0 => "inf".into(),
        Some(x) if x < 0.0 => "-inf".into(),
        Some(_) => "nan".into(),
        None => String::new(),
    }
}

/// One row per check.
pub fn to_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(io)?;
    for c in &report.checks {
        let verdict = serde_json::to_value(c.verdict)?;
        w.write_record([
            c.id.as_str(),
            c.space.as_str(),
            c.weight.as_str(),
            &c.instances.to_string(),
            &number(c.max_ratio),
            &number(c.bound),
            verdict.as_str().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn render(report: &Report, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => to_csv(report),
    }
}

/// Writes the rendered report to `path`, or to stdout when `path` is `None`.
pub fn emit(report: &Report, format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let text = render(report, format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

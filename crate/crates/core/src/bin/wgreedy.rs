use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use wgreedy::config::{OutputFormat, RunConfig, SpaceKindName, SpaceSpec};
use wgreedy::report::{self, Report};
use wgreedy::sigma::{sigma_w, SigmaMode};
use wgreedy::{load_config, CoefficientVector, Error, GreedyRun, TiePolicy};

#[derive(Parser)]
#[command(name = "wgreedy", version, about = "Weighted greedy approximation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Democracy-type constants and fundamental functions of every (space, weight) pair.
    Constants(Common),
    /// Greedy sums and residual norms of one vector under every admissible ordering.
    Greedy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        vector: VectorArgs,
    },
    /// Weighted best or expansional m-term error of one vector.
    Sigma {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        vector: VectorArgs,
        /// Measure budget u.
        #[arg(long)]
        budget: f64,
        #[arg(long, value_enum, default_value = "best")]
        mode: Mode,
    },
    /// Runs the checks and prints one line per check; exits 1 if any fails.
    Verify(Common),
    /// Runs the checks and writes the full report; exits 1 if any fails.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides sample_plan.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides output.format.
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated check ids, or "all".
    #[arg(long, value_delimiter = ',')]
    suite: Option<Vec<String>>,
}

#[derive(Args)]
struct VectorArgs {
    /// Coefficients, comma-separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    x: Vec<f64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    Best,
    Expansional,
}

impl Common {
    /// The config file with command-line overrides applied, or `fallback` without one.
    fn config(&self, fallback: impl FnOnce() -> Option<RunConfig>) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => fallback().ok_or_else(|| Error::InvalidInput("--config is required".into()))?,
        };
        if let Some(seed) = self.seed {
            cfg.sample_plan.seed = seed;
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.clone());
        }
        if let Some(s) = &self.suite {
            cfg.suites = s.iter().map(|id| id.trim().to_string()).filter(|id| !id.is_empty()).collect();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn default_for(x: &[f64]) -> Option<RunConfig> {
    Some(RunConfig::for_spaces(vec![SpaceSpec {
        kind: SpaceKindName::Lp,
        dim: x.len(),
        p: Some(wgreedy::config::Exponent(2.0)),
        weight: None,
        components: None,
    }]))
}

fn write_json<T: Serialize>(value: &T, cfg: &RunConfig) -> Result<(), Error> {
    let text = report::to_json(value)?;
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn entry<T: Serialize>(r: Result<T, Error>) -> serde_json::Value {
    match r {
        Ok(v) => serde_json::to_value(v).unwrap_or(serde_json::Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn greedy(common: &Common, x: &[f64]) -> Result<bool, Error> {
    let cfg = common.config(|| default_for(x))?;
    let v = CoefficientVector::new(x.to_vec())?;
    let mut out = Vec::new();
    for spec in &cfg.spaces {
        let space = spec.build()?;
        let result = GreedyRun::new(&v, &TiePolicy::All, 0.0, cfg.guards.tie_cap).and_then(|run| {
            let norms = run
                .steps
                .iter()
                .map(|steps| steps.iter().map(|s| space.norm_slice(&s.residual)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(json!({ "run": run, "residual_norms": norms }))
        });
        out.push(json!({ "space": space.label(), "result": entry(result) }));
    }
    write_json(&json!({ "x": x, "spaces": out }), &cfg)?;
    Ok(true)
}

fn sigma(common: &Common, x: &[f64], budget: f64, mode: Mode) -> Result<bool, Error> {
    let cfg = common.config(|| default_for(x))?;
    let v = CoefficientVector::new(x.to_vec())?;
    let mode = match mode {
        Mode::Best => SigmaMode::Best,
        Mode::Expansional => SigmaMode::Expansional,
    };
    let mut out = Vec::new();
    for spec in &cfg.spaces {
        let space = spec.build()?;
        for w in &cfg.weights {
            let weight = w.build(space.dim())?;
            let result = sigma_w(&space, &v, &weight, budget, mode);
            out.push(json!({ "space": space.label(), "weight": weight.label(), "result": entry(result) }));
        }
    }
    write_json(&json!({ "x": x, "budget": budget, "results": out }), &cfg)?;
    Ok(true)
}

fn constants(common: &Common) -> Result<bool, Error> {
    let mut cfg = common.config(|| None)?;
    cfg.suites.clear();
    let r = report::run(&cfg)?;
    write_json(&json!({ "tool": r.tool, "version": r.version, "constants": r.constants }), &cfg)?;
    Ok(true)
}

fn verify(common: &Common) -> Result<bool, Error> {
    let cfg = common.config(|| None)?;
    let r = report::run(&cfg)?;
    for c in &r.checks {
        let verdict = serde_json::to_value(c.verdict)?;
        let num = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
        println!(
            "{:<14} {:<36} {:<22} {:<20} ratio {} bound {}",
            verdict.as_str().unwrap_or_default(),
            c.id,
            c.space,
            c.weight,
            num(c.max_ratio),
            num(c.bound),
        );
    }
    let s = &r.summary;
    println!(
        "{} pass, {} fail, {} empirical-only, {} not-applicable, {} error",
        s.pass, s.fail, s.empirical_only, s.not_applicable, s.error
    );
    if cfg.output.path.is_some() {
        report::emit(&r, cfg.output.format, cfg.output.path.as_deref())?;
    }
    Ok(r.ok())
}

fn full_report(common: &Common) -> Result<bool, Error> {
    let cfg = common.config(|| None)?;
    let r: Report = report::run(&cfg)?;
    report::emit(&r, cfg.output.format, cfg.output.path.as_deref())?;
    Ok(r.ok())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Constants(c) => constants(c),
        Command::Greedy { common, vector } => greedy(common, &vector.x),
        Command::Sigma { common, vector, budget, mode } => sigma(common, &vector.x, *budget, *mode),
        Command::Verify(c) => verify(c),
        Command::Report(c) => full_report(c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

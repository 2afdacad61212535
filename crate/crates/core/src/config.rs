//! Run configuration: spaces, weights, suites, sample plan, guards, output.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::chebyshev;
use crate::error::{Error, Result};
use crate::greedy::DEFAULT_TIE_CAP;
use crate::sampling::SamplePlan;
use crate::space::{self, Component, NormedSpace, SpaceKind};
use crate::subsets::MAX_MASK_DIM;
use crate::suite::{SuiteOptions, CHECK_IDS};
use crate::weight::{TailRule, Weight};

/// Largest accepted `tie_cap`.
pub const MAX_TIE_CAP: usize = 40_320;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKindName {
    Lp,
    Sup,
    RemarkMixed,
    CustomCombination,
}

/// `p` as a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        space::ser_exponent(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        space::de_exponent(d).map(Exponent)
    }
}

/// One space of the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub kind: SpaceKindName,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    /// Weight inside the mixed norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Component>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKindName {
    Constant,
    Harmonic,
    Geometric,
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub kind: WeightKindName,
    /// First entry of a geometric weight (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailRule>,
}

impl WeightSpec {
    pub fn constant() -> Self {
        WeightSpec { kind: WeightKindName::Constant, first: None, ratio: None, entries: None, tail: None }
    }

    /// The weight with at least `dim` stored entries.
    pub fn build(&self, dim: usize) -> Result<Weight> {
        let w = match self.kind {
            WeightKindName::Constant => Weight::constant(dim),
            WeightKindName::Harmonic => Weight::harmonic(dim),
            WeightKindName::Geometric => {
                let ratio = self.ratio.ok_or_else(|| Error::InvalidWeight("geometric weight needs a ratio".into()))?;
                Weight::geometric(self.first.unwrap_or(1.0), ratio, dim)?
            }
            WeightKindName::Explicit => {
                let entries =
                    self.entries.clone().ok_or_else(|| Error::InvalidWeight("explicit weight needs entries".into()))?;
                Weight::with_tail(entries, self.tail.unwrap_or(TailRule::None))?
            }
        };
        w.prefix(dim)?;
        Ok(w)
    }
}

impl SpaceSpec {
    pub fn build(&self) -> Result<NormedSpace> {
        let kind = match self.kind {
            SpaceKindName::Lp => {
                let p = self.p.ok_or_else(|| Error::InvalidSpace("lp needs p".into()))?.0;
                if p.is_infinite() {
                    SpaceKind::Sup
                } else {
                    SpaceKind::Lp { p }
                }
            }
            SpaceKindName::Sup => SpaceKind::Sup,
            SpaceKindName::RemarkMixed => {
                let spec =
                    self.weight.as_ref().ok_or_else(|| Error::InvalidSpace("remark-mixed needs a weight".into()))?;
                let w = spec.build(self.dim)?;
                SpaceKind::RemarkMixed { weights: w.prefix(self.dim)? }
            }
            SpaceKindName::CustomCombination => SpaceKind::CustomCombination {
                components: self
                    .components
                    .clone()
                    .ok_or_else(|| Error::InvalidSpace("custom-combination needs components".into()))?,
            },
        };
        NormedSpace::make(kind, self.dim)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Guards {
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default = "default_max_support")]
    pub max_support: usize,
    #[serde(default = "default_tie_cap")]
    pub tie_cap: usize,
}

fn default_max_dim() -> usize {
    10
}

fn default_max_support() -> usize {
    chebyshev::MAX_SUPPORT
}

fn default_tie_cap() -> usize {
    DEFAULT_TIE_CAP
}

impl Default for Guards {
    fn default() -> Self {
        Guards { max_dim: default_max_dim(), max_support: default_max_support(), tie_cap: default_tie_cap() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?}, expected json or csv")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spaces: Vec<SpaceSpec>,
    #[serde(default = "default_weights")]
    pub weights: Vec<WeightSpec>,
    /// Check ids; the string `"all"` (alone or inside the list) selects every check.
    #[serde(default = "all_suites", deserialize_with = "suite_list")]
    pub suites: Vec<String>,
    #[serde(default)]
    pub sample_plan: SamplePlan,
    #[serde(default)]
    pub guards: Guards,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub suite_options: SuiteOptions,
}

fn default_weights() -> Vec<WeightSpec> {
    vec![WeightSpec::constant()]
}

fn all_suites() -> Vec<String> {
    CHECK_IDS.iter().map(|s| s.to_string()).collect()
}

fn suite_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    struct V;
    impl<'de> Visitor<'de> for V {
        type Value = Vec<String>;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("\"all\" or a list of check ids")
        }
        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Vec<String>, E> {
            Ok(vec![v.to_string()])
        }
        fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Vec<String>, A::Error> {
            let mut out = Vec::new();
            while let Some(s) = seq.next_element::<String>()? {
                out.push(s);
            }
            Ok(out)
        }
    }
    d.deserialize_any(V)
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

impl RunConfig {
    /// Default run over the given spaces.
    pub fn for_spaces(spaces: Vec<SpaceSpec>) -> Self {
        RunConfig {
            spaces,
            weights: default_weights(),
            suites: all_suites(),
            sample_plan: SamplePlan::default(),
            guards: Guards::default(),
            output: OutputSpec::default(),
            suite_options: SuiteOptions::default(),
        }
    }

    /// Checks guards, builds every space and weight once, and expands `"all"`.
    pub fn validate(&mut self) -> Result<()> {
        let g = &self.guards;
        if g.max_dim == 0 || g.max_dim > MAX_MASK_DIM {
            return Err(config_error(
                "guards.max_dim",
                format!("must be between 1 and {MAX_MASK_DIM}, got {}", g.max_dim),
            ));
        }
        if g.max_support == 0 || g.max_support > chebyshev::MAX_SUPPORT {
            return Err(config_error(
                "guards.max_support",
                format!("must be between 1 and {}, got {}", chebyshev::MAX_SUPPORT, g.max_support),
            ));
        }
        if g.tie_cap == 0 || g.tie_cap > MAX_TIE_CAP {
            return Err(config_error(
                "guards.tie_cap",
                format!("must be between 1 and {MAX_TIE_CAP}, got {}", g.tie_cap),
            ));
        }
        if self.suite_options.semi_greedy_max_m > g.max_support {
            return Err(config_error(
                "suite_options.semi_greedy_max_m",
                format!("exceeds guards.max_support = {}", g.max_support),
            ));
        }
        if self.spaces.is_empty() {
            return Err(config_error("spaces", "at least one space is required"));
        }
        if self.weights.is_empty() {
            return Err(config_error("weights", "at least one weight is required"));
        }
        if self.sample_plan.is_empty() {
            return Err(config_error("sample_plan", "random_count is 0 and structured is false"));
        }
        for (i, s) in self.spaces.iter().enumerate() {
            if s.dim > g.max_dim {
                return Err(config_error(
                    "guards.max_dim",
                    format!("spaces[{i}].dim = {} exceeds guards.max_dim = {}", s.dim, g.max_dim),
                ));
            }
            if let Some(Exponent(p)) = s.p {
                if !(p >= 1.0) {
                    return Err(config_error(format!("spaces[{i}].p"), format!("p must be >= 1, got {p}")));
                }
            }
            s.build().map_err(|e| config_error(format!("spaces[{i}]"), e.to_string()))?;
            for (j, w) in self.weights.iter().enumerate() {
                w.build(s.dim).map_err(|e| config_error(format!("weights[{j}]"), format!("for spaces[{i}]: {e}")))?;
            }
        }
        let mut resolved = Vec::new();
        for (i, id) in self.suites.iter().enumerate() {
            if id == "all" {
                resolved.extend(all_suites());
            } else if CHECK_IDS.contains(&id.as_str()) {
                resolved.push(id.clone());
            } else {
                return Err(config_error(format!("suites[{i}]"), format!("unknown check id {id:?}")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        resolved.retain(|id| seen.insert(id.clone()));
        self.suites = resolved;
        Ok(())
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_error(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
    })?;
    config.validate()?;
    Ok(config)
}

/// Reads `path` and returns a validated configuration with defaults filled.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

//! Inequality checks on finite instance families.
//!
//! Each check evaluates one explicit-constant inequality over every instance
//! of a sample plan (or every enumerated set) and records the largest observed
//! ratio against the bound. A `fail` is a refutation, a `pass` is coverage.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{self, DEFAULT_TOL};
use crate::constants::{self, ConstantEstimate, FundamentalFunctionTable};
use crate::error::Error;
use crate::greedy::admissible_supports;
use crate::sampling::{Instance, SamplePlan, Stream};
use crate::setfn::{self, SetFunction};
use crate::sigma::ResidualTable;
use crate::space::{basis_constant, BasisConstantEstimate, NormedSpace};
use crate::subsets::{self, mask_positions};
use crate::weight::{measure_slack, IndexSet, Weight};

/// Relative slack in `ratio ≤ bound`.
pub const RATIO_TOL: f64 = 1e-9;

pub const CHECK_IDS: [&str; 14] = [
    "quasi-greedy-from-almost-greedy",
    "democracy-from-almost-greedy",
    "almost-greedy-bound",
    "semi-greedy-bound",
    "truncation-bound",
    "superdemocracy-transfer",
    "weight-properties",
    "conservative-democracy",
    "c0-equivalence",
    "sign-unconditionality",
    "min-coefficient-bound",
    "fundamental-function-consistency",
    "lebesgue-profile",
    "nu-counterexample",
];

/// Largest set size whose sign patterns are enumerated.
pub const MAX_SIGNED_SET: usize = 8;
pub const MAX_SEMI_GREEDY_DIM: usize = 10;
pub const MAX_PROFILE_DIM: usize = 10;
const COEFFICIENT_SAMPLES: usize = 4;
const LARGE_GREEDY_THETAS: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    EmpiricalOnly,
    NotApplicable,
    Error,
}

impl Verdict {
    fn severity(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::NotApplicable => 1,
            Verdict::EmpiricalOnly => 2,
            Verdict::Fail => 3,
            Verdict::Error => 4,
        }
    }

    fn worst(self, other: Verdict) -> Verdict {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InputConstant {
    pub value: f64,
    pub exact: bool,
}

/// One inequality (or one invariant) inside a check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckPart {
    pub id: String,
    pub evaluations: u64,
    pub max_ratio: Option<f64>,
    pub bound: Option<f64>,
    pub worst_x: Option<Vec<f64>>,
    pub worst_set: Option<IndexSet>,
    pub outcome: Option<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: Option<f64>,
    pub reference: Option<f64>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub id: String,
    pub x_label: String,
    pub y_label: String,
    pub reference_label: Option<String>,
    pub points: Vec<CurvePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub id: String,
    pub space: String,
    pub weight: String,
    pub formula: String,
    pub inputs: BTreeMap<String, InputConstant>,
    pub instances: u64,
    pub skipped: u64,
    pub max_ratio: Option<f64>,
    pub bound: Option<f64>,
    pub parts: Vec<CheckPart>,
    pub curves: Vec<Curve>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteOptions {
    #[serde(default = "default_semi_greedy_max_m")]
    pub semi_greedy_max_m: usize,
    #[serde(default = "default_profile_max_m")]
    pub profile_max_m: usize,
    #[serde(default = "default_nu_universe")]
    pub nu_universe: usize,
}

fn default_semi_greedy_max_m() -> usize {
    3
}

fn default_profile_max_m() -> usize {
    6
}

fn default_nu_universe() -> usize {
    6
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            semi_greedy_max_m: default_semi_greedy_max_m(),
            profile_max_m: default_profile_max_m(),
            nu_universe: default_nu_universe(),
        }
    }
}

/// Why a check produced no ratios.
#[derive(Clone, Debug)]
enum Fault {
    NotApplicable(String),
    Broken(String),
}

impl From<Error> for Fault {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. } => Fault::NotApplicable(e.to_string()),
            other => Fault::Broken(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Fault>;

/// Running maximum of one ratio, first maximum wins.
#[derive(Clone, Debug, Default)]
struct Track {
    max: Option<f64>,
    count: u64,
    non_finite: u64,
    worst: Option<(Vec<f64>, u32)>,
}

impl Track {
    fn push(&mut self, r: f64, x: &[f64], mask: u32) {
        self.count += 1;
        if !r.is_finite() {
            self.non_finite += 1;
            return;
        }
        if self.max.is_none_or(|m| r > m) {
            self.max = Some(r);
            self.worst = Some((x.to_vec(), mask));
        }
    }

    fn merge(&mut self, other: Track) {
        self.count += other.count;
        self.non_finite += other.non_finite;
        if let Some(m) = other.max {
            if self.max.is_none_or(|s| m > s) {
                self.max = other.max;
                self.worst = other.worst;
            }
        }
    }

    fn part(self, id: &str, bound: Option<f64>) -> CheckPart {
        let verdict = if self.non_finite > 0 {
            Verdict::Error
        } else {
            match (self.max, bound) {
                (_, None) => Verdict::EmpiricalOnly,
                (None, Some(_)) => Verdict::Pass,
                (Some(m), Some(b)) if m <= b + RATIO_TOL * b.abs() => Verdict::Pass,
                _ => Verdict::Fail,
            }
        };
        let (worst_x, worst_set) = match self.worst {
            Some((x, mask)) => (Some(x), Some(IndexSet::from_mask(mask))),
            None => (None, None),
        };
        CheckPart {
            id: id.to_string(),
            evaluations: self.count,
            max_ratio: self.max,
            bound,
            worst_x: if x_is_useful(&worst_x) { worst_x } else { None },
            worst_set,
            outcome: (self.non_finite > 0).then(|| format!("{} non-finite ratios", self.non_finite)),
            verdict,
        }
    }
}

fn x_is_useful(x: &Option<Vec<f64>>) -> bool {
    x.as_ref().is_some_and(|v| !v.is_empty())
}

fn flag_part(id: &str, evaluations: u64, ok: bool, outcome: String) -> CheckPart {
    CheckPart {
        id: id.to_string(),
        evaluations,
        max_ratio: None,
        bound: None,
        worst_x: None,
        worst_set: None,
        outcome: Some(outcome),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    }
}

/// `num/den` with `0/0 = 1`; a positive numerator over zero is a bug.
fn ratio(num: f64, den: f64) -> Outcome<f64> {
    if den == 0.0 {
        if num == 0.0 {
            Ok(1.0)
        } else {
            Err(Fault::Broken(format!("ratio {num}/0 with the empty set admissible")))
        }
    } else {
        Ok(num / den)
    }
}

fn split(x: &[f64], mask: u32, kept: &mut [f64], rest: &mut [f64]) {
    for i in 0..x.len() {
        let inside = mask & (1 << i) != 0;
        kept[i] = if inside { x[i] } else { 0.0 };
        rest[i] = if inside { 0.0 } else { x[i] };
    }
}

fn not_applicable(msg: impl Into<String>) -> Fault {
    Fault::NotApplicable(msg.into())
}

fn signed(dim: usize, mask: u32, signs: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    for (j, p) in mask_positions(mask).into_iter().enumerate() {
        v[p] = signs(j);
    }
    v
}

/// Everything one (space, weight) pair needs, with constants computed once.
pub struct Cell<'a> {
    space: &'a NormedSpace,
    weight: &'a Weight,
    weights: Vec<f64>,
    plan: &'a SamplePlan,
    options: SuiteOptions,
    instances: OnceLock<Vec<Instance>>,
    quasi: OnceLock<Outcome<(ConstantEstimate, ConstantEstimate)>>,
    democracy_w: OnceLock<Outcome<ConstantEstimate>>,
    democracy_plain: OnceLock<Outcome<ConstantEstimate>>,
    superdemocracy_w: OnceLock<Outcome<ConstantEstimate>>,
    superdemocracy_plain: OnceLock<Outcome<ConstantEstimate>>,
    conservative: OnceLock<Outcome<ConstantEstimate>>,
    beta: OnceLock<Outcome<BasisConstantEstimate>>,
    table: OnceLock<Outcome<FundamentalFunctionTable>>,
}

fn cached<T: Clone>(slot: &OnceLock<Outcome<T>>, f: impl FnOnce() -> crate::Result<T>) -> Outcome<T> {
    slot.get_or_init(|| f().map_err(Fault::from)).clone()
}

fn input(c: &ConstantEstimate) -> InputConstant {
    InputConstant { value: c.value, exact: c.exact }
}

impl<'a> Cell<'a> {
    pub fn new(
        space: &'a NormedSpace,
        weight: &'a Weight,
        plan: &'a SamplePlan,
        options: SuiteOptions,
    ) -> crate::Result<Self> {
        Ok(Cell {
            weights: weight.prefix(space.dim())?,
            space,
            weight,
            plan,
            options,
            instances: OnceLock::new(),
            quasi: OnceLock::new(),
            democracy_w: OnceLock::new(),
            democracy_plain: OnceLock::new(),
            superdemocracy_w: OnceLock::new(),
            superdemocracy_plain: OnceLock::new(),
            conservative: OnceLock::new(),
            beta: OnceLock::new(),
            table: OnceLock::new(),
        })
    }

    pub fn space(&self) -> &NormedSpace {
        self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn instances(&self) -> &[Instance] {
        self.instances.get_or_init(|| self.plan.instances(self.dim(), &self.weights))
    }

    fn quasi(&self) -> Outcome<(ConstantEstimate, ConstantEstimate)> {
        cached(&self.quasi, || constants::quasi_greedy_constant(self.space, self.plan))
    }

    /// Two-sided quasi-greedy constant, the larger of `K_G` and `K_R`.
    fn k(&self) -> Outcome<InputConstant> {
        let (g, r) = self.quasi()?;
        Ok(InputConstant { value: g.value.max(r.value), exact: g.exact && r.exact })
    }

    fn d_w(&self) -> Outcome<ConstantEstimate> {
        cached(&self.democracy_w, || constants::democracy_constant_w(self.space, &self.weights))
    }

    fn d_plain(&self) -> Outcome<ConstantEstimate> {
        cached(&self.democracy_plain, || constants::democracy_constant_w(self.space, &vec![1.0; self.dim()]))
    }

    fn sd_w(&self) -> Outcome<ConstantEstimate> {
        cached(&self.superdemocracy_w, || {
            constants::superdemocracy_constant_w(self.space, &self.weights, self.plan.seed)
        })
    }

    fn sd_plain(&self) -> Outcome<ConstantEstimate> {
        cached(&self.superdemocracy_plain, || {
            constants::superdemocracy_constant_w(self.space, &vec![1.0; self.dim()], self.plan.seed)
        })
    }

    fn conservative(&self) -> Outcome<ConstantEstimate> {
        cached(&self.conservative, || constants::conservative_constant(self.space))
    }

    fn beta(&self) -> Outcome<BasisConstantEstimate> {
        cached(&self.beta, || basis_constant(self.space, self.plan))
    }

    fn beta_input(&self) -> Outcome<InputConstant> {
        let b = self.beta()?;
        Ok(InputConstant { value: b.value, exact: b.exact })
    }

    fn table(&self) -> Outcome<FundamentalFunctionTable> {
        cached(&self.table, || constants::fundamental_functions(self.space, &self.weights))
    }

    fn record(&self, id: &str, formula: &str) -> InequalityCheck {
        InequalityCheck {
            id: id.to_string(),
            space: self.space.label(),
            weight: self.weight.label(),
            formula: formula.to_string(),
            inputs: BTreeMap::new(),
            instances: 0,
            skipped: 0,
            max_ratio: None,
            bound: None,
            parts: Vec::new(),
            curves: Vec::new(),
            verdict: Verdict::Pass,
            note: None,
        }
    }

    /// Runs `f` on every plan instance in parallel; tracks merge in plan order.
    fn over_instances<F>(&self, parts: usize, f: F) -> Outcome<(Vec<Track>, u64)>
    where
        F: Fn(&[f64], &mut [Track]) -> Outcome<()> + Sync,
    {
        let instances = self.instances();
        let per: Vec<Outcome<Vec<Track>>> = instances
            .par_iter()
            .map(|inst| {
                let mut t = vec![Track::default(); parts];
                f(&inst.coefficients, &mut t)?;
                Ok(t)
            })
            .collect();
        let mut total = vec![Track::default(); parts];
        for p in per {
            for (acc, t) in total.iter_mut().zip(p?) {
                acc.merge(t);
            }
        }
        Ok((total, instances.len() as u64))
    }

    /// Runs one check by id; failures become the record's verdict.
    pub fn run_check(&self, id: &str) -> InequalityCheck {
        let result = match id {
            "quasi-greedy-from-almost-greedy" => self.quasi_from_almost_greedy(),
            "democracy-from-almost-greedy" => self.democracy_from_almost_greedy(),
            "almost-greedy-bound" => self.almost_greedy_bound(),
            "semi-greedy-bound" => self.semi_greedy_bound(),
            "truncation-bound" => self.truncation_bound(),
            "superdemocracy-transfer" => self.superdemocracy_transfer(),
            "weight-properties" => self.weight_properties(),
            "conservative-democracy" => self.conservative_democracy(),
            "c0-equivalence" => self.c0_equivalence(),
            "sign-unconditionality" => self.sign_unconditionality(),
            "min-coefficient-bound" => self.min_coefficient_bound(),
            "fundamental-function-consistency" => self.fundamental_consistency(),
            "lebesgue-profile" => self.lebesgue_profile(),
            "nu-counterexample" => self.nu_counterexample(),
            other => Err(Fault::Broken(format!("unknown check id {other:?}"))),
        };
        match result {
            Ok(c) => c,
            Err(fault) => {
                let mut c = self.record(id, "");
                let (verdict, note) = match fault {
                    Fault::NotApplicable(n) => (Verdict::NotApplicable, n),
                    Fault::Broken(n) => (Verdict::Error, n),
                };
                c.verdict = verdict;
                c.note = Some(note);
                c
            }
        }
    }

    fn quasi_from_almost_greedy(&self) -> Outcome<InequalityCheck> {
        let (k, d) = (self.k()?, self.d_w()?);
        let ag = 8.0 * k.value.powi(4) * d.value + k.value + 1.0;
        let mut c = self.record(
            "quasi-greedy-from-almost-greedy",
            "||G_m x|| <= (A + 1)||x|| and ||x - G_m x|| <= A||x||, A = 8K^4 D + K + 1",
        );
        c.inputs.insert("K".into(), k);
        c.inputs.insert("D".into(), input(&d));
        let (space, dim) = (self.space, self.dim());
        let (t, n) = self.over_instances(2, |x, t| {
            let nx = space.eval(x);
            if nx == 0.0 {
                return Ok(());
            }
            let (mut kept, mut rest) = (vec![0.0; dim], vec![0.0; dim]);
            for m in 0..=dim {
                for mask in admissible_supports(x, m, 0.0)? {
                    split(x, mask, &mut kept, &mut rest);
                    t[0].push(space.eval(&kept) / nx, x, mask);
                    t[1].push(space.eval(&rest) / nx, x, mask);
                }
            }
            Ok(())
        })?;
        c.instances = n;
        let mut t = t.into_iter();
        c.parts.push(t.next().unwrap().part("quasi-greedy", Some(ag + 1.0)));
        c.parts.push(t.next().unwrap().part("residual", Some(ag)));
        Ok(finish(c, k.exact && d.exact))
    }

    fn democracy_from_almost_greedy(&self) -> Outcome<InequalityCheck> {
        let (k, d) = (self.k()?, self.d_w()?);
        let ag = 8.0 * k.value.powi(4) * d.value + k.value + 1.0;
        let mut c = self.record("democracy-from-almost-greedy", "D_w <= 8K^4 D_w + K + 1");
        c.inputs.insert("K".into(), k);
        c.inputs.insert("D".into(), input(&d));
        c.instances = 1;
        let mut t = Track::default();
        t.push(d.value, &[], 0);
        c.parts.push(t.part("democracy", Some(ag)));
        Ok(finish(c, k.exact && d.exact))
    }

    fn almost_greedy_bound(&self) -> Outcome<InequalityCheck> {
        let (k, d) = (self.k()?, self.d_w()?);
        let bound = 8.0 * k.value.powi(4) * d.value + k.value + 1.0;
        let mut c =
            self.record("almost-greedy-bound", "||x - G_m x|| <= (8K^4 D + K + 1) expansional_sigma_{w(Lambda_m)}(x)");
        c.inputs.insert("K".into(), k);
        c.inputs.insert("D".into(), input(&d));
        let (space, weights, dim) = (self.space, &self.weights, self.dim());
        let (t, n) = self.over_instances(1, |x, t| {
            let mut table = ResidualTable::new(space, x, weights)?;
            let nx = table.norm_x();
            for m in 1..=dim {
                for mask in admissible_supports(x, m, 0.0)? {
                    let num = table.expansional_value(mask);
                    let (den, _) = table.expansional(table.measure(mask));
                    if den > nx {
                        return Err(Fault::Broken(format!("expansional value {den} exceeds ||x|| = {nx}")));
                    }
                    t[0].push(ratio(num, den)?, x, mask);
                }
            }
            Ok(())
        })?;
        c.instances = n;
        c.parts.push(t.into_iter().next().unwrap().part("almost-greedy", Some(bound)));
        Ok(finish(c, k.exact && d.exact))
    }

    fn semi_greedy_bound(&self) -> Outcome<InequalityCheck> {
        let dim = self.dim();
        if dim > MAX_SEMI_GREEDY_DIM {
            return Err(not_applicable(format!(
                "dimension {dim} exceeds the limit {MAX_SEMI_GREEDY_DIM} for this check"
            )));
        }
        let max_m = self.options.semi_greedy_max_m.min(dim);
        if max_m > chebyshev::MAX_SUPPORT {
            return Err(not_applicable(format!(
                "semi_greedy_max_m {max_m} exceeds the Chebyshev support limit {}",
                chebyshev::MAX_SUPPORT
            )));
        }
        let (k, d) = (self.k()?, self.d_w()?);
        let kv = k.value;
        let bound = 1.0 + 3.0 * kv + 16.0 * kv.powi(3) * d.value;
        let mut c = self.record(
            "semi-greedy-bound",
            "||x - Chebyshev_m x|| <= (1 + 3K + 16K^3 D) sigma_{w(Lambda_m)}(x); \
             ||x - G_m x|| <= (1 + 3K + 16K^3 D) sigma_{w(Lambda_m)}(x) + 2K |a_rho(m)| ||1_Lambda_m||",
        );
        c.inputs.insert("K".into(), k);
        c.inputs.insert("D".into(), input(&d));
        let (space, weights) = (self.space, &self.weights);
        let (t, n) = self.over_instances(2, |x, t| {
            let mut table = ResidualTable::new(space, x, weights)?.with_tol(DEFAULT_TOL);
            let nx = table.norm_x();
            for m in 1..=max_m {
                for mask in admissible_supports(x, m, 0.0)? {
                    let u = table.measure(mask);
                    let refined = table.best_on(mask)?;
                    let (sigma, _) = table.best(u)?;
                    let (tilde, _) = table.expansional(u);
                    if !(sigma <= tilde && tilde <= nx) {
                        return Err(Fault::Broken(format!(
                            "sigma {sigma} <= expansional {tilde} <= ||x|| {nx} violated"
                        )));
                    }
                    t[0].push(ratio(refined, sigma)?, x, mask);
                    let lead = mask_positions(mask).iter().map(|&i| x[i].abs()).fold(f64::INFINITY, f64::min);
                    let ind = signed(dim, mask, |_| 1.0);
                    let rhs = bound * sigma + 2.0 * kv * lead * space.eval(&ind);
                    t[1].push(ratio(table.expansional_value(mask), rhs)?, x, mask);
                }
            }
            Ok(())
        })?;
        c.instances = n;
        let mut t = t.into_iter();
        c.parts.push(t.next().unwrap().part("semi-greedy", Some(bound)));
        c.parts.push(t.next().unwrap().part("greedy-residual", Some(1.0)));
        c.note = Some(format!("m <= {max_m}"));
        Ok(finish(c, k.exact && d.exact))
    }

    fn truncation_bound(&self) -> Outcome<InequalityCheck> {
        let k = self.k()?;
        let bound = 1.0 + 3.0 * k.value;
        let mut c = self.record("truncation-bound", "||sum f_M(a_n) e_n|| <= (1 + 3K)||x||");
        c.inputs.insert("K".into(), k);
        let space = self.space;
        let (t, n) = self.over_instances(1, |x, t| {
            let nx = space.eval(x);
            if nx == 0.0 {
                return Ok(());
            }
            let mut levels: Vec<f64> = x.iter().map(|a| a.abs()).filter(|&a| a > 0.0).collect();
            levels.sort_by(f64::total_cmp);
            levels.dedup();
            let half_min = levels[0] / 2.0;
            levels.push(half_min);
            for level in levels {
                let clipped: Vec<f64> = x.iter().map(|a| a.clamp(-level, level)).collect();
                t[0].push(space.eval(&clipped) / nx, x, 0);
            }
            Ok(())
        })?;
        c.instances = n;
        let t = t.into_iter().next().unwrap();
        if self.space.one_unconditional() {
            c.parts.push(t.clone().part("truncation", Some(bound)));
            c.parts.push(t.part("lattice-contraction", Some(1.0)));
        } else {
            c.parts.push(t.part("truncation", Some(bound)));
        }
        Ok(finish(c, k.exact))
    }

    fn superdemocracy_transfer(&self) -> Outcome<InequalityCheck> {
        let (sd_w, sd) = (self.sd_w()?, self.sd_plain()?);
        let top = self.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let alpha = self.weights.iter().copied().fold(f64::INFINITY, f64::min) / top;
        if !(alpha > 0.0) {
            return Err(not_applicable("the weight prefix has a zero infimum"));
        }
        let mut c = self.record(
            "superdemocracy-transfer",
            "D_bar_w <= C (1 + alpha)/alpha and C <= max(2/alpha^2, 2 D_bar_w/alpha), alpha = min w / max w",
        );
        c.inputs.insert("D_bar".into(), input(&sd_w));
        c.inputs.insert("C".into(), input(&sd));
        c.inputs.insert("alpha".into(), InputConstant { value: alpha, exact: true });
        c.instances = 2;
        let mut to_w = Track::default();
        to_w.push(sd_w.value, &[], 0);
        let mut to_plain = Track::default();
        to_plain.push(sd.value, &[], 0);
        c.parts.push(to_w.part("to-weighted", Some(sd.value * (1.0 + alpha) / alpha)));
        c.parts.push(to_plain.part("to-plain", Some((2.0 / (alpha * alpha)).max(2.0 * sd_w.value / alpha))));
        Ok(finish(c, sd_w.exact && sd.exact))
    }

    fn weight_properties(&self) -> Outcome<InequalityCheck> {
        let dim = self.dim();
        if dim > constants::MAX_DEMOCRACY_DIM {
            return Err(not_applicable(format!("dimension {dim} exceeds the enumeration limit")));
        }
        let (k, d, beta) = (self.k()?, self.d_w()?, self.beta_input()?);
        let semi = 1.0 + 3.0 * k.value + 16.0 * k.value.powi(3) * d.value;
        let bound = 2.0 * beta.value * semi;
        let mut c = self.record(
            "weight-properties",
            "max_signs ||sum_A +-e_n|| <= 2 beta K_semi, K_semi = 1 + 3K + 16K^3 D, \
             for A with two later indices of larger combined weight or an earlier index of larger weight",
        );
        c.inputs.insert("K".into(), k);
        c.inputs.insert("D".into(), input(&d));
        c.inputs.insert("beta".into(), beta);
        let w = &self.weights;
        let slack = measure_slack(w);
        let sums = subsets::all_mask_sums(w);
        let masks: Vec<u32> = (1..1u32 << dim).collect();
        let per: Vec<Option<(f64, u32)>> = masks
            .par_iter()
            .map(|&mask| {
                if mask.count_ones() as usize > MAX_SIGNED_SET {
                    return None;
                }
                let top = 31 - mask.leading_zeros() as usize;
                let low = mask.trailing_zeros() as usize;
                let mut later: Vec<f64> = w[top + 1..].to_vec();
                later.sort_by(|a, b| b.total_cmp(a));
                let pair_fits = later.len() >= 2 && sums[mask as usize] <= later[0] + later[1] + slack;
                let earlier_fits = w[..low].iter().any(|&e| sums[mask as usize] <= e + slack);
                if !(pair_fits || earlier_fits) {
                    return None;
                }
                let (hi, ..) = constants::sign_extremes(self.space, mask, 0);
                Some((hi, mask))
            })
            .collect();
        let mut t = Track::default();
        for (hi, mask) in per.iter().flatten() {
            t.push(*hi, &[], *mask);
        }
        c.skipped = per.iter().filter(|p| p.is_none()).count() as u64;
        c.instances = t.count;
        c.parts.push(t.part("signed-sets", Some(bound)));
        Ok(finish(c, k.exact && d.exact && beta.exact))
    }

    fn c0_weight_gate(&self) -> Outcome<()> {
        if self.weight.decays_to_zero() {
            Ok(())
        } else {
            Err(not_applicable(format!("weight {} does not tend to zero", self.weight.label())))
        }
    }

    fn conservative_democracy(&self) -> Outcome<InequalityCheck> {
        self.c0_weight_gate()?;
        let (cons, d, beta, d_plain) = (self.conservative()?, self.d_w()?, self.beta_input()?, self.d_plain()?);
        let (cv, dv) = (cons.value, d.value);
        let mut c = self.record(
            "conservative-democracy",
            "||1_A|| <= D when w({min A..dim}) < w_1; plain D <= 2 C D beta; ||1_A|| <= C D",
        );
        c.inputs.insert("C".into(), input(&cons));
        c.inputs.insert("D".into(), input(&d));
        c.inputs.insert("beta".into(), beta);
        c.inputs.insert("D_plain".into(), input(&d_plain));
        let dim = self.dim();
        let w = &self.weights;
        let slack = measure_slack(w);
        let norms = constants::indicator_norms(self.space);

        // tail sets: every A with min A >= first, where the whole tail from `first` weighs less than w_1
        let mut tail = vec![0.0; dim + 1];
        for i in (0..dim).rev() {
            tail[i] = tail[i + 1] + w[i];
        }
        let first = (1..dim).find(|&i| tail[i] < w[0]);
        let mut bounded = Track::default();
        if let Some(first) = first {
            for mask in 1..1u32 << dim {
                if mask.trailing_zeros() as usize >= first {
                    bounded.push(norms[mask as usize], &[], mask);
                }
            }
        }

        // Γ after position t with k elements and w(Γ) ≤ w_1
        let gamma = |t: usize, k: usize| -> bool {
            if t == 0 || dim - t < k {
                return false;
            }
            let mut later = w[t..].to_vec();
            later.sort_by(f64::total_cmp);
            later[..k].iter().sum::<f64>() <= w[0] + slack
        };
        // best[t][k]: max ‖1_A‖ over A ⊆ {1..t}, |A| ≤ k; least[t][k]: min ‖1_B‖ over B ⊆ {1..t}, |B| = k
        let mut best = vec![vec![(f64::NEG_INFINITY, 0u32); dim + 1]; dim + 1];
        let mut least = vec![vec![(f64::INFINITY, 0u32); dim + 1]; dim + 1];
        for mask in 0..1u32 << dim {
            let t = 32 - mask.leading_zeros() as usize;
            let k = mask.count_ones() as usize;
            let n = norms[mask as usize];
            if n > best[t][k].0 {
                best[t][k] = (n, mask);
            }
            if n < least[t][k].0 {
                least[t][k] = (n, mask);
            }
        }
        for t in 0..=dim {
            for k in 0..=dim {
                let mut b = best[t][k];
                if t > 0 && best[t - 1][k].0 > b.0 {
                    b = best[t - 1][k];
                }
                if k > 0 && best[t][k - 1].0 > b.0 {
                    b = best[t][k - 1];
                }
                best[t][k] = b;
                if t > 0 && least[t - 1][k].0 < least[t][k].0 {
                    least[t][k] = least[t - 1][k];
                }
            }
        }
        let binom = |n: usize, r: usize| -> u64 {
            if r > n {
                return 0;
            }
            (0..r).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
        };
        // ordered pairs (A, B) with |A| ≤ |B| = k inside {1..t}
        let pairs_within = |t: usize, k: usize| -> u64 { binom(t, k) * (0..=k).map(|j| binom(t, j)).sum::<u64>() };
        let mut democracy = Track::default();
        let (mut covered, mut total) = (0u64, 0u64);
        for t in 1..=dim {
            for k in 1..=t {
                let exactly = pairs_within(t, k) - pairs_within(t - 1, k);
                total += exactly;
                if gamma(t, k) {
                    covered += exactly;
                    let (n, a) = best[t][k];
                    let (m, b) = least[t][k];
                    democracy.push(n / m, &signed(dim, a, |_| 1.0), b);
                }
            }
        }
        let mut indicator = Track::default();
        let mut indicator_skipped = 0u64;
        for mask in 1..1u32 << dim {
            let t = 32 - mask.leading_zeros() as usize;
            if gamma(t, mask.count_ones() as usize) {
                indicator.push(norms[mask as usize], &[], mask);
            } else {
                indicator_skipped += 1;
            }
        }
        c.instances = indicator.count + (1u64 << dim) - 1;
        c.skipped = (total - covered) + indicator_skipped;
        c.parts.push(bounded.part("bounded-tail-sets", Some(dv)));
        c.parts.push(democracy.part("democracy", Some(2.0 * cv * dv * beta.value)));
        c.parts.push(indicator.part("indicator-bound", Some(cv * dv)));
        let mut full = Track::default();
        full.push(d_plain.value, &[], 0);
        c.parts.push(full.part("plain-democracy", Some(2.0 * cv * dv * beta.value)));
        c.note = Some(format!(
            "tail sets start at index {}; {} of {} democracy pairs and {} sets lack a heavy-free set to their right",
            first.map_or("none".to_string(), |f| (f + 1).to_string()),
            total - covered,
            total,
            indicator_skipped
        ));
        Ok(finish(c, cons.exact && d.exact && beta.exact && d_plain.exact))
    }

    fn c0_equivalence(&self) -> Outcome<InequalityCheck> {
        self.c0_weight_gate()?;
        let (k, cons, d, beta) = (self.k()?, self.conservative()?, self.d_w()?, self.beta_input()?);
        if !(k.exact && cons.exact && d.exact && beta.exact) {
            return Err(not_applicable("gate constants are not exact"));
        }
        let dim = self.dim();
        let w = &self.weights;
        let slack = measure_slack(w);
        // longest trailing block (at most MAX_SIGNED_SET long, not containing 1) lighter than w_1
        let mut len = 0;
        let mut mass = 0.0;
        while len < MAX_SIGNED_SET.min(dim - 1) && mass + w[dim - 1 - len] <= w[0] + slack {
            mass += w[dim - 1 - len];
            len += 1;
        }
        if len == 0 {
            return Err(not_applicable("no trailing block is lighter than the first weight"));
        }
        let start = dim - len;
        let block: u32 = (start..dim).fold(0, |m, i| m | (1 << i));
        let (upper, ..) = constants::sign_extremes(self.space, block, 0);
        let lower = if self.space.one_unconditional() {
            1.0
        } else {
            let mut low = f64::INFINITY;
            for j in start..dim {
                let mut e = vec![0.0; dim];
                e[j] = 1.0;
                let others: Vec<usize> = (start..dim).filter(|&i| i != j).collect();
                let r = chebyshev::solve(self.space, &e, &others, DEFAULT_TOL, false)?;
                low = low.min(r.value);
            }
            low
        };
        let upper_bound =
            if self.space.one_unconditional() { cons.value * d.value } else { 2.0 * k.value * cons.value * d.value };
        let mut c = self.record(
            "c0-equivalence",
            "(1/(2 beta)) max|a_n| <= ||sum_block a_n e_n|| <= C D max|a_n| (2K C D without sign invariance)",
        );
        c.inputs.insert("K".into(), k);
        c.inputs.insert("C".into(), input(&cons));
        c.inputs.insert("D".into(), input(&d));
        c.inputs.insert("beta".into(), beta);
        c.instances = 1u64 << (len - 1);
        let mut up = Track::default();
        up.push(upper, &[], block);
        let mut lo = Track::default();
        lo.push(1.0 / lower, &[], block);
        c.parts.push(up.part("upper", Some(upper_bound)));
        c.parts.push(lo.part("lower-inverse", Some(2.0 * beta.value)));
        c.note = Some(format!("block {}; upper constant {upper}, lower constant {lower}", IndexSet::from_mask(block)));
        Ok(finish(c, true))
    }

    fn sign_unconditionality(&self) -> Outcome<InequalityCheck> {
        let dim = self.dim();
        if dim > constants::MAX_DEMOCRACY_DIM {
            return Err(not_applicable(format!("dimension {dim} exceeds the enumeration limit")));
        }
        let k = self.k()?;
        let bound = 2.0 * k.value;
        let mut c = self.record(
            "sign-unconditionality",
            "(1/(2K))||1_A|| <= ||sum_A eps_n e_n|| <= 2K ||1_A||, |A| <= 8, all signs",
        );
        c.inputs.insert("K".into(), k);
        let space = self.space;
        let masks: Vec<u32> = (1..1u32 << dim).filter(|m| m.count_ones() as usize <= MAX_SIGNED_SET).collect();
        let per: Vec<[Track; 2]> = masks
            .par_iter()
            .map(|&mask| {
                let size = mask.count_ones();
                let plain = space.eval(&signed(dim, mask, |_| 1.0));
                let mut t: [Track; 2] = Default::default();
                for bits in 0..1u32 << size {
                    let v = signed(dim, mask, |j| if bits & (1 << j) != 0 { -1.0 } else { 1.0 });
                    let n = space.eval(&v);
                    t[0].push(n / plain, &v, mask);
                    t[1].push(plain / n, &v, mask);
                }
                t
            })
            .collect();
        let (mut upper, mut lower) = (Track::default(), Track::default());
        for [u, l] in per {
            upper.merge(u);
            lower.merge(l);
        }
        c.instances = masks.len() as u64;
        c.skipped = ((1u64 << dim) - 1) - c.instances;
        c.parts.push(upper.part("upper", Some(bound)));
        c.parts.push(lower.part("lower", Some(bound)));
        Ok(finish(c, k.exact))
    }

    fn min_coefficient_bound(&self) -> Outcome<InequalityCheck> {
        let dim = self.dim();
        if dim > constants::MAX_DEMOCRACY_DIM {
            return Err(not_applicable(format!("dimension {dim} exceeds the enumeration limit")));
        }
        let k = self.k()?;
        let (kv, space, seed) = (k.value, self.space, self.plan.seed);
        let mut c = self.record(
            "min-coefficient-bound",
            "||1_A|| min_A|a_n| <= 4K^2 ||sum_A a_n e_n||; ||sum_A a_n e_n|| <= 2K ||1_A|| max|a_n|; \
             a_n(x) ||1_{Lambda_n}|| <= 4K^2 ||x||",
        );
        c.inputs.insert("K".into(), k);
        let masks: Vec<u32> = (1..1u32 << dim).filter(|m| m.count_ones() as usize <= MAX_SIGNED_SET).collect();
        let per: Vec<[Track; 2]> = masks
            .par_iter()
            .map(|&mask| {
                let ind = space.eval(&signed(dim, mask, |_| 1.0));
                let mut rng = Stream::new(seed ^ (mask as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let mut t: [Track; 2] = Default::default();
                for s in 0..COEFFICIENT_SAMPLES {
                    let size = mask.count_ones() as usize;
                    let coeffs: Vec<f64> = (0..size)
                        .map(|_| {
                            let sign = rng.sign();
                            if s % 2 == 0 {
                                sign * (0.1 + rng.uniform())
                            } else if rng.uniform() < 0.5 {
                                sign
                            } else {
                                2.0 * sign
                            }
                        })
                        .collect();
                    let v = signed(dim, mask, |j| coeffs[j]);
                    let n = space.eval(&v);
                    let lo = coeffs.iter().fold(f64::INFINITY, |m, a| m.min(a.abs()));
                    let hi = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
                    t[0].push(ind * lo / n, &v, mask);
                    t[1].push(n / (ind * hi), &v, mask);
                }
                t
            })
            .collect();
        let (mut minimal, mut bounded) = (Track::default(), Track::default());
        for [a, b] in per {
            minimal.merge(a);
            bounded.merge(b);
        }
        let (t, n) = self.over_instances(1, |x, t| {
            let nx = space.eval(x);
            if nx == 0.0 {
                return Ok(());
            }
            for m in 1..=dim {
                for mask in admissible_supports(x, m, 0.0)? {
                    let lead = mask_positions(mask).iter().map(|&i| x[i].abs()).fold(f64::INFINITY, f64::min);
                    let ind = space.eval(&signed(dim, mask, |_| 1.0));
                    t[0].push(lead * ind / nx, x, mask);
                }
            }
            Ok(())
        })?;
        c.instances = masks.len() as u64 * COEFFICIENT_SAMPLES as u64 + n;
        c.parts.push(minimal.part("set-coefficients", Some(4.0 * kv * kv)));
        c.parts.push(bounded.part("bounded-coefficients", Some(2.0 * kv)));
        c.parts.push(t.into_iter().next().unwrap().part("greedy-prefix", Some(4.0 * kv * kv)));
        Ok(finish(c, k.exact))
    }

    fn fundamental_consistency(&self) -> Outcome<InequalityCheck> {
        let (table, d) = (self.table()?, self.d_w()?);
        let mut c = self.record(
            "fundamental-function-consistency",
            "phi_sup and phi_inf nondecreasing; phi_sup(u) <= D phi_inf(u)",
        );
        c.inputs.insert("D".into(), input(&d));
        let (mut sup_mono, mut inf_mono, mut ratio_t) = (Track::default(), Track::default(), Track::default());
        for i in 1..table.grid.len() {
            let (a, b) = (table.phi_sup[i - 1], table.phi_sup[i]);
            sup_mono.push(ratio(a, b)?, &[], 0);
            if let (Some(a), Some(b)) = (table.phi_inf[i - 1], table.phi_inf[i]) {
                inf_mono.push(ratio(a, b)?, &[], 0);
            }
        }
        for (s, i) in table.phi_sup.iter().zip(&table.phi_inf) {
            if let Some(i) = i {
                ratio_t.push(ratio(*s, *i)?, &[], 0);
            }
        }
        c.instances = table.grid.len() as u64;
        c.parts.push(ratio_t.part("sup-below-inf", Some(d.value)));
        c.parts.push(sup_mono.part("phi-sup-nondecreasing", Some(1.0)));
        c.parts.push(inf_mono.part("phi-inf-nondecreasing", Some(1.0)));
        Ok(finish(c, d.exact))
    }

    fn lebesgue_profile(&self) -> Outcome<InequalityCheck> {
        let dim = self.dim();
        if dim > MAX_PROFILE_DIM {
            return Err(not_applicable(format!("dimension {dim} exceeds the limit {MAX_PROFILE_DIM} for this check")));
        }
        let table = self.table()?;
        let profile = constants::democracy_profile(self.space, &self.weights)?;
        let k = self.k()?;
        let max_m = self.options.profile_max_m.min(dim);
        let (space, weights) = (self.space, &self.weights);
        let ones = vec![1.0; dim];
        let grid: Vec<f64> = (1..=dim / 2).map(|j| weights[..j].iter().sum()).collect();
        // track layout
        let greedy_exp = 0;
        let budget = greedy_exp + max_m;
        let half = budget + max_m;
        let proj = half + max_m;
        let plain = proj + dim;
        let weighted = plain + max_m;
        let large = weighted + grid.len();
        let invariant = large + LARGE_GREEDY_THETAS.len();
        let total = invariant + 1;
        let scale = 1.0 + RATIO_TOL;
        let (t, n) = self.over_instances(total, |x, t| {
            let nx = space.eval(x);
            if nx == 0.0 {
                return Ok(());
            }
            let mut table_w = ResidualTable::new(space, x, weights)?;
            let mut table_1 = ResidualTable::new(space, x, &ones)?;
            let ok = |cond: bool, t: &mut [Track]| t[invariant].push(if cond { 0.0 } else { 1.0 }, x, 0);
            for m in 1..=max_m {
                for mask in admissible_supports(x, m, 0.0)? {
                    let num = table_w.expansional_value(mask);
                    let u = table_w.measure(mask);
                    let (tilde, _) = table_w.expansional(u);
                    let (sigma, _) = table_w.best(u)?;
                    let (sigma_half, _) = table_w.best(u / 2.0)?;
                    ok(sigma <= tilde && tilde <= nx, t);
                    ok(sigma <= sigma_half * scale + DEFAULT_TOL * nx, t);
                    t[greedy_exp + m - 1].push(ratio(num, tilde)?, x, mask);
                    t[budget + m - 1].push(u, x, mask);
                    t[half + m - 1].push(ratio(num, sigma_half)?, x, mask);
                }
                let (tilde, _) = table_1.expansional(m as f64);
                let (sigma, _) = table_1.best(m as f64)?;
                ok(sigma <= tilde && tilde <= nx, t);
                t[plain + m - 1].push(ratio(tilde, sigma)?, x, 0);
            }
            let (mut kept, mut rest) = (vec![0.0; dim], vec![0.0; dim]);
            for mask in 1..1u32 << dim {
                split(x, mask, &mut kept, &mut rest);
                t[proj + mask.count_ones() as usize - 1].push(space.eval(&kept) / nx, x, mask);
            }
            for (j, &u) in grid.iter().enumerate() {
                let (tilde, _) = table_w.expansional(2.0 * u);
                let (sigma, _) = table_w.best(u)?;
                t[weighted + j].push(ratio(tilde, sigma)?, x, 0);
            }
            let support = x.iter().filter(|a| **a != 0.0).count();
            for (j, theta) in LARGE_GREEDY_THETAS.iter().enumerate() {
                let from = ((theta * support as f64).ceil() as usize).max(1);
                for m in from..=support {
                    for mask in admissible_supports(x, m, 0.0)? {
                        split(x, mask, &mut kept, &mut rest);
                        t[large + j].push(space.eval(&kept) / nx, x, mask);
                    }
                }
            }
            Ok(())
        })?;
        let slack = measure_slack(weights);
        let point =
            |x: f64, tr: &Track, reference: Option<f64>| CurvePoint { x, y: tr.max, reference, count: tr.count };
        let curve = |id: &str, xl: &str, yl: &str, rl: Option<&str>, points: Vec<CurvePoint>| Curve {
            id: id.to_string(),
            x_label: xl.to_string(),
            y_label: yl.to_string(),
            reference_label: rl.map(str::to_string),
            points,
        };
        let mut c =
            self.record("lebesgue-profile", "empirical ratio curves; constants in these inequalities are unspecified");
        c.inputs.insert("K".into(), k);
        c.instances = n;
        c.curves.push(curve(
            "greedy-vs-expansional",
            "m",
            "max ||x - G_m x|| / expansional_sigma_{w(Lambda_m)}(x)",
            Some("v(max w(Lambda_m))"),
            (1..=max_m)
                .map(|m| {
                    let u = t[budget + m - 1].max;
                    let v = u.map(|u| constants::profile_at(&profile, u, slack));
                    point(m as f64, &t[greedy_exp + m - 1], v)
                })
                .collect(),
        ));
        c.curves.push(curve(
            "projection-growth",
            "|Lambda|",
            "max ||S_Lambda x|| / ||x|| over all Lambda",
            Some("ln(|Lambda| + 1)"),
            (1..=dim).map(|m| point(m as f64, &t[proj + m - 1], Some(((m + 1) as f64).ln()))).collect(),
        ));
        c.curves.push(curve(
            "expansional-vs-best",
            "m",
            "max expansional_sigma_m(x) / sigma_m(x), unweighted",
            Some("ln(m + 1)"),
            (1..=max_m).map(|m| point(m as f64, &t[plain + m - 1], Some(((m + 1) as f64).ln()))).collect(),
        ));
        c.curves.push(curve(
            "weighted-expansional-vs-best",
            "u",
            "max expansional_sigma_{2u}(x) / sigma_u(x)",
            Some("1 + phi_sup(u) / phi_inf(u)"),
            grid.iter()
                .enumerate()
                .map(|(j, &u)| {
                    let r = table.phi_inf_at(u).map(|inf| 1.0 + table.phi_sup_at(u) / inf);
                    point(u, &t[weighted + j], r)
                })
                .collect(),
        ));
        c.curves.push(curve(
            "greedy-vs-half-budget",
            "m",
            "max ||x - G_m x|| / sigma_{w(Lambda_m)/2}(x)",
            None,
            (1..=max_m).map(|m| point(m as f64, &t[half + m - 1], None)).collect(),
        ));
        c.curves.push(curve(
            "large-greedy-projection",
            "theta",
            "max ||G_n x|| / ||x|| over n >= theta |supp x|",
            None,
            LARGE_GREEDY_THETAS.iter().enumerate().map(|(j, &theta)| point(theta, &t[large + j], None)).collect(),
        ));
        let inv = &t[invariant];
        let violations = inv.max.unwrap_or(0.0);
        let finite = t.iter().all(|tr| tr.non_finite == 0);
        c.parts.push(flag_part(
            "sigma-invariants",
            inv.count,
            violations == 0.0,
            if violations == 0.0 {
                "sigma <= expansional sigma <= ||x|| and sigma monotone in the budget".to_string()
            } else {
                "sigma ordering or budget monotonicity violated".to_string()
            },
        ));
        c.parts.push(flag_part(
            "finite-ratios",
            t.iter().map(|tr| tr.count).sum(),
            finite,
            if finite { "all ratios finite".to_string() } else { "non-finite ratio".to_string() },
        ));
        let broken = c.parts.iter().any(|p| p.verdict != Verdict::Pass);
        c.verdict = if broken { Verdict::Fail } else { Verdict::EmpiricalOnly };
        Ok(c)
    }

    fn nu_counterexample(&self) -> Outcome<InequalityCheck> {
        let universe = self.options.nu_universe;
        let nu = SetFunction::Nu;
        let monotone = setfn::check_strict_monotone(&nu, universe)?;
        let star = setfn::check_property_star(&nu, universe)?;
        let rep = setfn::weight_representable(&nu, 3, 1.0)?;
        let mut c = self.record(
            "nu-counterexample",
            "nu strictly monotone, nu(A) <= nu(B) implies nu(A \\ B) <= nu(B \\ A), and no weight represents nu on {1,2,3}",
        );
        let subsets = 1u64 << universe;
        c.instances = subsets;
        c.parts.push(flag_part("strict-monotone", subsets * universe as u64, monotone.holds(), format!("{monotone}")));
        c.parts.push(flag_part("property-star", subsets * subsets, star.holds(), format!("{star}")));
        c.parts.push(flag_part(
            "representable",
            8,
            !rep.is_feasible(),
            if rep.is_feasible() { "feasible".into() } else { "infeasible".into() },
        ));
        c.note = Some(format!("universe {{1..{universe}}}"));
        Ok(finish(c, true))
    }
}

/// A constant or the reason it is unavailable for this cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Entry<T> {
    Value(T),
    Unavailable { unavailable: String },
}

impl<T> From<Outcome<T>> for Entry<T> {
    fn from(o: Outcome<T>) -> Self {
        match o {
            Ok(v) => Entry::Value(v),
            Err(Fault::NotApplicable(m) | Fault::Broken(m)) => Entry::Unavailable { unavailable: m },
        }
    }
}

/// Constants of one (space, weight) pair, with exactness flags.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub space: String,
    pub weight: String,
    pub dim: usize,
    pub one_unconditional: bool,
    pub quasi_greedy_g: Entry<ConstantEstimate>,
    pub quasi_greedy_r: Entry<ConstantEstimate>,
    pub democracy_w: Entry<ConstantEstimate>,
    pub democracy: Entry<ConstantEstimate>,
    pub superdemocracy_w: Entry<ConstantEstimate>,
    pub superdemocracy: Entry<ConstantEstimate>,
    pub conservative: Entry<ConstantEstimate>,
    pub basis_constant: Entry<BasisConstantEstimate>,
    pub fundamental_functions: Entry<FundamentalFunctionTable>,
}

impl Cell<'_> {
    pub fn constants_table(&self) -> ConstantsTable {
        let quasi = self.quasi();
        ConstantsTable {
            space: self.space.label(),
            weight: self.weight.label(),
            dim: self.dim(),
            one_unconditional: self.space.one_unconditional(),
            quasi_greedy_g: quasi.clone().map(|q| q.0).into(),
            quasi_greedy_r: quasi.map(|q| q.1).into(),
            democracy_w: self.d_w().into(),
            democracy: self.d_plain().into(),
            superdemocracy_w: self.sd_w().into(),
            superdemocracy: self.sd_plain().into(),
            conservative: self.conservative().into(),
            basis_constant: self.beta().into(),
            fundamental_functions: self.table().into(),
        }
    }
}

/// Sets the headline ratio and the overall verdict from the parts.
fn finish(mut c: InequalityCheck, exact: bool) -> InequalityCheck {
    if let Some(p) = c.parts.first() {
        c.max_ratio = p.max_ratio;
        c.bound = p.bound;
    }
    let mut verdict = c.parts.iter().fold(Verdict::Pass, |v, p| v.worst(p.verdict));
    if !exact && matches!(verdict, Verdict::Pass | Verdict::Fail) {
        verdict = Verdict::EmpiricalOnly;
        let note = "bound uses sampled lower estimates of an input constant";
        c.note = Some(match c.note.take() {
            Some(n) => format!("{n}; {note}"),
            None => note.to_string(),
        });
    }
    c.verdict = verdict;
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(space: &NormedSpace, weight: &Weight, id: &str) -> InequalityCheck {
        let plan = SamplePlan { seed: 3, random_count: 30, structured: true };
        Cell::new(space, weight, &plan, SuiteOptions::default()).unwrap().run_check(id)
    }

    #[test]
    fn every_id_runs_on_lp2() {
        let s = NormedSpace::lp(2.0, 5).unwrap();
        let w = Weight::constant(5);
        for id in CHECK_IDS {
            let c = run(&s, &w, id);
            assert!(
                matches!(c.verdict, Verdict::Pass | Verdict::NotApplicable | Verdict::EmpiricalOnly),
                "{id}: {c:?}"
            );
        }
    }

    #[test]
    fn lp2_almost_greedy_ratio_is_one() {
        let s = NormedSpace::lp(2.0, 6).unwrap();
        let c = run(&s, &Weight::constant(6), "almost-greedy-bound");
        assert_eq!(c.verdict, Verdict::Pass);
        assert!((c.max_ratio.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(c.bound, Some(10.0));
    }

    #[test]
    fn gates() {
        let s = NormedSpace::lp(2.0, 5).unwrap();
        let w = Weight::constant(5);
        assert_eq!(run(&s, &w, "conservative-democracy").verdict, Verdict::NotApplicable);
        assert_eq!(run(&s, &w, "c0-equivalence").verdict, Verdict::NotApplicable);
        assert_eq!(run(&s, &w, "no-such-check").verdict, Verdict::Error);
    }

    #[test]
    fn summing_norm_is_empirical() {
        use crate::space::{Component, CoordinateMap};
        let s = NormedSpace::custom(
            vec![
                Component { p: f64::INFINITY, weights: None, map: CoordinateMap::Identity },
                Component { p: f64::INFINITY, weights: None, map: CoordinateMap::TailSums },
            ],
            5,
        )
        .unwrap();
        let c = run(&s, &Weight::constant(5), "truncation-bound");
        assert_eq!(c.verdict, Verdict::EmpiricalOnly);
        assert!(!c.inputs["K"].exact);
    }

    #[test]
    fn nu_check_passes() {
        let s = NormedSpace::lp(2.0, 3).unwrap();
        let c = run(&s, &Weight::constant(3), "nu-counterexample");
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
    }
}

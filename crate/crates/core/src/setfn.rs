//! Set functions on finite index sets: weight-induced measures, the
//! three-point counterexample `ν`, and rational lookup tables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;

use num_integer_free::lcm;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, Row, Q};
use crate::subsets::{self, ordered_masks};
use crate::weight::{measure_slack, IndexSet, Weight};

pub type Rational = Ratio<i64>;

/// Largest universe for the exhaustive pair checks.
pub const MAX_PAIR_UNIVERSE: usize = 12;
/// Largest universe for the representability system.
pub const MAX_REPRESENTABLE_UNIVERSE: usize = 6;
/// Up to this universe representability is decided in exact arithmetic.
pub const EXACT_REPRESENTABLE_UNIVERSE: usize = 3;

/// `ν` on subsets of `{1,2,3}`, indexed by bitmask.
pub fn nu_base(mask: u32) -> Rational {
    let r = Rational::new;
    match mask & 0b111 {
        0b000 => r(0, 1),
        0b001 | 0b010 | 0b100 => r(1, 4),
        0b011 => r(5, 16),
        0b110 => r(3, 8),
        0b101 => r(7, 16),
        _ => r(1, 2),
    }
}

/// `ν(A) = ν(A ∩ {1,2,3}) + |A \ {1,2,3}|`.
pub fn nu_eval(set: &IndexSet) -> Rational {
    let mut low = 0u32;
    let mut high = 0i64;
    for &i in set.indices() {
        if i <= 3 {
            low |= 1 << (i - 1);
        } else {
            high += 1;
        }
    }
    nu_base(low) + Rational::from_integer(high)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SetFunction {
    WeightInduced(Weight),
    /// Strictly monotone with Property (*) yet not induced by any weight; see [`nu_eval`].
    Nu,
    /// Explicit values; every subset of the universe under test must be present
    /// except `∅`, which defaults to `0`.
    Table(BTreeMap<IndexSet, Rational>),
}

/// Values of a set function on all subsets of `{1..n}`, indexed by mask.
enum Values {
    /// Integers sharing one positive denominator, compared exactly.
    Exact(Vec<i128>),
    Float {
        values: Vec<f64>,
        slack: f64,
    },
}

impl Values {
    #[inline]
    fn cmp(&self, a: u32, b: u32) -> Ordering {
        match self {
            Values::Exact(v) => v[a as usize].cmp(&v[b as usize]),
            Values::Float { values, slack } => {
                let (x, y) = (values[a as usize], values[b as usize]);
                if (x - y).abs() <= *slack {
                    Ordering::Equal
                } else {
                    x.partial_cmp(&y).unwrap_or(Ordering::Equal)
                }
            }
        }
    }
}

/// Outcome of an exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CheckOutcome {
    Holds,
    Violated { a: IndexSet, b: IndexSet },
}

impl CheckOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, CheckOutcome::Holds)
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckOutcome::Holds => write!(f, "holds"),
            CheckOutcome::Violated { a, b } => write!(f, "violated at A = {a}, B = {b}"),
        }
    }
}

/// Result of the representability decision.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Representability {
    /// `weights` realizes the order with every strict gap at least `epsilon`.
    Feasible {
        weights: Vec<f64>,
        exact: bool,
    },
    Infeasible {
        exact: bool,
    },
}

impl Representability {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Representability::Feasible { .. })
    }
}

fn parse_set_key(key: &str) -> Result<IndexSet> {
    let k = key.trim().trim_start_matches('{').trim_end_matches('}').trim();
    if k.is_empty() {
        return Ok(IndexSet::empty());
    }
    let idx = k
        .split(',')
        .map(|t| {
            t.trim().parse::<usize>().map_err(|_| Error::InvalidSetFunction(format!("bad index {t:?} in key {key:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    IndexSet::new(idx).map_err(|e| Error::InvalidSetFunction(format!("key {key:?}: {e}")))
}

impl SetFunction {
    /// Builds a table from `{"1,3": "7/16", ...}` JSON.
    pub fn table_from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text)?;
        let mut table = BTreeMap::new();
        for (k, v) in raw {
            let set = parse_set_key(&k)?;
            let value: Rational = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSetFunction(format!("value {v:?} for {k:?} is not a rational")))?;
            if value.is_negative() {
                return Err(Error::InvalidSetFunction(format!("value for {k:?} is negative")));
            }
            if set.is_empty() && !value.is_zero() {
                return Err(Error::InvalidSetFunction("value of the empty set must be 0".into()));
            }
            if table.insert(set, value).is_some() {
                return Err(Error::InvalidSetFunction(format!("duplicate key {k:?}")));
            }
        }
        Ok(SetFunction::Table(table))
    }

    pub fn load_table(path: &Path) -> Result<Self> {
        Self::table_from_json(&std::fs::read_to_string(path)?)
    }

    /// `ν` restricted to subsets of `{1..universe}` as an editable table.
    pub fn nu_table(universe: usize) -> Result<Self> {
        guard(universe, MAX_PAIR_UNIVERSE, "set-function universe")?;
        let table = ordered_masks(universe)
            .into_iter()
            .map(|m| {
                let s = IndexSet::from_mask(m);
                let v = nu_eval(&s);
                (s, v)
            })
            .collect();
        Ok(SetFunction::Table(table))
    }

    /// `A ↦ |A|` as a table on `{1..universe}`.
    pub fn cardinality_table(universe: usize) -> Result<Self> {
        guard(universe, MAX_PAIR_UNIVERSE, "set-function universe")?;
        Ok(SetFunction::Table(
            ordered_masks(universe)
                .into_iter()
                .map(|m| (IndexSet::from_mask(m), Rational::from_integer(m.count_ones() as i64)))
                .collect(),
        ))
    }

    /// Single value, exact where possible.
    pub fn value(&self, set: &IndexSet) -> Result<f64> {
        match self {
            SetFunction::WeightInduced(w) => w.measure(set),
            SetFunction::Nu => Ok(ratio_to_f64(nu_eval(set))),
            SetFunction::Table(t) => table_value(t, set).map(ratio_to_f64),
        }
    }

    fn values(&self, universe: usize) -> Result<Values> {
        let n = 1usize << universe;
        match self {
            SetFunction::WeightInduced(w) => {
                let prefix = w.prefix(universe)?;
                Ok(Values::Float { values: subsets::all_mask_sums(&prefix), slack: measure_slack(&prefix) })
            }
            SetFunction::Nu => {
                // denominators divide 16
                Ok(Values::Exact(
                    (0..n as u32)
                        .map(|m| {
                            let v = nu_eval(&IndexSet::from_mask(m)) * Rational::from_integer(16);
                            *v.numer() as i128
                        })
                        .collect(),
                ))
            }
            SetFunction::Table(t) => {
                let vals =
                    (0..n as u32).map(|m| table_value(t, &IndexSet::from_mask(m))).collect::<Result<Vec<_>>>()?;
                let mut den: i128 = 1;
                for v in &vals {
                    den = lcm(den, *v.denom() as i128)
                        .ok_or_else(|| Error::InvalidSetFunction("common denominator overflows".into()))?;
                }
                Ok(Values::Exact(vals.iter().map(|v| *v.numer() as i128 * (den / *v.denom() as i128)).collect()))
            }
        }
    }
}

fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn table_value(t: &BTreeMap<IndexSet, Rational>, set: &IndexSet) -> Result<Rational> {
    match t.get(set) {
        Some(v) => Ok(*v),
        None if set.is_empty() => Ok(Rational::zero()),
        None => Err(Error::InvalidSetFunction(format!("no value for {set}"))),
    }
}

fn guard(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::GuardExceeded { what, limit, got: n });
    }
    Ok(())
}

/// Finds the first pair in `(A, B)` canonical order failing `bad`.
fn first_violation(universe: usize, bad: impl Fn(u32, u32) -> bool + Sync) -> CheckOutcome {
    let order = ordered_masks(universe);
    let hit =
        order.par_iter().enumerate().find_map_first(|(_, &a)| order.iter().find(|&&b| bad(a, b)).map(|&b| (a, b)));
    match hit {
        Some((a, b)) => CheckOutcome::Violated { a: IndexSet::from_mask(a), b: IndexSet::from_mask(b) },
        None => CheckOutcome::Holds,
    }
}

/// Exhaustively checks `f(A) ≤ f(B) ⇒ f(A\B) ≤ f(B\A)` over all ordered pairs
/// of subsets of `{1..universe}`.
pub fn check_property_star(f: &SetFunction, universe: usize) -> Result<CheckOutcome> {
    guard(universe, MAX_PAIR_UNIVERSE, "property (*) universe")?;
    let v = f.values(universe)?;
    Ok(first_violation(universe, |a, b| v.cmp(a, b) != Ordering::Greater && v.cmp(a & !b, b & !a) == Ordering::Greater))
}

/// Checks `A ⊊ B ⇒ f(A) < f(B)` on subsets of `{1..universe}`.
///
/// Strictness along every single-element extension is equivalent to
/// strictness on all nested pairs, so only those pairs are visited; the
/// witness is the first failing extension in canonical order.
pub fn check_strict_monotone(f: &SetFunction, universe: usize) -> Result<CheckOutcome> {
    guard(universe, MAX_PAIR_UNIVERSE, "monotonicity universe")?;
    let v = f.values(universe)?;
    Ok(first_violation(universe, |a, b| b & a == a && (b & !a).count_ones() == 1 && v.cmp(a, b) != Ordering::Less))
}

/// Decides whether some weight `w` satisfies `f(A) ≤ f(B) ⇔ w(A) ≤ w(B)` on
/// subsets of `{1..universe}`, with every strict gap at least `epsilon` and
/// `w_i ≥ epsilon`.
///
/// Sets are sorted by `f`; consecutive links (plus one closing link per block
/// of equal values) generate the same cone as all pairwise constraints.
pub fn weight_representable(f: &SetFunction, universe: usize, epsilon: f64) -> Result<Representability> {
    guard(universe, MAX_REPRESENTABLE_UNIVERSE, "representability universe")?;
    if universe == 0 {
        return Err(Error::InvalidInput("universe must be at least 1".into()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let v = f.values(universe)?;
    let mut order = ordered_masks(universe);
    order.sort_by(|&a, &b| v.cmp(a, b));
    // (lhs mask, rhs mask, margin): w(lhs) + margin ≤ w(rhs)
    let mut links: Vec<(u32, u32, i128)> = Vec::new();
    let mut block_start = 0;
    for k in 1..=order.len() {
        let closes = k == order.len() || v.cmp(order[k - 1], order[k]) == Ordering::Less;
        if closes {
            if k - 1 > block_start {
                links.push((order[k - 1], order[block_start], 0));
            }
            if k < order.len() {
                links.push((order[k - 1], order[k], 1));
            }
            block_start = k;
        } else {
            links.push((order[k - 1], order[k], 0));
        }
    }
    let coeff = |m: u32, i: usize| -> i128 { ((m >> i) & 1) as i128 };
    // w(lhs) - w(rhs) ≤ -margin, and -w_i ≤ -1
    let mut rows: Vec<Row<Q>> = links
        .iter()
        .map(|&(l, r, margin)| Row {
            coeffs: (0..universe).map(|i| Q::from_integer(coeff(l, i) - coeff(r, i))).collect(),
            rhs: Q::from_integer(-margin),
        })
        .collect();
    for i in 0..universe {
        let mut c = vec![Q::zero(); universe];
        c[i] = Q::from_integer(-1);
        rows.push(Row { coeffs: c, rhs: Q::from_integer(-1) });
    }
    if universe <= EXACT_REPRESENTABLE_UNIVERSE {
        return Ok(match lp::fourier_motzkin(&rows, universe) {
            Some(x) => Representability::Feasible {
                weights: x.iter().map(|q| epsilon * (*q.numer() as f64 / *q.denom() as f64)).collect(),
                exact: true,
            },
            None => Representability::Infeasible { exact: true },
        });
    }
    // substitute w = 1 + u with u ≥ 0
    let frows: Vec<Row<f64>> = rows[..links.len()]
        .iter()
        .map(|r| {
            let c: Vec<f64> = r.coeffs.iter().map(|q| *q.numer() as f64).collect();
            let shift: f64 = c.iter().sum();
            Row { rhs: *r.rhs.numer() as f64 - shift, coeffs: c }
        })
        .collect();
    Ok(match lp::simplex_feasible(&frows, universe) {
        Some(u) => {
            let w: Vec<f64> = u.iter().map(|x| 1.0 + x).collect();
            let ok = links
                .iter()
                .all(|&(l, r, margin)| subsets::mask_sum(&w, l) - subsets::mask_sum(&w, r) <= -(margin as f64) + 1e-7);
            if !ok {
                return Err(Error::Internal("simplex returned a point violating the system".into()));
            }
            Representability::Feasible { weights: w.iter().map(|x| x * epsilon).collect(), exact: false }
        }
        None => Representability::Infeasible { exact: false },
    })
}

mod num_integer_free {
    fn gcd(mut a: i128, mut b: i128) -> i128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }

    pub fn lcm(a: i128, b: i128) -> Option<i128> {
        (a / gcd(a, b)).checked_mul(b)
    }
}

//! Democracy-type constants by enumeration, fundamental functions, and
//! sampled lower bounds for the greedy-type constants.

use rayon::prelude::*;
use serde::Serialize;

use crate::chebyshev::{self, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::greedy::admissible_supports;
use crate::sampling::{SamplePlan, Stream};
use crate::sigma::ResidualTable;
use crate::space::NormedSpace;
use crate::subsets::{self, mask_positions, order_positions, ordered_masks};
use crate::weight::{measure_slack, IndexSet};

pub const MAX_DEMOCRACY_DIM: usize = 12;
pub const MAX_SUPERDEMOCRACY_DIM: usize = 10;
pub const MAX_FUNDAMENTAL_DIM: usize = 16;
pub const MAX_GREEDY_RATIO_DIM: usize = 12;
/// Sets up to this size get every sign pattern; larger ones are sampled.
pub const EXACT_SIGN_SIZE: usize = 8;
pub const SAMPLED_SIGN_PATTERNS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConstantName {
    #[serde(rename = "democracy")]
    Democracy,
    #[serde(rename = "superdemocracy")]
    Superdemocracy,
    #[serde(rename = "conservative")]
    Conservative,
    #[serde(rename = "quasi_greedy_G")]
    QuasiGreedyG,
    #[serde(rename = "quasi_greedy_R")]
    QuasiGreedyR,
    #[serde(rename = "almost_greedy")]
    AlmostGreedy,
    #[serde(rename = "semi_greedy")]
    SemiGreedy,
}

/// What attains a constant; [`Witness::ratio`] recomputes the value.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `‖1_A‖ / ‖1_B‖`.
    SetPair { numerator: IndexSet, denominator: IndexSet },
    /// `‖Σ_A ε_n e_n‖ / ‖Σ_B δ_n e_n‖`.
    SignedPair { numerator: IndexSet, numerator_signs: Vec<i8>, denominator: IndexSet, denominator_signs: Vec<i8> },
    /// `‖S_Λ x‖/‖x‖`, or `‖x − S_Λ x‖/‖x‖` when `residual`.
    Projection { x: Vec<f64>, support: IndexSet, residual: bool },
    /// `‖x − S_Λ x‖ / σ̃^w_{w(Λ)}(x)`.
    Expansional { x: Vec<f64>, support: IndexSet },
    /// `‖x − Ḡ(x)‖ / σ^w_{w(Λ)}(x)`, with `Ḡ` the Chebyshev approximant on `Λ`.
    Chebyshev { x: Vec<f64>, support: IndexSet },
}

fn signed_vector(dim: usize, set: &IndexSet, signs: &[i8]) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    for (&i, &s) in set.indices().iter().zip(signs) {
        v[i - 1] = s as f64;
    }
    v
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        if num == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::Internal(format!("ratio {num}/0 with an admissible empty set")))
        }
    } else {
        Ok(num / den)
    }
}

impl Witness {
    /// Recomputes the ratio this witness stands for.
    pub fn ratio(&self, space: &NormedSpace, weights: &[f64]) -> Result<f64> {
        let dim = space.dim();
        match self {
            Witness::SetPair { numerator, denominator } => {
                let a = signed_vector(dim, numerator, &vec![1; numerator.len()]);
                let b = signed_vector(dim, denominator, &vec![1; denominator.len()]);
                ratio(space.norm_slice(&a)?, space.norm_slice(&b)?)
            }
            Witness::SignedPair { numerator, numerator_signs, denominator, denominator_signs } => {
                let a = signed_vector(dim, numerator, numerator_signs);
                let b = signed_vector(dim, denominator, denominator_signs);
                ratio(space.norm_slice(&a)?, space.norm_slice(&b)?)
            }
            Witness::Projection { x, support, residual } => {
                let mask = support.to_mask()?;
                let mut v = x.clone();
                for (i, vi) in v.iter_mut().enumerate() {
                    if (mask & (1 << i) != 0) == *residual {
                        *vi = 0.0;
                    }
                }
                ratio(space.norm_slice(&v)?, space.norm_slice(x)?)
            }
            Witness::Expansional { x, support } => {
                let mask = support.to_mask()?;
                let mut t = ResidualTable::new(space, x, weights)?;
                let num = t.expansional_value(mask);
                let (den, _) = t.expansional(t.measure(mask));
                ratio(num, den)
            }
            Witness::Chebyshev { x, support } => {
                let mask = support.to_mask()?;
                let mut t = ResidualTable::new(space, x, weights)?;
                let num = t.best_on(mask)?;
                let (den, _) = t.best(t.measure(mask))?;
                ratio(num, den)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub name: ConstantName,
    pub value: f64,
    /// True when `value` is the constant itself rather than a lower bound.
    pub exact: bool,
    pub witness: Option<Witness>,
}

fn guard(dim: usize, limit: usize, what: &'static str) -> Result<()> {
    if dim > limit {
        return Err(Error::GuardExceeded { what, limit, got: dim });
    }
    Ok(())
}

fn check_weights(space: &NormedSpace, weights: &[f64]) -> Result<()> {
    if weights.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: weights.len() });
    }
    Ok(())
}

/// `‖1_A‖` for every mask of `{1..dim}`.
pub fn indicator_norms(space: &NormedSpace) -> Vec<f64> {
    let dim = space.dim();
    (0..1u32 << dim)
        .into_par_iter()
        .map(|mask| {
            let v: Vec<f64> = (0..dim).map(|i| ((mask >> i) & 1) as f64).collect();
            space.eval(&v)
        })
        .collect()
}

/// Masks sorted by measure, ties in canonical order.
fn by_measure(sums: &[f64], position: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = (0..sums.len() as u32).collect();
    v.sort_by(|&a, &b| {
        sums[a as usize].total_cmp(&sums[b as usize]).then(position[a as usize].cmp(&position[b as usize]))
    });
    v
}

/// `max_{w(A) ≤ w(B)} num(A) / den(B)` over nonempty `B`, with witnesses.
fn pair_max(num: &[f64], den: &[f64], sums: &[f64], slack: f64, dim: usize) -> (f64, u32, u32) {
    let order = ordered_masks(dim);
    let position = order_positions(&order);
    let sorted = by_measure(sums, &position);
    // prefix maxima of num along increasing measure, earliest canonical on ties
    let mut prefix = Vec::with_capacity(sorted.len());
    let mut cur = sorted[0];
    for &m in &sorted {
        let (v, c) = (num[m as usize], num[cur as usize]);
        if v > c || (v == c && position[m as usize] < position[cur as usize]) {
            cur = m;
        }
        prefix.push(cur);
    }
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for &b in order.iter().skip(1) {
        let count = sorted.partition_point(|&m| sums[m as usize] <= sums[b as usize] + slack);
        let a = prefix[count - 1];
        let r = num[a as usize] / den[b as usize];
        if r > best.0 {
            best = (r, a, b);
        }
    }
    best
}

/// `w`-democracy constant: `max ‖1_A‖/‖1_B‖` over `w(A) ≤ w(B)`, `B ≠ ∅`.
pub fn democracy_constant_w(space: &NormedSpace, weights: &[f64]) -> Result<ConstantEstimate> {
    let dim = space.dim();
    guard(dim, MAX_DEMOCRACY_DIM, "democracy dimension")?;
    check_weights(space, weights)?;
    let norms = indicator_norms(space);
    let sums = subsets::all_mask_sums(weights);
    let (value, a, b) = pair_max(&norms, &norms, &sums, measure_slack(weights), dim);
    Ok(ConstantEstimate {
        name: ConstantName::Democracy,
        value,
        exact: true,
        witness: Some(Witness::SetPair { numerator: IndexSet::from_mask(a), denominator: IndexSet::from_mask(b) }),
    })
}

/// Extreme signed norms of one set: `(max, argmax signs, min, argmin signs)`.
pub(crate) fn sign_extremes(space: &NormedSpace, mask: u32, rng_seed: u64) -> (f64, Vec<i8>, f64, Vec<i8>, bool) {
    let dim = space.dim();
    let pos = mask_positions(mask);
    let k = pos.len();
    let mut v = vec![0.0; dim];
    let mut eval = |signs: &[i8]| {
        for (&p, &s) in pos.iter().zip(signs) {
            v[p] = s as f64;
        }
        space.eval(&v)
    };
    let mut hi = (f64::NEG_INFINITY, Vec::new());
    let mut lo = (f64::INFINITY, Vec::new());
    let mut consider = |signs: Vec<i8>, val: f64| {
        if val > hi.0 {
            hi = (val, signs.clone());
        }
        if val < lo.0 {
            lo = (val, signs);
        }
    };
    if k == 0 {
        return (0.0, vec![], 0.0, vec![], true);
    }
    if k <= EXACT_SIGN_SIZE {
        // the norm is even, so the first sign stays +
        for bits in 0..1u32 << (k - 1) {
            let signs: Vec<i8> = (0..k).map(|j| if j > 0 && bits & (1 << (j - 1)) != 0 { -1 } else { 1 }).collect();
            let val = eval(&signs);
            consider(signs, val);
        }
        (hi.0, hi.1, lo.0, lo.1, true)
    } else {
        let mut rng = Stream::new(rng_seed ^ mask as u64);
        let all_plus = vec![1i8; k];
        let val = eval(&all_plus);
        consider(all_plus, val);
        for _ in 1..SAMPLED_SIGN_PATTERNS {
            let signs: Vec<i8> = (0..k).map(|_| if rng.sign() < 0.0 { -1 } else { 1 }).collect();
            let val = eval(&signs);
            consider(signs, val);
        }
        (hi.0, hi.1, lo.0, lo.1, false)
    }
}

/// `w`-superdemocracy constant with signs on both sides; collapses to the
/// democracy constant for sign-invariant norms. `seed` drives sign sampling
/// for sets larger than [`EXACT_SIGN_SIZE`].
pub fn superdemocracy_constant_w(space: &NormedSpace, weights: &[f64], seed: u64) -> Result<ConstantEstimate> {
    let dim = space.dim();
    check_weights(space, weights)?;
    if space.one_unconditional() {
        let d = democracy_constant_w(space, weights)?;
        let witness = match d.witness {
            Some(Witness::SetPair { numerator, denominator }) => Some(Witness::SignedPair {
                numerator_signs: vec![1; numerator.len()],
                denominator_signs: vec![1; denominator.len()],
                numerator,
                denominator,
            }),
            other => other,
        };
        return Ok(ConstantEstimate { name: ConstantName::Superdemocracy, witness, ..d });
    }
    guard(dim, MAX_SUPERDEMOCRACY_DIM, "superdemocracy dimension")?;
    let ext: Vec<_> = (0..1u32 << dim).into_par_iter().map(|m| sign_extremes(space, m, seed)).collect();
    let hi: Vec<f64> = ext.iter().map(|e| e.0).collect();
    let lo: Vec<f64> = ext.iter().map(|e| e.2).collect();
    let sums = subsets::all_mask_sums(weights);
    let (value, a, b) = pair_max(&hi, &lo, &sums, measure_slack(weights), dim);
    let exact = ext.iter().all(|e| e.4);
    Ok(ConstantEstimate {
        name: ConstantName::Superdemocracy,
        value,
        exact,
        witness: Some(Witness::SignedPair {
            numerator: IndexSet::from_mask(a),
            numerator_signs: ext[a as usize].1.clone(),
            denominator: IndexSet::from_mask(b),
            denominator_signs: ext[b as usize].3.clone(),
        }),
    })
}

/// `v(u) = max ‖1_A‖/‖1_B‖` over `w(A) ≤ w(B) ≤ u`, as `(w(B), v)` steps in
/// increasing measure order; read it with [`profile_at`].
pub fn democracy_profile(space: &NormedSpace, weights: &[f64]) -> Result<Vec<(f64, f64)>> {
    let dim = space.dim();
    guard(dim, MAX_DEMOCRACY_DIM, "democracy dimension")?;
    check_weights(space, weights)?;
    let norms = indicator_norms(space);
    let sums = subsets::all_mask_sums(weights);
    let slack = measure_slack(weights);
    let position = order_positions(&ordered_masks(dim));
    let sorted = by_measure(&sums, &position);
    let mut prefix = Vec::with_capacity(sorted.len());
    let mut run = f64::NEG_INFINITY;
    for &m in &sorted {
        run = run.max(norms[m as usize]);
        prefix.push(run);
    }
    let mut out = Vec::new();
    let mut best = 1.0f64;
    for &b in sorted.iter().skip(1) {
        let count = sorted.partition_point(|&m| sums[m as usize] <= sums[b as usize] + slack);
        best = best.max(prefix[count - 1] / norms[b as usize]);
        out.push((sums[b as usize], best));
    }
    Ok(out)
}

/// Value of a [`democracy_profile`] at budget `u`; 1 below the lightest set.
pub fn profile_at(profile: &[(f64, f64)], u: f64, slack: f64) -> f64 {
    let count = profile.partition_point(|&(m, _)| m <= u + slack);
    count.checked_sub(1).map_or(1.0, |i| profile[i].1)
}

/// Conservative constant: `max ‖1_A‖/‖1_B‖` over `|A| ≤ |B|`, `A < B`.
pub fn conservative_constant(space: &NormedSpace) -> Result<ConstantEstimate> {
    let dim = space.dim();
    guard(dim, MAX_DEMOCRACY_DIM, "conservative dimension")?;
    let norms = indicator_norms(space);
    let order = ordered_masks(dim);
    // best[j][k]: largest ‖1_A‖ with A ⊆ first j positions and |A| ≤ k
    let mut best = vec![vec![(f64::NEG_INFINITY, 0u32); dim + 1]; dim + 1];
    for &a in &order {
        let top = 32 - a.leading_zeros() as usize;
        let k = a.count_ones() as usize;
        if norms[a as usize] > best[top][k].0 {
            best[top][k] = (norms[a as usize], a);
        }
    }
    for j in 0..=dim {
        for k in 0..=dim {
            let mut cand = best[j][k];
            if j > 0 && best[j - 1][k].0 > cand.0 {
                cand = best[j - 1][k];
            }
            if k > 0 && best[j][k - 1].0 > cand.0 {
                cand = best[j][k - 1];
            }
            best[j][k] = cand;
        }
    }
    let mut out = (1.0, None);
    if dim >= 2 {
        out.1 = Some((1u32, 2u32));
    }
    for &b in order.iter().skip(1) {
        let j = b.trailing_zeros() as usize;
        let k = b.count_ones() as usize;
        let (n, a) = best[j][k];
        let r = n / norms[b as usize];
        if r > out.0 {
            out = (r, Some((a, b)));
        }
    }
    Ok(ConstantEstimate {
        name: ConstantName::Conservative,
        value: out.0,
        exact: true,
        witness: out
            .1
            .map(|(a, b)| Witness::SetPair { numerator: IndexSet::from_mask(a), denominator: IndexSet::from_mask(b) }),
    })
}

/// `φ^w(u) = sup_{w(A) ≤ u} ‖1_A‖` and `ϕ^w(u) = inf_{w(A) > u} ‖1_A‖` on
/// the grid of distinct subset measures. `φ^w(u) = 0` below the smallest
/// weight (only `∅` qualifies); `ϕ^w` is undefined from the full-set measure on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FundamentalFunctionTable {
    pub grid: Vec<f64>,
    pub phi_sup: Vec<f64>,
    pub phi_inf: Vec<Option<f64>>,
}

impl FundamentalFunctionTable {
    fn locate(&self, u: f64) -> Option<usize> {
        let slack = 1e-12 * self.grid.last().copied().unwrap_or(1.0).max(1.0);
        let count = self.grid.partition_point(|&g| g <= u + slack);
        count.checked_sub(1)
    }

    /// `φ^w(u)` for any `u ≥ 0`.
    pub fn phi_sup_at(&self, u: f64) -> f64 {
        self.locate(u).map_or(0.0, |i| self.phi_sup[i])
    }

    /// `ϕ^w(u)` for any `u ≥ 0`, `None` where no set is heavier than `u`.
    pub fn phi_inf_at(&self, u: f64) -> Option<f64> {
        match self.locate(u) {
            Some(i) => self.phi_inf[i],
            None => self.phi_inf.first().copied().flatten(),
        }
    }
}

pub fn fundamental_functions(space: &NormedSpace, weights: &[f64]) -> Result<FundamentalFunctionTable> {
    let dim = space.dim();
    guard(dim, MAX_FUNDAMENTAL_DIM, "fundamental-function dimension")?;
    check_weights(space, weights)?;
    let norms = indicator_norms(space);
    let sums = subsets::all_mask_sums(weights);
    let slack = measure_slack(weights);
    let mut idx: Vec<usize> = (0..sums.len()).collect();
    idx.sort_by(|&a, &b| sums[a].total_cmp(&sums[b]));
    // groups of measures equal up to slack
    let mut grid = Vec::new();
    let mut group_end = Vec::new();
    let mut k = 0;
    while k < idx.len() {
        let base = sums[idx[k]];
        let mut e = k + 1;
        while e < idx.len() && sums[idx[e]] <= base + slack {
            e += 1;
        }
        grid.push(base);
        group_end.push(e);
        k = e;
    }
    let mut prefix_max = vec![0.0; idx.len()];
    let mut run = f64::NEG_INFINITY;
    for (i, &m) in idx.iter().enumerate() {
        run = run.max(norms[m]);
        prefix_max[i] = run;
    }
    let mut suffix_min = vec![f64::INFINITY; idx.len() + 1];
    for i in (0..idx.len()).rev() {
        suffix_min[i] = suffix_min[i + 1].min(norms[idx[i]]);
    }
    let phi_sup = group_end.iter().map(|&e| prefix_max[e - 1]).collect();
    let phi_inf = group_end.iter().map(|&e| (e < idx.len()).then(|| suffix_min[e])).collect();
    Ok(FundamentalFunctionTable { grid, phi_sup, phi_inf })
}

/// Largest ratio seen so far and where it occurred.
type Best = Option<(f64, Witness)>;

/// Per-instance maxima merged in instance order, first maximum wins.
fn merge_max(parts: Vec<Result<Best>>) -> Result<Best> {
    let mut best: Best = None;
    for p in parts {
        if let Some((v, w)) = p? {
            if best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, w));
            }
        }
    }
    Ok(best)
}

fn unit_vector(dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[0] = 1.0;
    v
}

/// `K_G = sup ‖G_m x‖/‖x‖` and `K_R = sup ‖x − G_m x‖/‖x‖`, exact when the
/// space knows its quasi-greedy constant, otherwise maxima over the plan, every
/// `m` and every admissible ordering.
pub fn quasi_greedy_constant(space: &NormedSpace, plan: &SamplePlan) -> Result<(ConstantEstimate, ConstantEstimate)> {
    let dim = space.dim();
    if plan.is_empty() {
        return Err(Error::InvalidInput("sample plan is empty".into()));
    }
    let e1 = unit_vector(dim);
    let base_g = Witness::Projection { x: e1.clone(), support: IndexSet::range(1, 1), residual: false };
    let base_r = Witness::Projection { x: e1, support: IndexSet::empty(), residual: true };
    if let Some(k) = space.exact_quasi_greedy_constant() {
        return Ok((
            ConstantEstimate { name: ConstantName::QuasiGreedyG, value: k, exact: true, witness: Some(base_g) },
            ConstantEstimate { name: ConstantName::QuasiGreedyR, value: k, exact: true, witness: Some(base_r) },
        ));
    }
    guard(dim, subsets::MAX_MASK_DIM, "quasi-greedy dimension")?;
    let instances = plan.instances(dim, &vec![1.0; dim]);
    let per: Vec<Result<(Best, Best)>> = instances
        .par_iter()
        .map(|inst| {
            let x = &inst.coefficients;
            let nx = space.eval(x);
            if nx == 0.0 {
                return Ok((None, None));
            }
            let mut g: Option<(f64, u32)> = None;
            let mut r: Option<(f64, u32)> = None;
            let mut kept = vec![0.0; dim];
            let mut rest = vec![0.0; dim];
            for m in 0..=dim {
                for mask in admissible_supports(x, m, 0.0)? {
                    for i in 0..dim {
                        let inside = mask & (1 << i) != 0;
                        kept[i] = if inside { x[i] } else { 0.0 };
                        rest[i] = if inside { 0.0 } else { x[i] };
                    }
                    let (a, b) = (space.eval(&kept) / nx, space.eval(&rest) / nx);
                    if g.is_none_or(|c| a > c.0) {
                        g = Some((a, mask));
                    }
                    if r.is_none_or(|c| b > c.0) {
                        r = Some((b, mask));
                    }
                }
            }
            let wrap = |p: Option<(f64, u32)>, residual| {
                p.map(|(v, m)| (v, Witness::Projection { x: x.clone(), support: IndexSet::from_mask(m), residual }))
            };
            Ok((wrap(g, false), wrap(r, true)))
        })
        .collect();
    let mut gs = vec![Ok(Some((1.0, base_g)))];
    let mut rs = vec![Ok(Some((1.0, base_r)))];
    for p in per {
        let (g, r) = p?;
        gs.push(Ok(g));
        rs.push(Ok(r));
    }
    let (gv, gw) = merge_max(gs)?.expect("seeded with the unit vector");
    let (rv, rw) = merge_max(rs)?.expect("seeded with the unit vector");
    Ok((
        ConstantEstimate { name: ConstantName::QuasiGreedyG, value: gv, exact: false, witness: Some(gw) },
        ConstantEstimate { name: ConstantName::QuasiGreedyR, value: rv, exact: false, witness: Some(rw) },
    ))
}

/// `max ‖x − G_m x‖ / σ̃^w_{w(Λ_m)}(x)` over the plan, `m`, and orderings.
pub fn almost_greedy_constant_lb(space: &NormedSpace, weights: &[f64], plan: &SamplePlan) -> Result<ConstantEstimate> {
    let dim = space.dim();
    guard(dim, MAX_GREEDY_RATIO_DIM, "almost-greedy dimension")?;
    check_weights(space, weights)?;
    let instances = plan.instances(dim, weights);
    let parts: Vec<_> = instances
        .par_iter()
        .map(|inst| -> Result<Best> {
            let x = &inst.coefficients;
            let mut t = ResidualTable::new(space, x, weights)?;
            let mut best: Option<(f64, u32)> = None;
            for m in 1..=dim {
                for mask in admissible_supports(x, m, 0.0)? {
                    let num = t.expansional_value(mask);
                    let (den, _) = t.expansional(t.measure(mask));
                    let r = ratio(num, den)?;
                    if best.is_none_or(|b| r > b.0) {
                        best = Some((r, mask));
                    }
                }
            }
            Ok(best.map(|(r, m)| (r, Witness::Expansional { x: x.clone(), support: IndexSet::from_mask(m) })))
        })
        .collect();
    let best = merge_max(parts)?;
    Ok(ConstantEstimate {
        name: ConstantName::AlmostGreedy,
        value: best.as_ref().map_or(1.0, |b| b.0),
        exact: false,
        witness: best.map(|b| b.1),
    })
}

/// `max ‖x − Ḡ_m x‖ / σ^w_{w(Λ_m)}(x)` over the plan, `m ≤ max_m`, and orderings.
pub fn semi_greedy_constant_lb(
    space: &NormedSpace,
    weights: &[f64],
    plan: &SamplePlan,
    max_m: usize,
) -> Result<ConstantEstimate> {
    let dim = space.dim();
    guard(dim, MAX_GREEDY_RATIO_DIM, "semi-greedy dimension")?;
    guard(max_m, chebyshev::MAX_SUPPORT, "semi-greedy m")?;
    check_weights(space, weights)?;
    let instances = plan.instances(dim, weights);
    let parts: Vec<_> = instances
        .par_iter()
        .map(|inst| -> Result<Best> {
            let x = &inst.coefficients;
            let mut t = ResidualTable::new(space, x, weights)?.with_tol(DEFAULT_TOL);
            let mut best: Option<(f64, u32)> = None;
            for m in 1..=max_m.min(dim) {
                for mask in admissible_supports(x, m, 0.0)? {
                    let num = t.best_on(mask)?;
                    let (den, _) = t.best(t.measure(mask))?;
                    let r = ratio(num, den)?;
                    if best.is_none_or(|b| r > b.0) {
                        best = Some((r, mask));
                    }
                }
            }
            Ok(best.map(|(r, m)| (r, Witness::Chebyshev { x: x.clone(), support: IndexSet::from_mask(m) })))
        })
        .collect();
    let best = merge_max(parts)?;
    Ok(ConstantEstimate {
        name: ConstantName::SemiGreedy,
        value: best.as_ref().map_or(1.0, |b| b.0),
        exact: false,
        witness: best.map(|b| b.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::Weight;

    #[test]
    fn lp_democracy_is_one() {
        for p in [1.0, 1.5, 2.0, 4.0] {
            let s = NormedSpace::lp(p, 6).unwrap();
            let d = democracy_constant_w(&s, &[1.0; 6]).unwrap();
            assert!((d.value - 1.0).abs() < 1e-12, "p={p}: {}", d.value);
            assert!(d.exact);
        }
    }

    #[test]
    fn harmonic_mixed_democracy() {
        let w = Weight::harmonic(12);
        let s = NormedSpace::remark_mixed(&w, 12).unwrap();
        let prefix = w.prefix(12).unwrap();
        let dw = democracy_constant_w(&s, &prefix).unwrap();
        assert!((dw.value - 1.0).abs() < 1e-9);
        let plain = democracy_constant_w(&s, &[1.0; 12]).unwrap();
        let h6: f64 = (1..=6).map(|n| 1.0 / n as f64).sum();
        assert!(plain.value >= h6.sqrt() - 1e-12);
        assert!(plain.value >= 1.56);
    }

    #[test]
    fn witnesses_reproduce() {
        let w = Weight::harmonic(6);
        let prefix = w.prefix(6).unwrap();
        let s = NormedSpace::remark_mixed(&w, 6).unwrap();
        for c in [
            democracy_constant_w(&s, &[1.0; 6]).unwrap(),
            conservative_constant(&s).unwrap(),
            superdemocracy_constant_w(&s, &prefix, 0).unwrap(),
        ] {
            let r = c.witness.as_ref().unwrap().ratio(&s, &prefix).unwrap();
            assert!((r - c.value).abs() <= 1e-9 * c.value, "{c:?}");
        }
    }

    #[test]
    fn conservative_examples() {
        assert_eq!(conservative_constant(&NormedSpace::lp(2.0, 8).unwrap()).unwrap().value, 1.0);
        assert_eq!(conservative_constant(&NormedSpace::sup(8).unwrap()).unwrap().value, 1.0);
    }

    #[test]
    fn fundamental_examples() {
        let s = NormedSpace::lp(2.0, 6).unwrap();
        let t = fundamental_functions(&s, &[1.0; 6]).unwrap();
        assert_eq!(t.phi_sup_at(4.5), 2.0);
        assert_eq!(t.phi_inf_at(4.5), Some(5f64.sqrt()));
        assert_eq!(t.phi_sup_at(0.5), 0.0);
        assert_eq!(t.phi_inf_at(6.0), None);
        assert_eq!(t.grid, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn greedy_constants_in_lattices() {
        let plan = SamplePlan { seed: 5, random_count: 40, structured: true };
        for s in [NormedSpace::lp(2.0, 5).unwrap(), NormedSpace::lp(1.0, 5).unwrap()] {
            let (g, r) = quasi_greedy_constant(&s, &plan).unwrap();
            assert!(g.exact && r.exact && g.value == 1.0);
            let ag = almost_greedy_constant_lb(&s, &[1.0; 5], &plan).unwrap();
            assert!((ag.value - 1.0).abs() < 1e-9, "{}", ag.value);
        }
    }

    #[test]
    fn sampled_quasi_greedy_for_summing_norm() {
        use crate::space::{Component, CoordinateMap};
        let s = NormedSpace::custom(
            vec![
                Component { p: f64::INFINITY, weights: None, map: CoordinateMap::Identity },
                Component { p: f64::INFINITY, weights: None, map: CoordinateMap::TailSums },
            ],
            5,
        )
        .unwrap();
        let plan = SamplePlan { seed: 1, random_count: 60, structured: true };
        let (g, r) = quasi_greedy_constant(&s, &plan).unwrap();
        assert!(!g.exact && g.value >= 1.0 && r.value >= 1.0);
        let w = g.witness.unwrap().ratio(&s, &[1.0; 5]).unwrap();
        assert!((w - g.value).abs() < 1e-12);
        let sd = superdemocracy_constant_w(&s, &[1.0; 5], 0).unwrap();
        let d = democracy_constant_w(&s, &[1.0; 5]).unwrap();
        assert!(d.value <= sd.value + 1e-12);
    }
}

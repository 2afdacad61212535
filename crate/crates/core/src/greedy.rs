//! Thresholding greedy algorithm, tie handling and truncation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::CoefficientVector;
use crate::subsets;
use crate::weight::IndexSet;

/// Default cap on enumerated orderings under [`TiePolicy::All`].
pub const DEFAULT_TIE_CAP: usize = 720;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Ties broken by ascending index.
    LowestIndex,
    /// Every ordering consistent with the moduli.
    All,
    /// A caller-supplied permutation (1-based), checked for admissibility.
    GivenPermutation(Vec<usize>),
}

/// A greedy ordering `ρ` with the tie groups it was chosen from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreedyOrdering {
    /// `ρ(1), …, ρ(dim)`, 1-based.
    pub permutation: Vec<usize>,
    /// Groups of at least two indices whose moduli tie, in order of appearance.
    pub tie_groups: Vec<Vec<usize>>,
}

/// Indices (0-based) sorted by nonincreasing modulus, ties by ascending index.
pub fn modulus_order(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    idx
}

/// Half-open position ranges of tie groups along `order`.
fn tie_ranges(x: &[f64], order: &[usize], tie_tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut s = 0;
    while s < order.len() {
        let lead = x[order[s]].abs();
        let mut e = s + 1;
        while e < order.len() && lead - x[order[e]].abs() <= tie_tol {
            e += 1;
        }
        out.push((s, e));
        s = e;
    }
    out
}

fn check_x(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if let Some(i) = x.iter().position(|a| !a.is_finite()) {
        return Err(Error::NonFinite { index: i + 1 });
    }
    Ok(())
}

fn check_tol(tie_tol: f64) -> Result<()> {
    if !(tie_tol >= 0.0 && tie_tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tie tolerance must be >= 0, got {tie_tol}")));
    }
    Ok(())
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Greedy orderings of `x` under `policy`. [`TiePolicy::All`] emits the
/// orderings in lexicographic order and fails when there are more than `cap`.
pub fn greedy_ordering(
    x: &CoefficientVector,
    policy: &TiePolicy,
    tie_tol: f64,
    cap: usize,
) -> Result<Vec<GreedyOrdering>> {
    let a = x.as_slice();
    check_x(a)?;
    check_tol(tie_tol)?;
    let order = modulus_order(a);
    let ranges = tie_ranges(a, &order, tie_tol);
    let tie_groups: Vec<Vec<usize>> = ranges
        .iter()
        .filter(|(s, e)| e - s > 1)
        .map(|&(s, e)| {
            let mut g: Vec<usize> = order[s..e].iter().map(|i| i + 1).collect();
            g.sort_unstable();
            g
        })
        .collect();
    let base: Vec<usize> = order.iter().map(|i| i + 1).collect();
    match policy {
        TiePolicy::LowestIndex => Ok(vec![GreedyOrdering { permutation: base, tie_groups }]),
        TiePolicy::GivenPermutation(p) => {
            let mut seen = vec![false; a.len()];
            for &i in p {
                if i == 0 || i > a.len() || std::mem::replace(&mut seen[i - 1], true) {
                    return Err(Error::InvalidInput(format!("{p:?} is not a permutation of 1..={}", a.len())));
                }
            }
            if p.len() != a.len() {
                return Err(Error::InvalidInput(format!("{p:?} is not a permutation of 1..={}", a.len())));
            }
            // each position must draw from the tie group occupying it
            for &(s, e) in &ranges {
                let mut want: Vec<usize> = base[s..e].to_vec();
                let mut got: Vec<usize> = p[s..e].to_vec();
                want.sort_unstable();
                got.sort_unstable();
                if want != got {
                    return Err(Error::InvalidInput(format!(
                        "{p:?} is not a greedy ordering for the given coefficients"
                    )));
                }
            }
            Ok(vec![GreedyOrdering { permutation: p.clone(), tie_groups }])
        }
        TiePolicy::All => {
            let mut needed: u128 = 1;
            for &(s, e) in &ranges {
                for k in 2..=(e - s) as u128 {
                    needed = needed.saturating_mul(k);
                }
            }
            if needed > cap as u128 {
                return Err(Error::TieCapExceeded { needed, cap });
            }
            let mut groups: Vec<Vec<usize>> = ranges
                .iter()
                .map(|&(s, e)| {
                    let mut g = base[s..e].to_vec();
                    g.sort_unstable();
                    g
                })
                .collect();
            let mut out = Vec::with_capacity(needed as usize);
            loop {
                out.push(GreedyOrdering { permutation: groups.concat(), tie_groups: tie_groups.clone() });
                // odometer: the last group varies fastest
                let mut g = groups.len();
                loop {
                    if g == 0 {
                        return Ok(out);
                    }
                    g -= 1;
                    if next_permutation(&mut groups[g]) {
                        break;
                    }
                }
            }
        }
    }
}

/// Distinct supports `Λ_m` over every admissible ordering, as bitmasks in
/// canonical order. Enumerates subsets of the straddling tie group rather than
/// orderings, so no cap applies.
pub fn admissible_supports(x: &[f64], m: usize, tie_tol: f64) -> Result<Vec<u32>> {
    check_x(x)?;
    check_tol(tie_tol)?;
    if m > x.len() {
        return Err(Error::MOutOfRange { m, dim: x.len() });
    }
    if x.len() > subsets::MAX_MASK_DIM {
        return Err(Error::GuardExceeded {
            what: "support enumeration dimension",
            limit: subsets::MAX_MASK_DIM,
            got: x.len(),
        });
    }
    let order = modulus_order(x);
    let mut fixed = 0u32;
    for &(s, e) in &tie_ranges(x, &order, tie_tol) {
        if e <= m {
            for &i in &order[s..e] {
                fixed |= 1 << i;
            }
        } else if s < m {
            let mut members: Vec<usize> = order[s..e].to_vec();
            members.sort_unstable();
            let mut out = Vec::new();
            subsets::for_each_k_subset(members.len(), m - s, |pick| {
                let mut mask = fixed;
                for (k, &i) in members.iter().enumerate() {
                    if pick & (1 << k) != 0 {
                        mask |= 1 << i;
                    }
                }
                out.push(mask);
            });
            return Ok(out);
        } else {
            break;
        }
    }
    Ok(vec![fixed])
}

/// `|e*_{ρ(m)}(x)|`, the m-th largest modulus (`m ≥ 1`).
pub fn mth_modulus(x: &[f64], m: usize) -> Result<f64> {
    if m == 0 || m > x.len() {
        return Err(Error::MOutOfRange { m, dim: x.len() });
    }
    let mut mods: Vec<f64> = x.iter().map(|a| a.abs()).collect();
    mods.sort_by(|a, b| b.total_cmp(a));
    Ok(mods[m - 1])
}

/// `Λ_m = {ρ(1), …, ρ(m)}`.
pub fn greedy_support(x: &CoefficientVector, ordering: &GreedyOrdering, m: usize) -> Result<IndexSet> {
    check_ordering(x, ordering, m)?;
    IndexSet::new(ordering.permutation[..m].to_vec())
}

fn check_ordering(x: &CoefficientVector, ordering: &GreedyOrdering, m: usize) -> Result<()> {
    if ordering.permutation.len() != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: ordering.permutation.len() });
    }
    if m > x.dim() {
        return Err(Error::MOutOfRange { m, dim: x.dim() });
    }
    Ok(())
}

/// `G_m(x) = Σ_{n∈Λ_m} e*_n(x) e_n`.
pub fn greedy_sum(x: &CoefficientVector, ordering: &GreedyOrdering, m: usize) -> Result<CoefficientVector> {
    check_ordering(x, ordering, m)?;
    let mut out = vec![0.0; x.dim()];
    for &i in &ordering.permutation[..m] {
        out[i - 1] = x.as_slice()[i - 1];
    }
    CoefficientVector::new(out)
}

/// `G_m(x)` and the residual for a single m.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyStep {
    pub m: usize,
    pub support: IndexSet,
    pub greedy_sum: Vec<f64>,
    pub residual: Vec<f64>,
}

/// All greedy steps of `x` for every ordering considered.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyRun {
    pub x: Vec<f64>,
    pub orderings: Vec<GreedyOrdering>,
    /// `steps[k][m]` belongs to `orderings[k]`.
    pub steps: Vec<Vec<GreedyStep>>,
}

impl GreedyRun {
    pub fn new(x: &CoefficientVector, policy: &TiePolicy, tie_tol: f64, cap: usize) -> Result<Self> {
        let orderings = greedy_ordering(x, policy, tie_tol, cap)?;
        let a = x.as_slice();
        let steps = orderings
            .iter()
            .map(|o| {
                let mut sum = vec![0.0; a.len()];
                let mut residual = a.to_vec();
                let mut out = Vec::with_capacity(a.len() + 1);
                for m in 0..=a.len() {
                    if m > 0 {
                        let i = o.permutation[m - 1] - 1;
                        sum[i] = a[i];
                        residual[i] = 0.0;
                    }
                    out.push(GreedyStep {
                        m,
                        support: IndexSet::new(o.permutation[..m].to_vec())?,
                        greedy_sum: sum.clone(),
                        residual: residual.clone(),
                    });
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GreedyRun { x: a.to_vec(), orderings, steps })
    }
}

/// Coordinatewise clamp `f_M` to `[-M, M]`.
pub fn truncate(x: &CoefficientVector, level: f64) -> Result<CoefficientVector> {
    if !(level > 0.0) {
        return Err(Error::NonPositiveLevel(level));
    }
    CoefficientVector::new(x.as_slice().iter().map(|a| a.clamp(-level, level)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(v: &[f64]) -> CoefficientVector {
        CoefficientVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ordering_examples() {
        let x = cv(&[0.5, -2.0, 1.0, 0.25]);
        let o = greedy_ordering(&x, &TiePolicy::LowestIndex, 0.0, DEFAULT_TIE_CAP).unwrap();
        assert_eq!(o[0].permutation, vec![2, 3, 1, 4]);
        let all = greedy_ordering(&cv(&[1.0, -1.0]), &TiePolicy::All, 0.0, DEFAULT_TIE_CAP).unwrap();
        let perms: Vec<_> = all.iter().map(|o| o.permutation.clone()).collect();
        assert_eq!(perms, vec![vec![1, 2], vec![2, 1]]);
        let zero = greedy_ordering(&cv(&[0.0, 0.0, 0.0]), &TiePolicy::LowestIndex, 0.0, 720).unwrap();
        assert_eq!(zero[0].permutation, vec![1, 2, 3]);
        assert_eq!(zero[0].tie_groups, vec![vec![1, 2, 3]]);
    }

    #[test]
    fn tie_cap() {
        let x = cv(&[1.0; 7]);
        assert!(matches!(
            greedy_ordering(&x, &TiePolicy::All, 0.0, 720),
            Err(Error::TieCapExceeded { needed: 5040, cap: 720 })
        ));
        assert_eq!(greedy_ordering(&cv(&[1.0; 6]), &TiePolicy::All, 0.0, 720).unwrap().len(), 720);
    }

    #[test]
    fn tie_tolerance_groups_near_ties() {
        let x = cv(&[1.0, 1.0 + 1e-12, 0.5]);
        assert_eq!(greedy_ordering(&x, &TiePolicy::All, 0.0, 720).unwrap().len(), 1);
        assert_eq!(greedy_ordering(&x, &TiePolicy::All, 1e-9, 720).unwrap().len(), 2);
    }

    #[test]
    fn given_permutation_checked() {
        let x = cv(&[1.0, -1.0, 0.5]);
        assert!(greedy_ordering(&x, &TiePolicy::GivenPermutation(vec![2, 1, 3]), 0.0, 720).is_ok());
        assert!(greedy_ordering(&x, &TiePolicy::GivenPermutation(vec![3, 1, 2]), 0.0, 720).is_err());
        assert!(greedy_ordering(&x, &TiePolicy::GivenPermutation(vec![1, 1, 3]), 0.0, 720).is_err());
    }

    #[test]
    fn sum_examples() {
        let x = cv(&[0.5, -2.0, 1.0, 0.25]);
        let o = &greedy_ordering(&x, &TiePolicy::LowestIndex, 0.0, 720).unwrap()[0];
        assert_eq!(greedy_sum(&x, o, 2).unwrap().as_slice(), &[0.0, -2.0, 1.0, 0.0]);
        assert_eq!(greedy_support(&x, o, 2).unwrap().indices(), &[2, 3]);
        assert_eq!(greedy_sum(&x, o, 0).unwrap().as_slice(), &[0.0; 4]);
        assert_eq!(greedy_sum(&x, o, 4).unwrap(), x);
        assert!(matches!(greedy_sum(&x, o, 5), Err(Error::MOutOfRange { m: 5, dim: 4 })));
    }

    #[test]
    fn run_residuals() {
        let x = cv(&[0.5, -2.0, 1.0, -1.0]);
        let run = GreedyRun::new(&x, &TiePolicy::All, 0.0, 720).unwrap();
        assert_eq!(run.orderings.len(), 2);
        for steps in &run.steps {
            for s in steps {
                for i in 0..4 {
                    assert_eq!(s.greedy_sum[i] + s.residual[i], x.as_slice()[i]);
                }
                for &n in s.support.indices() {
                    assert_eq!(s.residual[n - 1], 0.0);
                }
            }
        }
    }

    #[test]
    fn supports_cover_ties() {
        let x = [1.0, 2.0, 1.0, 1.0, 0.5];
        let s = admissible_supports(&x, 2, 0.0).unwrap();
        let sets: Vec<_> = s.iter().map(|&m| subsets::mask_indices(m)).collect();
        assert_eq!(sets, vec![vec![1, 2], vec![2, 3], vec![2, 4]]);
        assert_eq!(admissible_supports(&x, 4, 0.0).unwrap(), vec![0b01111]);
        assert_eq!(admissible_supports(&x, 0, 0.0).unwrap(), vec![0]);
    }

    #[test]
    fn truncation_examples() {
        let x = cv(&[2.5, -0.3, -7.0]);
        assert_eq!(truncate(&x, 1.0).unwrap().as_slice(), &[1.0, -0.3, -1.0]);
        assert!(matches!(truncate(&x, 0.0), Err(Error::NonPositiveLevel(_))));
        assert!(truncate(&x, -1.0).is_err());
    }
}

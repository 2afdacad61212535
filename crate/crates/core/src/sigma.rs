//! Exhaustive weighted m-term oracles `σ^w_u` (free coefficients) and
//! `σ̃^w_u` (coefficients of `x`).

use serde::{Deserialize, Serialize};

use crate::chebyshev::{self, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::space::{CoefficientVector, NormedSpace};
use crate::subsets::{self, MAX_MASK_DIM};
use crate::weight::{measure_slack, IndexSet, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMode {
    Best,
    Expansional,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaResult {
    pub value: f64,
    pub optimal_set: IndexSet,
    /// Coefficients on `optimal_set` in ascending index order.
    pub optimal_coefficients: Vec<f64>,
    pub mode: SigmaMode,
}

/// `σ^w_u(x)` or `σ̃^w_u(x)` by enumeration of every set with `w(A) ≤ u`.
pub fn sigma_w(
    space: &NormedSpace,
    x: &CoefficientVector,
    w: &Weight,
    budget: f64,
    mode: SigmaMode,
) -> Result<SigmaResult> {
    space.norm(x)?;
    let mut table = ResidualTable::new(space, x.as_slice(), &w.prefix(x.dim())?)?;
    table.result(budget, mode)
}

/// Cached oracle for one `x`, answering many budget queries.
pub struct ResidualTable<'a> {
    space: &'a NormedSpace,
    x: Vec<f64>,
    sums: Vec<f64>,
    slack: f64,
    order: Vec<u32>,
    position: Vec<u32>,
    expansional: Option<ExpansionalIndex>,
    best: Vec<f64>,
    tol: f64,
}

struct ExpansionalIndex {
    values: Vec<f64>,
    by_weight: Vec<u32>,
    prefix_best: Vec<u32>,
}

impl<'a> ResidualTable<'a> {
    pub fn new(space: &'a NormedSpace, x: &[f64], weights: &[f64]) -> Result<Self> {
        let dim = x.len();
        if dim != space.dim() || weights.len() != dim {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: dim });
        }
        if dim > MAX_MASK_DIM {
            return Err(Error::GuardExceeded { what: "sigma dimension", limit: MAX_MASK_DIM, got: dim });
        }
        let order = subsets::ordered_masks(dim);
        Ok(ResidualTable {
            space,
            x: x.to_vec(),
            sums: subsets::all_mask_sums(weights),
            slack: measure_slack(weights),
            position: subsets::order_positions(&order),
            order,
            expansional: None,
            best: vec![f64::NAN; 1 << dim],
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn norm_x(&self) -> f64 {
        self.space.eval(&self.x)
    }

    /// `w(A)` as summed by the table.
    pub fn measure(&self, mask: u32) -> f64 {
        self.sums[mask as usize]
    }

    fn fits(&self, mask: u32, budget: f64) -> bool {
        self.sums[mask as usize] <= budget + self.slack
    }

    /// `‖x − S_A x‖`.
    pub fn expansional_value(&self, mask: u32) -> f64 {
        let mut r = self.x.clone();
        for i in subsets::mask_positions(mask) {
            r[i] = 0.0;
        }
        self.space.eval(&r)
    }

    fn ensure_index(&mut self) {
        if self.expansional.is_none() {
            let n = self.order.len();
            let mut values = vec![0.0; n];
            let mut r = self.x.clone();
            for mask in 0..n as u32 {
                for (i, ri) in r.iter_mut().enumerate() {
                    *ri = if mask & (1 << i) != 0 { 0.0 } else { self.x[i] };
                }
                values[mask as usize] = self.space.eval(&r);
            }
            let mut by_weight: Vec<u32> = (0..n as u32).collect();
            by_weight.sort_by(|&a, &b| {
                self.sums[a as usize]
                    .total_cmp(&self.sums[b as usize])
                    .then(self.position[a as usize].cmp(&self.position[b as usize]))
            });
            let mut prefix_best = Vec::with_capacity(n);
            let mut cur = by_weight[0];
            for &m in &by_weight {
                if self.better(values[m as usize], m, values[cur as usize], cur) {
                    cur = m;
                }
                prefix_best.push(cur);
            }
            self.expansional = Some(ExpansionalIndex { values, by_weight, prefix_best });
        }
    }

    fn better(&self, v: f64, m: u32, best_v: f64, best_m: u32) -> bool {
        v < best_v || (v == best_v && self.position[m as usize] < self.position[best_m as usize])
    }

    /// `σ̃^w_u(x)` with its witness mask.
    pub fn expansional(&mut self, budget: f64) -> (f64, u32) {
        self.ensure_index();
        let idx = self.expansional.as_ref().unwrap();
        let count = idx.by_weight.partition_point(|&m| self.sums[m as usize] <= budget + self.slack);
        let m = idx.prefix_best[count.max(1) - 1];
        (idx.values[m as usize], m)
    }

    /// Chebyshev value on a mask, cached.
    pub fn best_on(&mut self, mask: u32) -> Result<f64> {
        let cached = self.best[mask as usize];
        if !cached.is_nan() {
            return Ok(cached);
        }
        let v = chebyshev::solve(self.space, &self.x, &subsets::mask_positions(mask), self.tol, false)?.value;
        self.best[mask as usize] = v;
        Ok(v)
    }

    /// `σ^w_u(x)` with its witness mask. Adding an index never hurts free
    /// coefficients, so only maximal feasible sets are solved; the expansional
    /// value caps the result.
    pub fn best(&mut self, budget: f64) -> Result<(f64, u32)> {
        let dim = self.x.len();
        let full = subsets::full_mask(dim);
        let mut sorted_w: Vec<f64> = (0..dim).map(|i| self.sums[1 << i]).collect();
        sorted_w.sort_by(f64::total_cmp);
        let mut candidates = Vec::new();
        let mut smallest = 0.0;
        for k in 0..=dim {
            if k > 0 {
                smallest += sorted_w[k - 1];
                if smallest > budget + self.slack {
                    break;
                }
            }
            subsets::for_each_k_subset(dim, k, |m| {
                if self.fits(m, budget) {
                    let maximal = (0..dim).filter(|i| m & (1 << i) == 0).all(|i| !self.fits(m | (1 << i), budget));
                    if maximal || m == full {
                        candidates.push(m);
                    }
                }
            });
        }
        let (mut best_v, mut best_m) = self.expansional(budget);
        for m in candidates {
            let v = self.best_on(m)?;
            if v < best_v {
                best_v = v;
                best_m = m;
            }
        }
        Ok((best_v, best_m))
    }

    /// Full result for one budget, with polished coefficients.
    pub fn result(&mut self, budget: f64, mode: SigmaMode) -> Result<SigmaResult> {
        if !(budget >= 0.0) {
            return Err(Error::InvalidInput(format!("budget must be >= 0, got {budget}")));
        }
        let set_of = |m: u32| IndexSet::from_mask(m);
        match mode {
            SigmaMode::Expansional => {
                let (v, m) = self.expansional(budget);
                Ok(SigmaResult {
                    value: v,
                    optimal_set: set_of(m),
                    optimal_coefficients: subsets::mask_positions(m).iter().map(|&i| self.x[i]).collect(),
                    mode,
                })
            }
            SigmaMode::Best => {
                let (v, m) = self.best(budget)?;
                let solved = chebyshev::solve(self.space, &self.x, &subsets::mask_positions(m), self.tol, true)?;
                let (value, coefficients) = if solved.value <= v {
                    (solved.value, solved.coefficients)
                } else {
                    (v, subsets::mask_positions(m).iter().map(|&i| self.x[i]).collect())
                };
                Ok(SigmaResult { value, optimal_set: set_of(m), optimal_coefficients: coefficients, mode })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(v: &[f64]) -> CoefficientVector {
        CoefficientVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn spec_examples() {
        let l1 = NormedSpace::lp(1.0, 3).unwrap();
        let one = Weight::constant(3);
        let r = sigma_w(&l1, &cv(&[1.0, 1.0, 1.0]), &one, 1.0, SigmaMode::Best).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        assert_eq!(r.optimal_set.len(), 1);

        let l2 = NormedSpace::lp(2.0, 3).unwrap();
        let x = cv(&[3.0, 2.0, 1.0]);
        let r = sigma_w(&l2, &x, &one, 2.0, SigmaMode::Expansional).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.optimal_set.indices(), &[1, 2]);
        assert_eq!(r.optimal_coefficients, vec![3.0, 2.0]);

        for mode in [SigmaMode::Best, SigmaMode::Expansional] {
            let r = sigma_w(&l2, &x, &one, 0.0, mode).unwrap();
            assert_eq!(r.value, 14f64.sqrt());
            assert!(r.optimal_set.is_empty());
        }
    }

    #[test]
    fn best_below_expansional_below_norm() {
        let space = NormedSpace::sup(5).unwrap();
        let x = [2.0, -1.0, 0.5, 1.5, -0.25];
        let w = [1.0, 0.5, 0.25, 0.125, 0.0625];
        let mut t = ResidualTable::new(&space, &x, &w).unwrap();
        let nx = t.norm_x();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for k in 0..=20 {
            let u = k as f64 * 0.1;
            let (e, _) = t.expansional(u);
            let (b, _) = t.best(u).unwrap();
            assert!(b <= e && e <= nx);
            assert!(e <= prev.1 && b <= prev.0 + 1e-9 * nx);
            prev = (b, e);
        }
    }

    #[test]
    fn dimension_guard() {
        let space = NormedSpace::lp(2.0, 21).unwrap();
        let x = cv(&[1.0; 21]);
        assert!(matches!(
            sigma_w(&space, &x, &Weight::constant(21), 1.0, SigmaMode::Expansional),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
